mod common;

use common::props::{buildup_case, check_buildup, check_formulas, run_strategy, strategy_configs};
use proptest::prelude::*;
use reprlog::eval::Strategy;

#[test]
fn counter_profiles_match_formulas() {
    let n = check_formulas().unwrap();
    assert_eq!(n, 10 * 4 * 4);
}

#[test]
fn fixture_contents() {
    let (b, n, _) = run_strategy(Strategy::S4, &strategy_configs()[0], &[[1, 2], [2, 3]], &[[2, 3], [9, 9], [2, 3], [9, 9], [8, 1]]);
    assert_eq!(b, [[1, 2], [2, 3], [8, 1], [9, 9]].iter().map(|t| t.to_vec()).collect());
    assert_eq!(n, [[8, 1], [9, 9]].iter().map(|t| t.to_vec()).collect());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strategies_reach_the_same_state(c in buildup_case()) {
        check_buildup(c)?;
    }
}
