//! Property checks shared by the property suites and the acceptance run.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use reprlog::eval::{apply_strategy, RepCounters, Strategy as BuildUp, StrategyCounts};
use reprlog::storage::{AccessType, DataStructure, IndexKey, RepConfig, Relation};

pub type Set = BTreeSet<Vec<u64>>;

pub fn flat(tuples: &[Vec<u64>]) -> Vec<u64> {
    tuples.iter().flatten().copied().collect()
}

/// (arity, tuples, key, probe value lists) over a small domain.
pub type Dataset = (usize, Vec<Vec<u64>>, Vec<usize>, Vec<Vec<u64>>);

pub fn dataset() -> impl Strategy<Value = Dataset> {
    (1usize..=4).prop_flat_map(|arity| {
        let tuples = prop::collection::vec(prop::collection::vec(0u64..6, arity), 0..120);
        let key = Just((0..arity).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_flat_map(move |perm| (1..=arity).prop_map(move |w| perm[..w].to_vec()));
        let probes = prop::collection::vec(prop::collection::vec(0u64..7, 1..=arity), 1..20);
        (Just(arity), tuples, key, probes)
    })
}

/// Every structure's probe result equals a filter over the raw tuples,
/// as a multiset. Hash tables must refuse prefix probes.
pub fn check_probe((arity, tuples, key, probes): Dataset) -> Result<(), TestCaseError> {
    let ik = IndexKey::new(key.clone()).unwrap();
    for cfg in RepConfig::all_combinations(&ik) {
        let mut rel = Relation::new(arity, std::slice::from_ref(&cfg)).unwrap();
        rel.bulk_load(&flat(&tuples)).unwrap();
        for p in &probes {
            let width = p.len().min(key.len());
            let values = &p[..width];
            let mut expect: Vec<Vec<u64>> =
                tuples.iter().filter(|t| values.iter().zip(&key).all(|(v, &a)| t[a] == *v)).cloned().collect();
            expect.sort();
            let mut got: Vec<Vec<u64>> = if cfg.access == AccessType::FS {
                rel.scan_filter(&key[..width], values).map(|t| t.to_vec()).collect()
            } else if cfg.ds == DataStructure::HT && width < key.len() {
                prop_assert!(rel.probe(0, values).is_err(), "{} accepted a prefix probe", cfg);
                continue;
            } else {
                rel.probe(0, values).unwrap().map(|t| t.to_vec()).collect()
            };
            got.sort();
            prop_assert_eq!(got, expect, "{} probe {:?}", cfg, values);
        }
    }
    Ok(())
}

/// (arity, append batches, key rotation).
pub type AppendSeq = (usize, Vec<Vec<Vec<u64>>>, usize);

pub fn append_seq() -> impl Strategy<Value = AppendSeq> {
    (1usize..=3).prop_flat_map(|a| {
        (
            Just(a),
            prop::collection::vec(prop::collection::vec(prop::collection::vec(0u64..8, a), 0..60), 1..4),
            0usize..3,
        )
    })
}

/// A sorted array with pending appends is ordered on its key and free of
/// duplicates once the append sequence closes.
pub fn check_sapp((arity, batches, rotate): AppendSeq) -> Result<(), TestCaseError> {
    let key: Vec<usize> = (0..arity).map(|i| (i + rotate) % arity).collect();
    let cfg = RepConfig::indexed(AccessType::CI, DataStructure::SAPP, IndexKey::new(key.clone()).unwrap());
    let mut rel = Relation::new(arity, &[cfg]).unwrap();
    let mut all = BTreeSet::new();
    for batch in &batches {
        for t in batch {
            rel.append(t).unwrap();
            all.insert(key.iter().map(|&a| t[a]).collect::<Vec<u64>>());
        }
        rel.finished_append();
    }
    let got: Vec<Vec<u64>> = rel.iter().map(|t| key.iter().map(|&a| t[a]).collect()).collect();
    prop_assert!(got.windows(2).all(|w| w[0] < w[1]), "not strictly ascending: {:?}", got);
    prop_assert_eq!(got, all.into_iter().collect::<Vec<_>>());
    Ok(())
}

/// Operation sequences on a hash representation: (op, tuple, batch size).
pub type HashOps = (Vec<(u8, Vec<u64>, usize)>, AccessType);

pub fn hash_ops() -> impl Strategy<Value = HashOps> {
    (
        prop::collection::vec((0u8..4, prop::collection::vec(0u64..50, 2), 1usize..40), 1..60),
        prop::sample::select(vec![AccessType::CI, AccessType::UKI, AccessType::UPI]),
    )
}

pub fn check_hash_load((ops, access): HashOps) -> Result<(), TestCaseError> {
    let cfg = RepConfig::indexed(access, DataStructure::HT, IndexKey::new(vec![0]).unwrap());
    let mut rel = Relation::new(2, &[cfg]).unwrap();
    for (op, t, n) in ops {
        match op {
            0 => rel.append(&t).unwrap(),
            1 => {
                rel.finished_append();
                let batch: Vec<u64> = (0..n as u64).flat_map(|i| [t[0] + i, t[1]]).collect();
                rel.bulk_load(&batch).unwrap();
            }
            2 => {
                rel.remove(&t);
            }
            _ => rel.finished_append(),
        }
        let (used, cap) = rel.hash_load(0).unwrap();
        prop_assert!(cap == 0 || used * 2 <= cap, "load {}/{}", used, cap);
    }
    Ok(())
}

pub fn strategy_configs() -> Vec<RepConfig> {
    let full = IndexKey::full(2);
    vec![
        RepConfig::indexed(AccessType::CI, DataStructure::BP, full.clone()),
        RepConfig::indexed(AccessType::CI, DataStructure::HT, full.clone()),
        RepConfig::indexed(AccessType::UPI, DataStructure::SA, full.clone()),
        RepConfig::indexed(AccessType::UKI, DataStructure::RX, IndexKey::new(vec![1, 0]).unwrap()),
        RepConfig::full_scan(),
    ]
}

pub fn run_strategy(s: BuildUp, cfg: &RepConfig, base: &[[u64; 2]], found: &[[u64; 2]]) -> (Set, Set, StrategyCounts) {
    let mut b = Relation::new(2, std::slice::from_ref(cfg)).unwrap();
    b.bulk_load(&base.concat()).unwrap();
    let mut n = b.empty_like();
    let counts = apply_strategy(s, &found.concat(), &mut b, &mut n).unwrap();
    let set = |r: &Relation| r.iter().map(|t| t.to_vec()).collect::<Set>();
    (set(&b), set(&n), counts)
}

/// Expected counts from the definition of each strategy. `f` found
/// entries, `nb` of them absent from base, `u` distinct absent tuples,
/// `d` distinct found tuples, `b` base tuples.
pub fn strategy_formula(s: BuildUp, base: &[[u64; 2]], found: &[[u64; 2]]) -> StrategyCounts {
    let bset: BTreeSet<[u64; 2]> = base.iter().copied().collect();
    let f = found.len() as u64;
    let nb = found.iter().filter(|t| !bset.contains(*t)).count() as u64;
    let u = found.iter().filter(|t| !bset.contains(*t)).collect::<BTreeSet<_>>().len() as u64;
    let d = found.iter().collect::<BTreeSet<_>>().len() as u64;
    let b = bset.len() as u64;
    let merged = (u > 0) as u64;
    let z = RepCounters::default();
    let (base, new) = match s {
        BuildUp::S1 => (
            RepCounters { contains: f, bulk_load: u, ..z },
            RepCounters { contains: nb, append: u, iter_calls: merged, iter_returned: u, ..z },
        ),
        BuildUp::S2 => (
            RepCounters { contains: f - (nb - u), bulk_load: u, ..z },
            RepCounters { contains: f, append: u, iter_calls: merged, iter_returned: u, ..z },
        ),
        BuildUp::S3 => (RepCounters { contains: f, append: u, ..z }, RepCounters { append: u, ..z }),
        BuildUp::S4 => (
            RepCounters { iter_calls: 1, iter_returned: b, bulk_load: u, ..z },
            RepCounters { contains: f + b, append: d, remove: d - u, iter_calls: merged, iter_returned: u, ..z },
        ),
    };
    StrategyCounts { base, new }
}

pub fn strategy_fixtures() -> Vec<(Vec<[u64; 2]>, Vec<[u64; 2]>)> {
    vec![
        (vec![], vec![]),
        (vec![[1, 1]], vec![]),
        (vec![], vec![[1, 2], [3, 4]]),
        (vec![[1, 2], [3, 4]], vec![[1, 2], [3, 4]]),
        (vec![[1, 2]], vec![[5, 5], [5, 5], [5, 5]]),
        (vec![[1, 2], [2, 3]], vec![[2, 3], [9, 9], [2, 3], [9, 9], [8, 1]]),
        ((0..10).map(|i| [i, i]).collect(), (5..15).map(|i| [i, i]).collect()),
        ((0..10).map(|i| [i, 0]).collect(), (0..30).map(|i| [i % 3, 0]).collect()),
        (vec![[7, 7]], (0..20).rev().map(|i| [i / 2, i % 2]).collect()),
        ((0..4).map(|i| [0, i]).collect(), vec![[0, 3], [0, 4], [0, 4], [0, 0], [1, 0]]),
    ]
}

/// (base set, found stream, representation).
pub type BuildUpCase = (Vec<[u64; 2]>, Vec<[u64; 2]>, RepConfig);

pub fn buildup_case() -> impl Strategy<Value = BuildUpCase> {
    (
        prop::collection::btree_set((0u64..12, 0u64..4), 0..30),
        prop::collection::vec((0u64..12, 0u64..4), 0..60),
        prop::sample::select(strategy_configs()),
    )
        .prop_map(|(b, f, c)| (b.into_iter().map(|(x, y)| [x, y]).collect(), f.into_iter().map(|(x, y)| [x, y]).collect(), c))
}

/// All four strategies leave base = base₀ ∪ found and new = found \ base₀.
pub fn check_buildup((base, found, cfg): BuildUpCase) -> Result<(), TestCaseError> {
    let bset: Set = base.iter().map(|t| t.to_vec()).collect();
    let fset: Set = found.iter().map(|t| t.to_vec()).collect();
    let want_base: Set = bset.union(&fset).cloned().collect();
    let want_new: Set = fset.difference(&bset).cloned().collect();
    for s in BuildUp::ALL {
        let (b, n, _) = run_strategy(s, &cfg, &base, &found);
        prop_assert_eq!(&b, &want_base, "{} {} base", s, cfg);
        prop_assert_eq!(&n, &want_new, "{} {} new", s, cfg);
    }
    Ok(())
}

/// Checks the counter formulas on every fixture; returns a description of
/// the first mismatch.
pub fn check_formulas() -> Result<usize, String> {
    let mut checked = 0;
    for (i, (base, found)) in strategy_fixtures().iter().enumerate() {
        for s in BuildUp::ALL {
            for cfg in strategy_configs().iter().filter(|c| c.access != AccessType::FS) {
                let (_, _, got) = run_strategy(s, cfg, base, found);
                let want = strategy_formula(s, base, found);
                if got != want {
                    return Err(format!("fixture {i} {s} {cfg}: got {got:?}, want {want:?}"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}
