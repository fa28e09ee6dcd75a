mod common;

use std::collections::BTreeSet;

use common::graphs::{bfs_undirected, flat, random_graph, same_generation, warshall};
use proptest::prelude::*;
use reprlog::bench::Workload;
use reprlog::eval::{naive_eval, run_program, EvalConfig, Facts, Strategy};
use reprlog::storage::{AccessType, DataStructure};

fn grid() -> Vec<(AccessType, DataStructure)> {
    let mut g = vec![(AccessType::FS, DataStructure::RS)];
    for a in [AccessType::CI, AccessType::UKI, AccessType::UPI] {
        for d in [DataStructure::SA, DataStructure::BP, DataStructure::HT, DataStructure::RX] {
            g.push((a, d));
        }
    }
    g
}

fn result(w: Workload, facts: &Facts, cfg: &EvalConfig) -> BTreeSet<Vec<u64>> {
    let p = w.program();
    let out = run_program(&p, facts, cfg).unwrap_or_else(|e| panic!("{w}: {e}"));
    let rel = p.idbs().next().unwrap().to_string();
    out.results.get(&rel).unwrap_or(&[]).iter().cloned().collect()
}

fn graph_facts(w: Workload, edges: &[(u64, u64)], seeds: &[u64]) -> Facts {
    let mut f = Facts::new();
    match w {
        Workload::Reachability => {
            f.insert("edges", 2, flat(edges));
            f.insert("reachable", 1, seeds.to_vec());
        }
        _ => f.insert("edge", 2, flat(edges)),
    }
    f
}

fn graph_oracle(w: Workload, edges: &[(u64, u64)], seeds: &[u64]) -> BTreeSet<Vec<u64>> {
    match w {
        Workload::Tc => warshall(edges),
        Workload::Reachability => bfs_undirected(edges, seeds),
        Workload::Sg => same_generation(edges),
        Workload::Andersen => unreachable!(),
    }
}

#[test]
fn example_graph_reaches_everything() {
    let edges = [(0, 1), (1, 2), (1, 4), (2, 3), (4, 5)];
    let facts = graph_facts(Workload::Reachability, &edges, &[2]);
    let all: BTreeSet<Vec<u64>> = (0..6).map(|i| vec![i]).collect();
    assert_eq!(bfs_undirected(&edges, &[2]), all);
    for (a, d) in grid() {
        for s in Strategy::ALL {
            let cfg = EvalConfig::uniform(&Workload::Reachability.program(), a, d, s);
            assert_eq!(result(Workload::Reachability, &facts, &cfg), all, "{a}-{d} {s}");
        }
    }
}

#[test]
fn bundled_datasets_match_oracles() {
    for w in Workload::ALL {
        let facts = w.bundled_facts();
        let p = w.program();
        let expect: BTreeSet<Vec<u64>> = match w {
            Workload::Andersen => naive_eval(&p, &facts).unwrap().get("points_to").unwrap().iter().cloned().collect(),
            _ => {
                let name = if w == Workload::Reachability { "edges" } else { "edge" };
                let e = facts.get(name).unwrap();
                let edges: Vec<(u64, u64)> = e.tuples().map(|t| (t[0], t[1])).collect();
                let seeds: Vec<u64> = facts.get("reachable").map(|r| r.data.clone()).unwrap_or_default();
                graph_oracle(w, &edges, &seeds)
            }
        };
        assert!(!expect.is_empty(), "{w}");
        for (a, d) in grid() {
            let cfg = EvalConfig::uniform(&p, a, d, Strategy::S1);
            assert_eq!(result(w, &facts, &cfg), expect, "{w} {a}-{d}");
        }
    }
}

#[test]
fn oracles_agree_with_naive_evaluation() {
    for seed in 0..5 {
        let edges = random_graph(seed, 30, 45);
        for w in [Workload::Tc, Workload::Reachability, Workload::Sg] {
            let facts = graph_facts(w, &edges, &[0, 7]);
            let naive = naive_eval(&w.program(), &facts).unwrap();
            let rel = w.program().idbs().next().unwrap().to_string();
            let naive: BTreeSet<Vec<u64>> = naive.get(&rel).unwrap().iter().cloned().collect();
            assert_eq!(naive, graph_oracle(w, &edges, &[0, 7]), "{w} seed {seed}");
        }
    }
}

#[test]
fn delta_outermost_reordering_keeps_results() {
    let edges = random_graph(11, 40, 70);
    for w in [Workload::Tc, Workload::Sg] {
        let facts = graph_facts(w, &edges, &[]);
        let mut cfg = EvalConfig::baseline(&w.program());
        cfg.delta_outermost = true;
        assert_eq!(result(w, &facts, &cfg), graph_oracle(w, &edges, &[]), "{w}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_graph_any_configuration(
        seed in any::<u64>(),
        n in 2u64..40,
        density in 1usize..3,
        w in prop::sample::select(vec![Workload::Tc, Workload::Reachability, Workload::Sg]),
        g in prop::sample::select(grid()),
        s in prop::sample::select(Strategy::ALL.to_vec()),
    ) {
        let edges = random_graph(seed, n, n as usize * density);
        let seeds = [seed % n];
        let facts = graph_facts(w, &edges, &seeds);
        let cfg = EvalConfig::uniform(&w.program(), g.0, g.1, s);
        prop_assert_eq!(result(w, &facts, &cfg), graph_oracle(w, &edges, &seeds));
    }
}
