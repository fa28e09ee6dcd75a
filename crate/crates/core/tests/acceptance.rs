//! One pass/fail line per acceptance criterion. The performance trends
//! (criterion 8) are hardware-sensitive: their line is printed with the
//! measured ratios and the test only fails on them when
//! `REPRLOG_STRICT_TRENDS=1`.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::graphs::{bfs_undirected, flat, random_graph, same_generation, warshall};
use common::props;
use proptest::test_runner::{Config, TestRunner};
use reprlog::bench::{
    gen_dense_shuffled, gen_interweaving, gen_random_graph, interweaving_config, load_cell, run_cell, run_trends_with,
    save_cell, BenchError, Cell, GraphSize, MetricsRow, TrendOptions, Workload,
};
use reprlog::eval::{naive_eval, run_program, EvalConfig, Facts, Strategy};
use reprlog::frontend::parse_program;
use reprlog::selector::{select_configuration, SelectOptions};
use reprlog::storage::{AccessType, DataStructure, IndexKey, RepConfig, Relation};

type Outcome = Result<String, String>;

fn grid() -> Vec<(AccessType, DataStructure)> {
    let mut g = vec![(AccessType::FS, DataStructure::RS)];
    for a in [AccessType::CI, AccessType::UKI, AccessType::UPI] {
        for d in [DataStructure::SA, DataStructure::BP, DataStructure::HT, DataStructure::RX] {
            g.push((a, d));
        }
    }
    g
}

fn idb_set(w: Workload, facts: &Facts, cfg: &EvalConfig) -> Result<BTreeSet<Vec<u64>>, String> {
    let p = w.program();
    let out = run_program(&p, facts, cfg).map_err(|e| e.to_string())?;
    let rel = p.idbs().next().unwrap().to_string();
    Ok(out.results.get(&rel).unwrap_or(&[]).iter().cloned().collect())
}

fn graph_facts(w: Workload, edges: &[(u64, u64)], seeds: &[u64]) -> Facts {
    let mut f = Facts::new();
    if w == Workload::Reachability {
        f.insert("edges", 2, flat(edges));
        f.insert("reachable", 1, seeds.to_vec());
    } else {
        f.insert("edge", 2, flat(edges));
    }
    f
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for seed in 0..50u64 {
        let n = 20 + (seed * 37) % 181;
        let edges = random_graph(seed, n, (n as usize * 3) / 2);
        let seeds = [seed % n];
        for w in [Workload::Tc, Workload::Reachability, Workload::Sg] {
            let facts = graph_facts(w, &edges, &seeds);
            let oracle = match w {
                Workload::Tc => warshall(&edges),
                Workload::Reachability => bfs_undirected(&edges, &seeds),
                _ => same_generation(&edges),
            };
            let p = w.program();
            let rel = p.idbs().next().unwrap().to_string();
            let naive: BTreeSet<Vec<u64>> =
                naive_eval(&p, &facts).map_err(|e| e.to_string())?.get(&rel).unwrap_or(&[]).iter().cloned().collect();
            if naive != oracle {
                return Err(format!("naive evaluation disagrees with the {w} oracle on graph {seed}"));
            }
            for (a, d) in grid() {
                for s in Strategy::ALL {
                    let got = idb_set(w, &facts, &EvalConfig::uniform(&p, a, d, s))?;
                    runs += 1;
                    if got != oracle {
                        return Err(format!("{w} graph {seed} {a}-{d} {s}: {} tuples, oracle {}", got.len(), oracle.len()));
                    }
                }
            }
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(300) {
        return Err(format!("{runs} runs correct but took {took:.1?} (limit 5 min)"));
    }
    Ok(format!("{runs} runs equal to graph oracles and naive evaluation in {took:.1?}"))
}

fn criterion_2() -> Outcome {
    let w = Workload::Reachability;
    let edges = [(0, 1), (1, 2), (1, 4), (2, 3), (4, 5)];
    let facts = graph_facts(w, &edges, &[2]);
    let want: BTreeSet<Vec<u64>> = (0..6).map(|i| vec![i]).collect();
    if bfs_undirected(&edges, &[2]) != want {
        return Err("BFS oracle disagrees with the expected set".into());
    }
    let p = w.program();
    let mut configs: Vec<EvalConfig> =
        grid().into_iter().flat_map(|(a, d)| Strategy::ALL.map(|s| EvalConfig::uniform(&p, a, d, s))).collect();
    let sig = reprlog::profiler::compute_signature(&p, &facts).map_err(|e| e.to_string())?;
    configs.push(select_configuration(&sig, &SelectOptions::default()).map_err(|e| e.to_string())?.to_eval_config());
    for cfg in &configs {
        let got = idb_set(w, &facts, cfg)?;
        if got != want {
            return Err(format!("got {got:?}"));
        }
    }
    Ok(format!("reachable = {{0,1,2,3,4,5}} under {} configurations", configs.len()))
}

fn criterion_3() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner.run(&props::buildup_case(), props::check_buildup).map_err(|e| e.to_string())?;
    let n = props::check_formulas()?;
    Ok(format!("1000 random instances agree across S1-S4; {n} fixture profiles match the formulas"))
}

fn criterion_4() -> Outcome {
    let run = |cases: u32| TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    run(1000).run(&props::append_seq(), props::check_sapp).map_err(|e| format!("(a) {e}"))?;
    run(1000).run(&props::hash_ops(), props::check_hash_load).map_err(|e| format!("(b) {e}"))?;
    run(100).run(&props::dataset(), props::check_probe).map_err(|e| format!("(c) {e}"))?;
    let mut store = reprlog::storage::RowStore::new(2);
    let first = store.push(&[7, 9]);
    let addr = store.get(first).as_ptr();
    for i in 0..1_000_000u64 {
        store.push(&[i, i]);
    }
    if store.get(first) != [7, 9] || store.get(first).as_ptr() != addr {
        return Err("(d) tuple reference moved".into());
    }
    Ok("(a) 1000 append sequences (b) 1000 hash op sequences (c) 100 datasets x 13 structures (d) 10^6 appends".into())
}

fn criterion_5() -> Outcome {
    let sig = common::andersen_signature(&common::andersen_counters());
    let sel = select_configuration(&sig, &SelectOptions::default()).map_err(|e| e.to_string())?;
    let r = |a: AccessType, d: DataStructure, k: &str| RepConfig::indexed(a, d, k.parse().unwrap());
    let ci_sa = |k| r(AccessType::CI, DataStructure::SA, k);
    let expected = [
        ("address_of", vec![ci_sa("0_1")]),
        ("assign", vec![ci_sa("1")]),
        ("load", vec![ci_sa("1")]),
        ("store", vec![ci_sa("0")]),
        ("points_to", vec![r(AccessType::CI, DataStructure::HT, "0"), r(AccessType::CI, DataStructure::HT, "0_1")]),
    ]
    .into_iter()
    .map(|(n, v)| (n.to_string(), v))
    .collect();
    let deltas = [("points_to".to_string(), vec![r(AccessType::CI, DataStructure::BP, "0_1")])].into_iter().collect();
    if sel.relations != expected || sel.deltas != deltas {
        return Err(format!("selected:\n{}", sel.explain()));
    }
    Ok("address_of CI-SA(0_1), assign CI-SA(1), load CI-SA(1), store CI-SA(0), points_to CI-HT(0)+CI-HT(0_1), delta/new CI-BP(0_1)".into())
}

fn criterion_6() -> Outcome {
    let load_key = |c: &reprlog::eval::OpCounters| -> Result<String, String> {
        let sig = common::andersen_signature(c);
        let sel = select_configuration(&sig, &SelectOptions::default()).map_err(|e| e.to_string())?;
        let k = sel.key_choices.iter().find(|k| k.relation == "load").ok_or("no key choice for load")?;
        Ok(k.chosen.to_string())
    };
    let mut c = common::andersen_counters();
    let before = load_key(&c)?;
    common::swap_load_counts(&mut c);
    let after = load_key(&c)?;
    if before != "1" || after != "0" {
        return Err(format!("load key {before} with the published counts, {after} swapped"));
    }
    Ok("load key [1] with 24.8M vs 29K, [0] after swapping".into())
}

fn criterion_7() -> Outcome {
    let p = Workload::Tc.program();
    let mut facts = Facts::new();
    facts.insert("edge", 2, gen_random_graph(1000, GraphSize::P(0.01), 7));
    let cfg = EvalConfig::baseline(&p);
    let a = run_program(&p, &facts, &cfg).map_err(|e| e.to_string())?;
    let b = run_program(&p, &facts, &cfg).map_err(|e| e.to_string())?;
    let card = |o: &reprlog::eval::RunOutput| o.results.cardinality("path");
    if a.counters != b.counters || card(&a) != card(&b) {
        return Err("counters or cardinalities differ between runs".into());
    }
    Ok(format!("{} path tuples, {} counter rows identical", card(&a), a.counters.rep_rows().len() + a.counters.edge_rows().len()))
}

/// Runs one saved cell when started by `run_in_worker`; a no-op otherwise.
#[test]
fn cell_worker() {
    let Ok(dir) = std::env::var("REPRLOG_CELL_DIR") else { return };
    let dir = std::path::PathBuf::from(dir);
    let experiment = std::env::var("REPRLOG_CELL_EXPERIMENT").unwrap();
    let repetitions: usize = std::env::var("REPRLOG_CELL_REPETITIONS").unwrap().parse().unwrap();
    let row = run_cell(&experiment, &load_cell(&dir).unwrap(), repetitions).unwrap();
    std::fs::write(dir.join("row.json"), serde_json::to_string(&row).unwrap()).unwrap();
}

/// Runs a trend cell in a fresh copy of this test binary.
fn run_in_worker(experiment: &str, cell: &Cell, repetitions: usize) -> Result<MetricsRow, BenchError> {
    let err = |m: String| BenchError::Usage(m);
    let tmp = tempfile::tempdir().map_err(|e| err(e.to_string()))?;
    save_cell(cell, tmp.path())?;
    let status = std::process::Command::new(std::env::current_exe().map_err(|e| err(e.to_string()))?)
        .args(["--exact", "cell_worker", "--test-threads=1", "--quiet"])
        .env("REPRLOG_CELL_DIR", tmp.path())
        .env("REPRLOG_CELL_EXPERIMENT", experiment)
        .env("REPRLOG_CELL_REPETITIONS", repetitions.to_string())
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| err(e.to_string()))?;
    if !status.success() {
        return Err(err(format!("worker for {} {} exited with {status}", cell.params, cell.config)));
    }
    let text = std::fs::read_to_string(tmp.path().join("row.json")).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

fn criterion_8() -> Outcome {
    let report = run_trends_with(&TrendOptions::default(), &mut run_in_worker).map_err(|e| e.to_string())?;
    let lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {} ratio {:.2} ({})", if c.passed { "ok" } else { "MISSED" }, c.name, c.ratio, c.detail))
        .collect();
    let text = lines.join("\n    ");
    if report.passed() {
        Ok(text)
    } else {
        Err(text)
    }
}

fn criterion_9() -> Outcome {
    let data = gen_dense_shuffled(1_000_000, 2, 1, 3);
    let mut rel = Relation::new(2, &[RepConfig::indexed(AccessType::CI, DataStructure::SA, IndexKey::full(2))]).unwrap();
    rel.bulk_load(&data).unwrap();
    let bytes = rel.memory_footprint();
    let (lo, hi) = (16_000_000, 16_000_000 + 2 * 1024 * 1024);
    if !(lo..=hi).contains(&bytes) {
        return Err(format!("CI-SA footprint {bytes} outside [{lo}, {hi}]"));
    }
    let p = parse_program(include_str!("../corpus/interweaving.dl")).unwrap();
    let facts = gen_interweaving(10_000, 1, 5);
    let mut pairs = Vec::new();
    for d in [DataStructure::SA, DataStructure::BP, DataStructure::RX] {
        let size = |a| -> Result<usize, String> {
            let out = run_program(&p, &facts, &interweaving_config(&p, 4, a, d, true)).map_err(|e| e.to_string())?;
            Ok(out.footprints.iter().filter(|f| f.relation == "s").map(|f| f.bytes).sum())
        };
        let (upi, ci) = (size(AccessType::UPI)?, size(AccessType::CI)?);
        if upi >= ci {
            return Err(format!("UPI-{d} {upi} bytes not below CI-{d} {ci} bytes"));
        }
        pairs.push(format!("{d} {upi}<{ci}"));
    }
    Ok(format!("CI-SA {bytes} bytes; s with 4 shared-store UPI reps vs 4 CI reps: {}", pairs.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "cross-configuration correctness", criterion_1),
        (2, "example graph reachability", criterion_2),
        (3, "strategy state equivalence", criterion_3),
        (4, "structure property suites", criterion_4),
        (5, "selector golden configuration", criterion_5),
        (6, "index-key argmax", criterion_6),
        (7, "counter determinism", criterion_7),
        (9, "memory accounting", criterion_9),
        (8, "desk-scale performance trends", criterion_8),
    ];
    let strict_trends = std::env::var("REPRLOG_STRICT_TRENDS").is_ok_and(|v| v == "1");
    let mut failed = Vec::new();
    for (n, name, f) in criteria {
        let t = Instant::now();
        let res = f();
        let status = if res.is_ok() { "PASS" } else { "FAIL" };
        let detail = res.as_ref().unwrap_or_else(|e| e);
        println!("criterion {n} {status} {name} [{:.1?}]\n    {detail}", t.elapsed());
        if res.is_err() && (n != 8 || strict_trends) {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
