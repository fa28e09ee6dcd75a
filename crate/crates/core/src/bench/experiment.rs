//! Experiment grids and the cell runner.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::corpus::Workload;
use super::gen::{gen_buildup_stream, gen_dense_shuffled, gen_interweaving, gen_probe_pair, gen_schema_pair, gen_wide_pair};
use super::metrics::MetricsRow;
use super::BenchError;
use crate::eval::{apply_strategy, run_program, EvalConfig, Facts, OccurrenceRef, RepCounters, Side, Strategy};
use crate::frontend::{parse_program, Program};
use crate::profiler::compute_signature;
use crate::selector::{select_configuration, SelectOptions};
use crate::storage::{AccessType, DataStructure, IndexKey, RepConfig, Relation};

const MIB: f64 = 1024.0 * 1024.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Experiment {
    /// Inner relation size under ordered and unordered probes.
    Scaling,
    /// Duplicates per key in the inner relation.
    Multiplicity,
    /// Outer relation size against a fixed inner relation, with load times.
    Bulkload,
    /// Width of a compound join key over 16-attribute relations.
    KeyWidth,
    /// Width of the inner relation's schema.
    SchemaWidth,
    /// One to four representations shared by the interweaving rules.
    Sharing,
    /// Deduplication strategies on pre-generated found streams.
    Buildup,
    /// The bundled workloads under selected, baseline and uniform configs.
    Workloads,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Scaling,
        Experiment::Multiplicity,
        Experiment::Bulkload,
        Experiment::KeyWidth,
        Experiment::SchemaWidth,
        Experiment::Sharing,
        Experiment::Buildup,
        Experiment::Workloads,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Scaling => "scaling",
            Experiment::Multiplicity => "multiplicity",
            Experiment::Bulkload => "bulkload",
            Experiment::KeyWidth => "keywidth",
            Experiment::SchemaWidth => "schemawidth",
            Experiment::Sharing => "sharing",
            Experiment::Buildup => "buildup",
            Experiment::Workloads => "workloads",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| BenchError::Usage(format!("unknown experiment {s:?}")))
    }
}

/// Parameters of one experiment grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    /// Fraction of the published sizes. For `workloads`, 0.01 is the
    /// desk-scale dataset preset and sizes grow linearly from there.
    pub scale: f64,
    pub seed: u64,
    /// Runs per cell; timings are averaged.
    pub repetitions: usize,
    /// Access type and data structure of the varied representation.
    pub grid: Vec<(AccessType, DataStructure)>,
    pub strategies: Vec<Strategy>,
}

fn full_grid() -> Vec<(AccessType, DataStructure)> {
    let mut g = Vec::new();
    for a in [AccessType::CI, AccessType::UKI, AccessType::UPI] {
        for d in [DataStructure::SA, DataStructure::BP, DataStructure::HT, DataStructure::RX] {
            g.push((a, d));
        }
    }
    g.push((AccessType::FS, DataStructure::RS));
    g
}

impl ExperimentSpec {
    /// Defaults: 1/100 of the published sizes, three repetitions, all 13
    /// representations (covered structures plus SAPP for the build-up).
    pub fn new(experiment: Experiment) -> Self {
        let (grid, strategies) = match experiment {
            Experiment::Buildup => (
                [DataStructure::SA, DataStructure::SAPP, DataStructure::BP, DataStructure::HT, DataStructure::RX]
                    .map(|d| (AccessType::CI, d))
                    .to_vec(),
                Strategy::ALL.to_vec(),
            ),
            Experiment::Workloads => (
                full_grid().into_iter().filter(|g| g.0 != AccessType::FS).collect(),
                vec![Strategy::S1, Strategy::S2, Strategy::S3],
            ),
            _ => (full_grid(), vec![Strategy::S1]),
        };
        ExperimentSpec { experiment, scale: 0.01, seed: 42, repetitions: 3, grid, strategies }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.scale > 0.0) {
            return Err(BenchError::Usage("scale must be positive".into()));
        }
        if self.repetitions == 0 {
            return Err(BenchError::Usage("at least one repetition".into()));
        }
        if self.grid.is_empty() || self.strategies.is_empty() {
            return Err(BenchError::Usage("empty grid".into()));
        }
        Ok(())
    }

    fn tuples(&self, mib: f64, arity: usize) -> usize {
        ((mib * MIB * self.scale) / (8.0 * arity as f64)).round().max(1.0) as usize
    }

    fn count(&self, n: f64) -> usize {
        (n * self.scale).round().max(1.0) as usize
    }

    /// Every cell of the grid with its generated data.
    pub fn cells(&self) -> Result<Vec<Cell>, BenchError> {
        self.validate()?;
        Ok(match self.experiment {
            Experiment::Scaling => self.scaling_cells(),
            Experiment::Multiplicity => self.multiplicity_cells(),
            Experiment::Bulkload => self.bulkload_cells(),
            Experiment::KeyWidth => self.keywidth_cells(),
            Experiment::SchemaWidth => self.schemawidth_cells(),
            Experiment::Sharing => self.sharing_cells(),
            Experiment::Buildup => self.buildup_cells(),
            Experiment::Workloads => self.workload_cells()?,
        })
    }

    fn rep(&self, (a, d): (AccessType, DataStructure), key: IndexKey) -> RepConfig {
        if a == AccessType::FS {
            RepConfig::full_scan()
        } else {
            RepConfig::indexed(a, d, key)
        }
    }

    fn join_cells(&self, params: &str, p: &Arc<Program>, facts: &Arc<Facts>, key: &IndexKey, outers: &[(&str, RepConfig)]) -> Vec<Cell> {
        let mut out = Vec::new();
        for (order, outer) in outers {
            for &g in &self.grid {
                let inner = self.rep(g, key.clone());
                let cfg = two_relation_config(p, outer.clone(), inner.clone());
                out.push(Cell {
                    params: format!("{params};outer={order}"),
                    config: format!("r={outer} s={inner}"),
                    work: CellWork::Program { program: p.clone(), facts: facts.clone(), config: Arc::new(cfg) },
                });
            }
        }
        out
    }

    fn ordered_outers(key: &IndexKey) -> Vec<(&'static str, RepConfig)> {
        vec![
            ("ordered", RepConfig::indexed(AccessType::CI, DataStructure::SA, key.clone())),
            ("unordered", RepConfig::full_scan()),
        ]
    }

    fn scaling_cells(&self) -> Vec<Cell> {
        let p = Arc::new(parse_program("out(y,z) :- r(x,y), s(x,z)").expect("static program"));
        let key = IndexKey::new(vec![0]).expect("key");
        let mut out = Vec::new();
        for s_mib in [10.0, 100.0, 1000.0] {
            let (r, s) = gen_probe_pair(
                (1.25 * MIB * self.scale) as usize,
                (s_mib * MIB * self.scale) as usize,
                2,
                self.seed,
            );
            let facts = Arc::new(facts2(r, s));
            out.extend(self.join_cells(&format!("s_mib={s_mib}"), &p, &facts, &key, &Self::ordered_outers(&key)));
        }
        out
    }

    fn multiplicity_cells(&self) -> Vec<Cell> {
        let p = Arc::new(parse_program("out(y,z) :- r(x,y), s(x,z)").expect("static program"));
        let key = IndexKey::new(vec![0]).expect("key");
        let ns = self.tuples(100.0, 2);
        let mut out = Vec::new();
        for m in [1usize, 10, 100] {
            let s = gen_dense_shuffled(ns, 2, m, self.seed);
            let r = gen_dense_shuffled(ns.div_ceil(m), 2, 1, self.seed + 1);
            let facts = Arc::new(facts2(r, s));
            out.extend(self.join_cells(&format!("multiplicity={m}"), &p, &facts, &key, &Self::ordered_outers(&key)));
        }
        out
    }

    fn bulkload_cells(&self) -> Vec<Cell> {
        let p = Arc::new(parse_program("out(y,z) :- r(x,y), s(x,z)").expect("static program"));
        let key = IndexKey::new(vec![0]).expect("key");
        let ns = self.tuples(1000.0, 2);
        let s = gen_dense_shuffled(ns, 2, 1, self.seed);
        let outers = vec![
            ("CI-SA", RepConfig::indexed(AccessType::CI, DataStructure::SA, key.clone())),
            ("RS", RepConfig::full_scan()),
            ("CI-HT", RepConfig::indexed(AccessType::CI, DataStructure::HT, key.clone())),
        ];
        let mut out = Vec::new();
        for r_mib in [10.0, 100.0, 1000.0] {
            let r = gen_dense_shuffled(self.tuples(r_mib, 2), 2, 1, self.seed + 1);
            let facts = Arc::new(facts2(r, s.clone()));
            out.extend(self.join_cells(&format!("r_mib={r_mib}"), &p, &facts, &key, &outers));
        }
        out
    }

    fn keywidth_cells(&self) -> Vec<Cell> {
        let n = self.count(1_000_000.0);
        let mut out = Vec::new();
        for w in [1usize, 3, 7, 15] {
            let r_args: Vec<String> = (0..16).map(|i| format!("a{i}")).collect();
            let s_args: Vec<String> = (0..16).map(|i| if i < w { format!("a{i}") } else { format!("b{i}") }).collect();
            let src = format!("out(a0,b15) :- r({}), s({})", r_args.join(","), s_args.join(","));
            let p = Arc::new(parse_program(&src).expect("generated program"));
            let (r, s) = gen_wide_pair(n, 16, w, self.seed);
            let mut f = Facts::new();
            f.insert("r", 16, r);
            f.insert("s", 16, s);
            let key = IndexKey::new((0..w).collect()).expect("key");
            out.extend(self.join_cells(&format!("key_width={w}"), &p, &Arc::new(f), &key, &Self::ordered_outers(&key)));
        }
        out
    }

    fn schemawidth_cells(&self) -> Vec<Cell> {
        let n = self.count(1_000_000.0);
        let key = IndexKey::new(vec![0]).expect("key");
        let mut out = Vec::new();
        for w in [2usize, 4, 8, 16] {
            let s_args: Vec<String> = (0..w).map(|i| if i == 0 { "x".into() } else { format!("z{i}") }).collect();
            let src = format!("out(y,z1) :- r(x,y), s({})", s_args.join(","));
            let p = Arc::new(parse_program(&src).expect("generated program"));
            let (r, s) = gen_schema_pair(n, w, self.seed);
            let mut f = Facts::new();
            f.insert("r", 2, r);
            f.insert("s", w, s);
            out.extend(self.join_cells(&format!("schema_width={w}"), &p, &Arc::new(f), &key, &Self::ordered_outers(&key)));
        }
        out
    }

    fn sharing_cells(&self) -> Vec<Cell> {
        let p = Arc::new(parse_program(include_str!("../../corpus/interweaving.dl")).expect("corpus program"));
        let n = self.count(1_000_000.0);
        let mut out = Vec::new();
        for m in [1usize, 2, 4] {
            let facts = Arc::new(gen_interweaving(n, m, self.seed));
            for ordered in [true, false] {
                for &(a, d) in self.grid.iter().filter(|g| g.0 != AccessType::FS) {
                    for reps in 1..=4 {
                        let cfg = interweaving_config(&p, reps, a, d, ordered);
                        out.push(Cell {
                            params: format!(
                                "multiplicity={m};outer={};reps={reps}",
                                if ordered { "ordered" } else { "unordered" }
                            ),
                            config: format!("{a},{reps}-{d}"),
                            work: CellWork::Program { program: p.clone(), facts: facts.clone(), config: Arc::new(cfg) },
                        });
                    }
                }
            }
        }
        out
    }

    fn buildup_cells(&self) -> Vec<Cell> {
        let n = self.count(6_500_000.0);
        let key = IndexKey::full(2);
        let mut out = Vec::new();
        for new_fraction in [1.0, 0.0] {
            for dup in [1usize, 100] {
                for ordered in [false, true] {
                    let (base, found) = gen_buildup_stream(n, n, new_fraction, dup, ordered, self.seed);
                    let (base, found) = (Arc::new(base), Arc::new(found));
                    for &s in &self.strategies {
                        for &g in &self.grid {
                            let rep = self.rep(g, key.clone());
                            out.push(Cell {
                                params: format!(
                                    "new={new_fraction};dup={dup};arrival={};strategy={s}",
                                    if ordered { "ordered" } else { "unordered" }
                                ),
                                config: rep.to_string(),
                                work: CellWork::Buildup { base: base.clone(), found: found.clone(), rep, strategy: s },
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn workload_cells(&self) -> Result<Vec<Cell>, BenchError> {
        let mut out = Vec::new();
        for w in Workload::ALL {
            let p = Arc::new(w.program());
            let facts = Arc::new(w.generate(self.scale * 100.0, self.seed));
            let params = format!("workload={w}");
            let mut push = |config: String, cfg: EvalConfig| {
                out.push(Cell {
                    params: params.clone(),
                    config,
                    work: CellWork::Program { program: p.clone(), facts: facts.clone(), config: Arc::new(cfg) },
                })
            };
            let sig = compute_signature(&p, &facts).map_err(|e| BenchError::Usage(format!("{w}: {e}")))?;
            match select_configuration(&sig, &SelectOptions::default()) {
                Ok(sel) => push("auto".into(), sel.to_eval_config()),
                Err(e) => return Err(BenchError::Usage(format!("{w}: selection failed: {e}"))),
            }
            push("baseline".into(), EvalConfig::baseline(&p));
            for &s in &self.strategies {
                for &(a, d) in &self.grid {
                    push(format!("uniform {a}-{d} {s}"), EvalConfig::uniform(&p, a, d, s));
                }
            }
        }
        Ok(out)
    }
}

fn facts2(r: Vec<u64>, s: Vec<u64>) -> Facts {
    let mut f = Facts::new();
    f.insert("r", 2, r);
    f.insert("s", 2, s);
    f
}

/// `r` outermost, `s` probed; the head gets a covered B+-tree.
fn two_relation_config(p: &Program, outer: RepConfig, inner: RepConfig) -> EvalConfig {
    let mut cfg = EvalConfig::default();
    let harity = p.decls["out"].arity;
    cfg.relations.insert("out".into(), vec![RepConfig::indexed(AccessType::CI, DataStructure::BP, IndexKey::full(harity))]);
    cfg.occurrences.insert(OccurrenceRef { rule: 0, atom: 0, side: Side::Base }, outer.key.clone());
    cfg.occurrences.insert(OccurrenceRef { rule: 0, atom: 1, side: Side::Base }, inner.key.clone());
    cfg.relations.insert("r".into(), vec![outer]);
    cfg.relations.insert("s".into(), vec![inner]);
    cfg
}

/// Table of shared keys for the interweaving program: with `reps`
/// representations of `s`, the key each rule probes through.
const INTERWEAVING_KEYS: [[&str; 4]; 4] = [
    ["0_1_2_3", "0_1_2_3", "0_1_2_3", "0_1_2_3"],
    ["0_1_2_3", "0_1_2_3", "2_0_1", "0_1_2_3"],
    ["0_1_2_3", "1_0", "2_0_1", "0_1_2_3"],
    ["0", "1_0", "2_0_1", "3_1_2_0"],
];

/// Configuration of the interweaving program with `reps` representations
/// of `s` (1..=4). Ordered outers iterate `r_i` through a sorted array on
/// the written attribute order, which matches the shared key its rule
/// probes only where that key starts with the same attributes.
pub fn interweaving_config(p: &Program, reps: usize, access: AccessType, ds: DataStructure, ordered: bool) -> EvalConfig {
    assert!((1..=4).contains(&reps));
    let keys = &INTERWEAVING_KEYS[reps - 1];
    let mut cfg = EvalConfig::default();
    let mut s_keys: Vec<IndexKey> = Vec::new();
    for (rule, k) in keys.iter().enumerate() {
        let key: IndexKey = k.parse().expect("static key");
        if !s_keys.contains(&key) {
            s_keys.push(key.clone());
        }
        cfg.occurrences.insert(OccurrenceRef { rule, atom: 1, side: Side::Base }, Some(key));
        let r = format!("r{}", rule + 1);
        let arity = p.decls[&r].arity;
        let outer = if ordered {
            RepConfig::indexed(AccessType::CI, DataStructure::SA, IndexKey::full(arity))
        } else {
            RepConfig::full_scan()
        };
        cfg.occurrences.insert(OccurrenceRef { rule, atom: 0, side: Side::Base }, outer.key.clone());
        cfg.relations.insert(r, vec![outer]);
        let q = format!("q{}", rule + 1);
        let qa = p.decls[&q].arity;
        cfg.relations.insert(q, vec![RepConfig::indexed(AccessType::CI, DataStructure::HT, IndexKey::full(qa))]);
    }
    cfg.relations.insert("s".into(), s_keys.into_iter().map(|k| RepConfig::indexed(access, ds, k)).collect());
    cfg
}

pub(crate) const BUILDUP_ARITY: usize = 2;

/// What one cell executes.
#[derive(Clone, Debug)]
pub enum CellWork {
    Program { program: Arc<Program>, facts: Arc<Facts>, config: Arc<EvalConfig> },
    /// One strategy pass of a found stream into a base relation.
    Buildup { base: Arc<Vec<u64>>, found: Arc<Vec<u64>>, rep: RepConfig, strategy: Strategy },
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub params: String,
    pub config: String,
    pub work: CellWork,
}

struct Sample {
    create: Duration,
    bulk_load: Duration,
    body_eval: Duration,
    merge: Duration,
    counters: RepCounters,
    detail: String,
    footprint: u64,
    store: u64,
    results: u64,
    iterations: u64,
}

fn run_once(work: &CellWork) -> Result<Sample, String> {
    match work {
        CellWork::Program { program, facts, config } => {
            let out = run_program(program, facts, config).map_err(|e| e.to_string())?;
            let results: u64 = program.idbs().map(|n| out.results.cardinality(n) as u64).sum();
            let store = out.footprints.iter().filter(|f| f.rep.is_none()).map(|f| f.bytes as u64).sum();
            Ok(Sample {
                create: out.timings.create,
                bulk_load: out.timings.bulk_load,
                body_eval: out.timings.body_eval,
                merge: out.timings.merge,
                counters: out.counters.grand_total(),
                detail: format!("{:?}", out.counters),
                footprint: out.total_footprint() as u64,
                store,
                results,
                iterations: out.counters.total_iterations(),
            })
        }
        CellWork::Buildup { base, found, rep, strategy } => {
            let t = Instant::now();
            let mut b = Relation::new(BUILDUP_ARITY, std::slice::from_ref(rep)).map_err(|e| e.to_string())?;
            let mut n = b.empty_like();
            let create = t.elapsed();
            let t = Instant::now();
            b.bulk_load(base).map_err(|e| e.to_string())?;
            let bulk_load = t.elapsed();
            let t = Instant::now();
            let counts = apply_strategy(*strategy, found, &mut b, &mut n).map_err(|e| e.to_string())?;
            let merge = t.elapsed();
            let mut total = counts.base;
            total.add(&counts.new);
            Ok(Sample {
                create,
                bulk_load,
                body_eval: Duration::ZERO,
                merge,
                counters: total,
                detail: format!("{counts:?}"),
                footprint: b.memory_footprint() as u64,
                store: b.store_footprint() as u64,
                results: b.len() as u64,
                iterations: 1,
            })
        }
    }
}

/// Runs a cell `repetitions` times after one untimed warm-up run.
/// Evaluation errors yield an error row; counters that differ between runs
/// are a hard failure.
pub fn run_cell(experiment: &str, cell: &Cell, repetitions: usize) -> Result<MetricsRow, BenchError> {
    let repetitions = repetitions.max(1);
    let warmup = 1;
    let mut samples: Vec<Sample> = Vec::with_capacity(repetitions + warmup);
    for _ in 0..repetitions + warmup {
        match run_once(&cell.work) {
            Ok(s) => samples.push(s),
            Err(e) => return Ok(MetricsRow::failed(experiment, &cell.params, &cell.config, e)),
        }
    }
    let first = &samples[0];
    if samples.iter().any(|s| s.detail != first.detail || s.results != first.results) {
        return Err(BenchError::Nondeterministic { cell: format!("{experiment} {} {}", cell.params, cell.config) });
    }
    let samples = &samples[warmup..];
    let first = &samples[0];
    let n = samples.len() as f64;
    let avg = |f: fn(&Sample) -> Duration| samples.iter().map(|s| f(s).as_secs_f64()).sum::<f64>() / n;
    let (create_s, bulk_load_s, body_eval_s, merge_s) =
        (avg(|s| s.create), avg(|s| s.bulk_load), avg(|s| s.body_eval), avg(|s| s.merge));
    Ok(MetricsRow {
        experiment: experiment.into(),
        params: cell.params.clone(),
        config: cell.config.clone(),
        repetitions: samples.len(),
        create_s,
        bulk_load_s,
        body_eval_s,
        merge_s,
        total_s: create_s + bulk_load_s + body_eval_s + merge_s,
        counters: first.counters,
        footprint_bytes: first.footprint,
        store_bytes: first.store,
        result_tuples: first.results,
        iterations: first.iterations,
        error: String::new(),
    }
    .rounded())
}

/// Runs one cell: experiment name, cell, repetitions.
pub type CellRunner<'a> = dyn FnMut(&str, &Cell, usize) -> Result<MetricsRow, BenchError> + 'a;

/// Executes every cell of `spec` in order, in this process.
pub fn run_benchmark(spec: &ExperimentSpec) -> Result<Vec<MetricsRow>, BenchError> {
    run_benchmark_with(spec, &mut run_cell)
}

/// Executes every cell of `spec` in order through `runner`, which may
/// hand each cell to a separate process.
pub fn run_benchmark_with(spec: &ExperimentSpec, runner: &mut CellRunner) -> Result<Vec<MetricsRow>, BenchError> {
    let name = spec.experiment.name();
    let mut rows = Vec::new();
    for cell in spec.cells()? {
        rows.push(runner(name, &cell, spec.repetitions)?);
    }
    Ok(rows)
}

/// Best (lowest total time) successful row per value of `param`.
pub fn best_by(rows: &[MetricsRow], param: &str) -> BTreeMap<String, MetricsRow> {
    let mut out: BTreeMap<String, MetricsRow> = BTreeMap::new();
    for r in rows.iter().filter(|r| !r.is_error()) {
        let k = r.param(param).unwrap_or("").to_string();
        match out.get(&k) {
            Some(b) if b.total_s <= r.total_s => {}
            _ => {
                out.insert(k, r.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(e: Experiment) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(e);
        s.scale = 0.0005;
        s.repetitions = 2;
        s
    }

    #[test]
    fn scaling_grid_counts_rows() {
        let mut s = tiny(Experiment::Scaling);
        s.scale = 0.0002;
        let rows = run_benchmark(&s).unwrap();
        assert_eq!(rows.len(), 3 * 2 * 13);
        assert!(rows.iter().all(|r| !r.is_error()), "{:?}", rows.iter().find(|r| r.is_error()));
        // Two join partners per outer tuple, whatever the representation.
        let r0 = &rows[0];
        assert!(rows.iter().filter(|r| r.param("s_mib") == r0.param("s_mib")).all(|r| r.result_tuples == r0.result_tuples));
    }

    #[test]
    fn sharing_hash_needs_exclusive_keys() {
        let mut s = tiny(Experiment::Sharing);
        s.grid = vec![(AccessType::CI, DataStructure::HT), (AccessType::UPI, DataStructure::SA)];
        let rows = run_benchmark(&s).unwrap();
        for r in &rows {
            let reps: usize = r.param("reps").unwrap().parse().unwrap();
            assert_eq!(r.is_error(), r.config.contains("HT") && reps < 4, "{r:?}");
        }
    }

    #[test]
    fn buildup_rows_agree_on_contents() {
        let s = tiny(Experiment::Buildup);
        let rows = run_benchmark(&s).unwrap();
        assert_eq!(rows.len(), 8 * 4 * 5);
        for r in &rows {
            let same: Vec<_> = rows.iter().filter(|o| o.params.split(";strategy").next() == r.params.split(";strategy").next()).collect();
            assert!(same.iter().all(|o| o.result_tuples == r.result_tuples));
        }
    }
}
