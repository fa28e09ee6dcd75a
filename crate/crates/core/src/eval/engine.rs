//! Plan interpreter and semi-naive driver.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::config::{EvalConfig, Side};
use super::counters::{EdgeCount, EdgeKey, EdgeTarget, Op, OpCounters, RepCounters, RepId, Role};
use super::plan::{plan_rule, JoinPlan, LevelAccess};
use super::{EvalError, Facts, ResultSet, Strategy};
use crate::frontend::{stratify, Program, RelKind};
use crate::storage::{RepConfig, Relation};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Count key-order descents at every probe and head edge.
    pub monitor_order: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Creating the base relations' representations.
    pub create: Duration,
    /// Bulk loading the input facts.
    pub bulk_load: Duration,
    /// Rule body evaluation, summed over all plans and iterations.
    pub body_eval: Duration,
    /// Strategy streams, epilogues, delta seeding and rebranding.
    pub merge: Duration,
}

impl Timings {
    pub fn total(&self) -> Duration {
        self.create + self.bulk_load + self.body_eval + self.merge
    }
}

/// Bytes held by one representation of a final base relation; `rep` is
/// `None` for the shared row store.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FootprintRow {
    pub relation: String,
    pub rep: Option<usize>,
    pub config: String,
    pub bytes: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub results: ResultSet,
    pub counters: OpCounters,
    pub timings: Timings,
    pub footprints: Vec<FootprintRow>,
}

impl RunOutput {
    pub fn total_footprint(&self) -> usize {
        self.footprints.iter().map(|f| f.bytes).sum()
    }
}

/// Logical operation counts of one strategy application, as seen by the
/// primary representations of base and new.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyCounts {
    pub base: RepCounters,
    pub new: RepCounters,
}

#[derive(Default)]
struct Stats {
    reps: Vec<RepCounters>,
    rep_ids: Vec<RepId>,
    rep_index: HashMap<RepId, usize>,
    edges: Vec<EdgeCount>,
    edge_ids: Vec<EdgeKey>,
    edge_index: HashMap<EdgeKey, usize>,
}

impl Stats {
    fn rep_slot(&mut self, relation: &str, role: Role, rep: usize) -> usize {
        let id = (relation.to_string(), role, rep);
        if let Some(&s) = self.rep_index.get(&id) {
            return s;
        }
        self.reps.push(RepCounters::default());
        self.rep_ids.push(id.clone());
        self.rep_index.insert(id, self.reps.len() - 1);
        self.reps.len() - 1
    }

    fn edge_slot(&mut self, key: EdgeKey) -> usize {
        if let Some(&s) = self.edge_index.get(&key) {
            return s;
        }
        self.edges.push(EdgeCount::default());
        self.edge_ids.push(key);
        self.edge_index.insert(key, self.edges.len() - 1);
        self.edges.len() - 1
    }

    fn finish(self, iterations: Vec<u64>) -> OpCounters {
        OpCounters {
            reps: self.rep_ids.into_iter().zip(self.reps).collect(),
            edges: self.edge_ids.into_iter().zip(self.edges).collect(),
            iterations,
        }
    }
}

/// A relation instance with the counter slots of its representations.
struct Inst {
    rel: Relation,
    slots: Vec<usize>,
}

impl Inst {
    fn new(name: &str, role: Role, arity: usize, configs: &[RepConfig], st: &mut Stats) -> Result<Self, EvalError> {
        let rel = Relation::new(arity, configs)?;
        let slots = (0..configs.len()).map(|i| st.rep_slot(name, role, i)).collect();
        Ok(Inst { rel, slots })
    }

    fn contains(&self, t: &[u64], st: &mut Stats) -> bool {
        st.reps[self.slots[self.rel.primary()]].contains += 1;
        self.rel.contains(t)
    }

    fn append(&mut self, t: &[u64], st: &mut Stats) -> Result<(), EvalError> {
        for &s in &self.slots {
            st.reps[s].append += 1;
        }
        Ok(self.rel.append(t)?)
    }

    fn remove(&mut self, t: &[u64], st: &mut Stats) {
        for &s in &self.slots {
            st.reps[s].remove += 1;
        }
        self.rel.remove(t);
    }

    fn bulk_load(&mut self, flat: &[u64], st: &mut Stats) -> Result<(), EvalError> {
        let n = (flat.len() / self.rel.arity()) as u64;
        for &s in &self.slots {
            st.reps[s].bulk_load += n;
        }
        Ok(self.rel.bulk_load(flat)?)
    }

    /// All tuples through the primary representation, counted as one
    /// iterate call.
    fn contents(&self, st: &mut Stats) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.rel.len() * self.rel.arity());
        let mut n = 0u64;
        for t in self.rel.iter() {
            out.extend_from_slice(t);
            n += 1;
        }
        let c = &mut st.reps[self.slots[self.rel.primary()]];
        c.iter_calls += 1;
        c.iter_returned += n;
        out
    }
}

/// Edge slots for the head operations of one plan variant.
#[derive(Clone, Copy)]
struct HeadEdges {
    base_contains: usize,
    new_contains: usize,
    base_append: usize,
    new_append: usize,
}

impl HeadEdges {
    fn register(rule: usize, variant: Option<usize>, st: &mut Stats) -> Self {
        let mut e = |target, op| st.edge_slot(EdgeKey { rule, variant, target, op });
        HeadEdges {
            base_contains: e(EdgeTarget::HeadBase, Op::Contains),
            new_contains: e(EdgeTarget::HeadNew, Op::Contains),
            base_append: e(EdgeTarget::HeadBase, Op::Append),
            new_append: e(EdgeTarget::HeadNew, Op::Append),
        }
    }
}

/// Key-order monitor for the head edges of one stream.
struct HeadMonitor {
    order: Vec<usize>,
    last: [Option<Vec<u64>>; 2],
    buf: Vec<u64>,
}

impl HeadMonitor {
    fn new(base: &Relation) -> Self {
        let order = base
            .representation(base.primary())
            .and_then(|r| r.key().map(|k| k.sort_order(base.arity())))
            .unwrap_or_else(|| (0..base.arity()).collect());
        HeadMonitor { order, last: [None, None], buf: Vec::new() }
    }

    fn observe(&mut self, which: usize, slot: usize, t: &[u64], st: &mut Stats) {
        self.buf.clear();
        self.buf.extend(self.order.iter().map(|&a| t[a]));
        if let Some(l) = &self.last[which] {
            if self.buf.as_slice() < l.as_slice() {
                st.edges[slot].descents += 1;
            }
        }
        match &mut self.last[which] {
            Some(l) => {
                l.clear();
                l.extend_from_slice(&self.buf);
            }
            none => *none = Some(self.buf.clone()),
        }
    }
}

fn hit(st: &mut Stats, slot: Option<usize>, found: bool) {
    if let Some(s) = slot {
        st.edges[s].calls += 1;
        st.edges[s].returned += found as u64;
    }
}

fn count_append(st: &mut Stats, slot: Option<usize>) {
    if let Some(s) = slot {
        st.edges[s].calls += 1;
    }
}

/// Streams found facts (flat) through strategy `s`.
fn stream(
    s: Strategy,
    found: &[u64],
    base: &mut Inst,
    new: &mut Inst,
    edges: Option<HeadEdges>,
    monitor: bool,
    st: &mut Stats,
) -> Result<(), EvalError> {
    let arity = base.rel.arity();
    let mut mon = (monitor && edges.is_some()).then(|| HeadMonitor::new(&base.rel));
    let e = |f: fn(&HeadEdges) -> usize| edges.as_ref().map(f);
    for t in found.chunks_exact(arity) {
        let mut base_contains = |base: &Inst, st: &mut Stats| {
            let r = base.contains(t, st);
            hit(st, e(|h| h.base_contains), r);
            if let (Some(m), Some(h)) = (mon.as_mut(), edges) {
                m.observe(0, h.base_contains, t, st);
            }
            r
        };
        let new_contains = |new: &Inst, st: &mut Stats| {
            let r = new.contains(t, st);
            hit(st, e(|h| h.new_contains), r);
            r
        };
        match s {
            Strategy::S1 => {
                if !base_contains(base, st) && !new_contains(new, st) {
                    new.append(t, st)?;
                    count_append(st, e(|h| h.new_append));
                }
            }
            Strategy::S2 => {
                if !new_contains(new, st) && !base_contains(base, st) {
                    new.append(t, st)?;
                    count_append(st, e(|h| h.new_append));
                }
            }
            Strategy::S3 => {
                if !base_contains(base, st) {
                    base.append(t, st)?;
                    count_append(st, e(|h| h.base_append));
                    new.append(t, st)?;
                    count_append(st, e(|h| h.new_append));
                }
            }
            Strategy::S4 => {
                if !new_contains(new, st) {
                    new.append(t, st)?;
                    count_append(st, e(|h| h.new_append));
                }
            }
        }
    }
    Ok(())
}

/// Closes an iteration: afterwards base holds base₀ ∪ new and new holds
/// only tuples absent from base₀.
fn epilogue(s: Strategy, base: &mut Inst, new: &mut Inst, st: &mut Stats) -> Result<(), EvalError> {
    match s {
        Strategy::S1 | Strategy::S2 => {
            new.rel.finished_append();
            merge(base, new, st)?;
        }
        Strategy::S3 => {
            base.rel.finished_append();
            new.rel.finished_append();
        }
        Strategy::S4 => {
            new.rel.finished_append();
            let old = base.contents(st);
            let arity = base.rel.arity();
            let mut gone = Vec::new();
            for t in old.chunks_exact(arity) {
                if new.contains(t, st) {
                    gone.extend_from_slice(t);
                }
            }
            for t in gone.chunks_exact(arity) {
                new.remove(t, st);
            }
            merge(base, new, st)?;
        }
    }
    Ok(())
}

fn merge(base: &mut Inst, new: &Inst, st: &mut Stats) -> Result<(), EvalError> {
    if new.rel.is_empty() {
        return Ok(());
    }
    let flat = new.contents(st);
    base.bulk_load(&flat, st)
}

/// Applies strategy `s` to a found stream and runs its epilogue. The
/// final contents of `base` and `new` are the same for every strategy;
/// the returned counts differ.
pub fn apply_strategy(
    s: Strategy,
    found: &[u64],
    base: &mut Relation,
    new: &mut Relation,
) -> Result<StrategyCounts, EvalError> {
    let mut st = Stats::default();
    let bslots = (0..base.rep_count()).map(|i| st.rep_slot("", Role::Base, i)).collect();
    let nslots = (0..new.rep_count()).map(|i| st.rep_slot("", Role::New, i)).collect();
    let mut b = Inst { rel: std::mem::replace(base, base.empty_like()), slots: bslots };
    let mut n = Inst { rel: std::mem::replace(new, new.empty_like()), slots: nslots };
    let res = stream(s, found, &mut b, &mut n, None, false, &mut st).and_then(|_| epilogue(s, &mut b, &mut n, &mut st));
    let counts = StrategyCounts { base: st.reps[b.slots[b.rel.primary()]], new: st.reps[n.slots[n.rel.primary()]] };
    *base = b.rel;
    *new = n.rel;
    res.map(|_| counts)
}

/// Per-level runtime bindings of a plan.
struct LevelRt {
    slot: usize,
    edge: usize,
}

struct Compiled {
    plan: JoinPlan,
    levels: Vec<LevelRt>,
    head: HeadEdges,
}

fn compile(p: &Program, cfg: &EvalConfig, rule: usize, variant: Option<usize>, st: &mut Stats) -> Result<Compiled, EvalError> {
    let plan = plan_rule(p, rule, cfg, variant)?;
    let levels = plan
        .levels
        .iter()
        .map(|l| {
            let role = match l.side {
                Side::Base => Role::Base,
                Side::Delta => Role::Delta,
            };
            let op = match l.access {
                LevelAccess::Iterate => Op::Iterate,
                _ => Op::Probe,
            };
            LevelRt {
                slot: st.rep_slot(&l.relation, role, l.rep),
                edge: st.edge_slot(EdgeKey { rule, variant, target: EdgeTarget::Body(l.atom), op }),
            }
        })
        .collect();
    let head = HeadEdges::register(rule, variant, st);
    Ok(Compiled { plan, levels, head })
}

struct Exec<'a> {
    c: &'a Compiled,
    rels: Vec<&'a Relation>,
    vars: Vec<u64>,
    probe: Vec<Vec<u64>>,
    last: Vec<Option<Vec<u64>>>,
    monitor: bool,
    out: Vec<u64>,
}

impl Exec<'_> {
    fn run(&mut self, li: usize, st: &mut Stats) -> Result<(), EvalError> {
        let c = self.c;
        if li == c.plan.levels.len() {
            let vars = &self.vars;
            self.out.extend(c.plan.head.iter().map(|h| h.get(vars)));
            return Ok(());
        }
        let lvl = &c.plan.levels[li];
        let rt = &c.levels[li];
        let rel = self.rels[li];
        let mut vals = std::mem::take(&mut self.probe[li]);
        vals.clear();
        vals.extend(lvl.values.iter().map(|v| v.get(&self.vars)));
        if self.monitor && !matches!(lvl.access, LevelAccess::Iterate) {
            if let Some(l) = &self.last[li] {
                if vals < *l {
                    st.edges[rt.edge].descents += 1;
                }
            }
            self.last[li] = Some(vals.clone());
        }
        let it = match &lvl.access {
            LevelAccess::Iterate => {
                st.reps[rt.slot].iter_calls += 1;
                rel.iter_rep(lvl.rep)
            }
            LevelAccess::Probe { .. } => {
                st.reps[rt.slot].probe_calls += 1;
                rel.probe(lvl.rep, &vals)?
            }
            LevelAccess::Scan { attrs } => {
                st.reps[rt.slot].probe_calls += 1;
                rel.scan_filter(attrs, &vals)
            }
        };
        st.edges[rt.edge].calls += 1;
        let mut returned = 0u64;
        let mut res = Ok(());
        for t in it {
            returned += 1;
            for &(attr, slot) in &lvl.binds {
                self.vars[slot] = t[attr];
            }
            if !lvl.checks.iter().all(|&(attr, src)| t[attr] == src.get(&self.vars)) {
                continue;
            }
            res = self.run(li + 1, st);
            if res.is_err() {
                break;
            }
        }
        match lvl.access {
            LevelAccess::Iterate => st.reps[rt.slot].iter_returned += returned,
            _ => st.reps[rt.slot].probe_returned += returned,
        }
        st.edges[rt.edge].returned += returned;
        self.probe[li] = vals;
        res
    }
}

fn lookup<'a>(
    c: &Compiled,
    base: &'a BTreeMap<String, Inst>,
    delta: &'a BTreeMap<String, Inst>,
) -> Vec<&'a Relation> {
    c.plan
        .levels
        .iter()
        .map(|l| match l.side {
            Side::Base => &base[&l.relation].rel,
            Side::Delta => &delta[&l.relation].rel,
        })
        .collect()
}

fn execute(
    c: &Compiled,
    base: &BTreeMap<String, Inst>,
    delta: &BTreeMap<String, Inst>,
    monitor: bool,
    st: &mut Stats,
) -> Result<Vec<u64>, EvalError> {
    let n = c.plan.levels.len();
    let mut ex = Exec {
        c,
        rels: lookup(c, base, delta),
        vars: vec![0; c.plan.vars.len()],
        probe: vec![Vec::new(); n],
        last: vec![None; n],
        monitor,
        out: Vec::new(),
    };
    ex.run(0, st)?;
    Ok(ex.out)
}

fn dedup_flat(flat: &[u64], arity: usize) -> Vec<u64> {
    let mut rows: Vec<&[u64]> = flat.chunks_exact(arity).collect();
    rows.sort_unstable();
    rows.dedup();
    rows.concat()
}

/// Inserts non-recursive facts into `base`: contains, then append.
fn insert_direct(found: &[u64], base: &mut Inst, edges: HeadEdges, monitor: bool, st: &mut Stats) -> Result<(), EvalError> {
    let mut mon = monitor.then(|| HeadMonitor::new(&base.rel));
    for t in found.chunks_exact(base.rel.arity()) {
        let r = base.contains(t, st);
        hit(st, Some(edges.base_contains), r);
        if let Some(m) = mon.as_mut() {
            m.observe(0, edges.base_contains, t, st);
        }
        if !r {
            base.append(t, st)?;
            count_append(st, Some(edges.base_append));
        }
    }
    Ok(())
}

pub fn run_program(p: &Program, facts: &Facts, cfg: &EvalConfig) -> Result<RunOutput, EvalError> {
    run_program_with(p, facts, cfg, &RunOptions::default())
}

pub fn run_program_with(p: &Program, facts: &Facts, cfg: &EvalConfig, opts: &RunOptions) -> Result<RunOutput, EvalError> {
    cfg.validate(p)?;
    let mut st = Stats::default();
    let mut timings = Timings::default();
    let strata = stratify(p);

    // Plans first, so configuration errors surface before any loading.
    let mut plans: Vec<(Vec<Compiled>, Vec<Compiled>)> = Vec::with_capacity(strata.len());
    for s in &strata {
        let mut seeds = Vec::new();
        for &ri in &s.seed_rules {
            seeds.push(compile(p, cfg, ri, None, &mut st)?);
        }
        let mut rec = Vec::new();
        for &ri in &s.recursive_rules {
            let rule = &p.rules[ri];
            for (a, atom) in rule.body.iter().enumerate() {
                if s.relations.contains(&atom.relation) {
                    rec.push(compile(p, cfg, ri, Some(a), &mut st)?);
                }
            }
        }
        plans.push((seeds, rec));
    }

    let mut base: BTreeMap<String, Inst> = BTreeMap::new();
    for (name, decl) in &p.decls {
        let configs = cfg
            .relations
            .get(name)
            .ok_or_else(|| EvalError::InvalidConfig(format!("no representation for relation {name}")))?;
        let t = Instant::now();
        let mut inst = Inst::new(name, Role::Base, decl.arity, configs, &mut st)?;
        timings.create += t.elapsed();
        match (facts.get(name), decl.kind) {
            (Some(f), _) => {
                if f.arity != decl.arity {
                    return Err(EvalError::ArityMismatch { relation: name.clone(), expected: decl.arity, got: f.arity });
                }
                let data = if decl.kind == RelKind::Idb { dedup_flat(&f.data, f.arity) } else { f.data.clone() };
                let t = Instant::now();
                inst.bulk_load(&data, &mut st)?;
                timings.bulk_load += t.elapsed();
            }
            (None, RelKind::Edb) => return Err(EvalError::MissingFacts(name.clone())),
            (None, RelKind::Idb) => {}
        }
        base.insert(name.clone(), inst);
    }

    let mut iterations = Vec::with_capacity(strata.len());
    for (s, (seeds, rec)) in strata.iter().zip(&plans) {
        let empty = BTreeMap::new();
        for c in seeds {
            let t = Instant::now();
            let found = execute(c, &base, &empty, opts.monitor_order, &mut st)?;
            timings.body_eval += t.elapsed();
            let t = Instant::now();
            let head = base.get_mut(&c.plan.head_relation).expect("head relation exists");
            insert_direct(&found, head, c.head, opts.monitor_order, &mut st)?;
            timings.merge += t.elapsed();
        }
        let t = Instant::now();
        for name in &s.relations {
            base.get_mut(name).expect("stratum relation").rel.finished_append();
        }
        timings.merge += t.elapsed();
        if !s.is_recursive() {
            iterations.push(1);
            continue;
        }

        let t = Instant::now();
        let mut delta: BTreeMap<String, Inst> = BTreeMap::new();
        let mut new: BTreeMap<String, Inst> = BTreeMap::new();
        for name in &s.relations {
            let configs = cfg
                .deltas
                .get(name)
                .ok_or_else(|| EvalError::InvalidConfig(format!("no delta representation for relation {name}")))?;
            let arity = p.decls[name].arity;
            let mut d = Inst::new(name, Role::Delta, arity, configs, &mut st)?;
            let n = Inst::new(name, Role::New, arity, configs, &mut st)?;
            let seed = base[name].contents(&mut st);
            d.bulk_load(&dedup_flat(&seed, arity), &mut st)?;
            delta.insert(name.clone(), d);
            new.insert(name.clone(), n);
        }
        timings.merge += t.elapsed();

        let mut iters = 1u64;
        while delta.values().any(|d| !d.rel.is_empty()) {
            iters += 1;
            for c in rec {
                let t = Instant::now();
                let found = execute(c, &base, &delta, opts.monitor_order, &mut st)?;
                timings.body_eval += t.elapsed();
                let t = Instant::now();
                let h = &c.plan.head_relation;
                let b = base.get_mut(h).expect("head relation exists");
                let n = new.get_mut(h).expect("new relation exists");
                stream(cfg.strategy, &found, b, n, Some(c.head), opts.monitor_order, &mut st)?;
                timings.merge += t.elapsed();
            }
            let t = Instant::now();
            for name in &s.relations {
                let b = base.get_mut(name).expect("stratum relation");
                let n = new.get_mut(name).expect("new relation exists");
                epilogue(cfg.strategy, b, n, &mut st)?;
                // Rebrand: new becomes the next delta and keeps the delta counters.
                let d = delta.get_mut(name).expect("delta relation exists");
                let fresh = n.rel.empty_like();
                d.rel = std::mem::replace(&mut n.rel, fresh);
            }
            timings.merge += t.elapsed();
        }
        iterations.push(iters);
    }

    let mut results = ResultSet::default();
    for name in p.idbs() {
        let inst = &base[name];
        let rows: Vec<Vec<u64>> = inst.rel.iter().map(|t| t.to_vec()).collect();
        ResultSet::from_flat(name, rows, &mut results);
    }
    let mut footprints = Vec::new();
    for (name, inst) in &base {
        for (i, c) in inst.rel.configs().enumerate() {
            footprints.push(FootprintRow {
                relation: name.clone(),
                rep: Some(i),
                config: c.to_string(),
                bytes: inst.rel.rep_footprint(i),
            });
        }
        let store = inst.rel.store_footprint();
        if store > 0 {
            footprints.push(FootprintRow { relation: name.clone(), rep: None, config: "store".into(), bytes: store });
        }
    }
    Ok(RunOutput { results, counters: st.finish(iterations), timings, footprints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::storage::{AccessType, DataStructure};

    fn tc() -> Program {
        parse_program("path(x,y) :- edge(x,y)\npath(x,z) :- path(x,y), edge(y,z)").unwrap()
    }

    #[test]
    fn tc_chain_counts() {
        let p = tc();
        let mut f = Facts::new();
        f.insert_tuples("edge", 2, &[[1, 2], [2, 3]]);
        let out = run_program(&p, &f, &EvalConfig::baseline(&p)).unwrap();
        assert_eq!(out.results.get("path").unwrap(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(out.counters.iterations, vec![3]);
        let probe = out.counters.edge_total(1, EdgeTarget::Body(1), Op::Probe);
        assert_eq!((probe.calls, probe.returned), (3, 1));
        assert_eq!(out.counters.edge_total(1, EdgeTarget::HeadBase, Op::Contains).calls, 1);
        assert_eq!(out.counters.edge_total(1, EdgeTarget::HeadNew, Op::Contains).calls, 1);
        assert_eq!(out.counters.edge_total(1, EdgeTarget::HeadNew, Op::Append).calls, 1);
    }

    #[test]
    fn strategy_example() {
        let found = [1u64, 2, 2];
        for s in Strategy::ALL {
            let cfgs = [RepConfig::indexed(AccessType::CI, DataStructure::BP, crate::storage::IndexKey::full(1))];
            let mut base = Relation::new(1, &cfgs).unwrap();
            base.bulk_load(&[1]).unwrap();
            let mut new = Relation::new(1, &cfgs).unwrap();
            let c = apply_strategy(s, &found, &mut base, &mut new).unwrap();
            let b: Vec<_> = base.iter().map(|t| t[0]).collect();
            let n: Vec<_> = new.iter().map(|t| t[0]).collect();
            assert_eq!((b, n), (vec![1, 2], vec![2]), "{s}");
            if s == Strategy::S1 {
                assert_eq!((c.base.contains, c.new.contains, c.new.append), (3, 2, 1));
            }
        }
    }

    #[test]
    fn empty_seed_single_iteration() {
        let p = tc();
        let mut f = Facts::new();
        f.insert("edge", 2, vec![]);
        let out = run_program(&p, &f, &EvalConfig::baseline(&p)).unwrap();
        assert_eq!(out.counters.iterations, vec![1]);
        assert_eq!(out.results.cardinality("path"), 0);
    }

    #[test]
    fn missing_facts() {
        let p = tc();
        assert_eq!(run_program(&p, &Facts::new(), &EvalConfig::baseline(&p)).unwrap_err(), EvalError::MissingFacts("edge".into()));
    }
}
