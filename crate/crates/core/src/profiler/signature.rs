use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{graphs_for, plan_variants, profile_run, AlignmentGraph, EdgeOp, NodeRef, ProfileError};
use crate::eval::{EvalConfig, Facts, OpCounters, Role, Side};
use crate::frontend::{parse_program, stratify, Program, RelKind};
use crate::storage::IndexKey;

/// Upper bound on any count in a signature.
pub const MAX_COUNT: u64 = 1 << 40;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationSignature {
    pub arity: usize,
    pub kind: RelKind,
    /// Member of a recursive stratum.
    pub recursive: bool,
    /// Tuples at the end of evaluation.
    pub cardinality: u64,
    /// Tuples bulk-loaded into the base relation.
    pub init: u64,
    /// Width of the widest key the program needs on the base relation.
    pub widest_key: usize,
    pub distinct_keys: usize,
    pub shareable_keys: usize,
    pub keys: Vec<IndexKey>,
    /// Average tuples returned per probe into the base relation.
    pub multiplicity: f64,
}

/// A program's workload description: its rule plans as alignment graphs
/// with operation counts, plus per-relation width and key statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSignature {
    pub program: Program,
    pub delta_outermost: bool,
    pub graphs: Vec<AlignmentGraph>,
    pub relations: BTreeMap<String, RelationSignature>,
    pub iterations: Vec<u64>,
}

/// Partitions `keys` into the fewest chains under attribute-set inclusion
/// (equal sets chain in list order). Each chain is listed from its
/// narrowest key up; one key built along a chain serves all of its members.
pub fn chain_cover(keys: &[IndexKey]) -> Vec<Vec<usize>> {
    let sets: Vec<BTreeSet<usize>> = keys.iter().map(|k| k.attrs().iter().copied().collect()).collect();
    let n = sets.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| i != j && sets[i].is_subset(&sets[j]) && (sets[i].len() < sets[j].len() || i < j))
                .collect()
        })
        .collect();
    // Minimum path cover of the inclusion order via bipartite matching.
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none() || augment(owner[v].expect("checked"), adj, seen, owner) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        augment(u, &adj, &mut seen, &mut owner);
    }
    let mut next: Vec<Option<usize>> = vec![None; n];
    for (v, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            next[*u] = Some(v);
        }
    }
    let mut chains = Vec::new();
    for start in (0..n).filter(|&v| owner[v].is_none()) {
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(v) = next[cur] {
            chain.push(v);
            cur = v;
        }
        chains.push(chain);
    }
    chains
}

/// Smallest number of keys that serve every attribute set when one key can
/// serve all sets forming a chain under inclusion.
pub fn min_shareable_keys(keys: &[IndexKey]) -> usize {
    chain_cover(keys).len()
}

impl WorkloadSignature {
    /// Condenses graphs and relation sizes. `sizes` holds final
    /// cardinalities; relations without an entry count as empty.
    pub fn assemble(
        p: &Program,
        graphs: Vec<AlignmentGraph>,
        sizes: &BTreeMap<String, u64>,
        init: &BTreeMap<String, u64>,
        iterations: Vec<u64>,
        delta_outermost: bool,
    ) -> Self {
        let recursive: BTreeSet<String> =
            stratify(p).into_iter().filter(|s| s.is_recursive()).flat_map(|s| s.relations).collect();
        let mut keys: BTreeMap<&str, BTreeSet<IndexKey>> = BTreeMap::new();
        let mut probes: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
        for g in &graphs {
            for e in &g.edges {
                match (e.to, e.op) {
                    (NodeRef::Body { atom, side: Side::Base }, EdgeOp::Probe) => {
                        let rel = g.relations[atom].as_str();
                        let k = &g.keys.body[&atom];
                        if let Ok(k) = IndexKey::new(k.attrs()[..e.prefix].to_vec()) {
                            keys.entry(rel).or_default().insert(k);
                        }
                        let pr = probes.entry(rel).or_default();
                        pr.0 += e.calls;
                        pr.1 += e.returned;
                    }
                    (NodeRef::HeadBase, EdgeOp::Contains) => {
                        if let Some(k) = &g.keys.head {
                            keys.entry(g.head_relation.as_str()).or_default().insert(k.clone());
                        }
                    }
                    _ => {}
                }
            }
        }
        let mut relations = BTreeMap::new();
        for (name, decl) in &p.decls {
            let ks: Vec<IndexKey> = keys.get(name.as_str()).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            let (calls, returned) = probes.get(name.as_str()).copied().unwrap_or((0, 0));
            relations.insert(
                name.clone(),
                RelationSignature {
                    arity: decl.arity,
                    kind: decl.kind,
                    recursive: recursive.contains(name),
                    cardinality: sizes.get(name).copied().unwrap_or(0),
                    init: init.get(name).copied().unwrap_or(0),
                    widest_key: ks.iter().map(|k| k.len()).max().unwrap_or(0),
                    distinct_keys: ks.len(),
                    shareable_keys: min_shareable_keys(&ks),
                    keys: ks,
                    multiplicity: if calls == 0 { 0.0 } else { returned as f64 / calls as f64 },
                },
            );
        }
        WorkloadSignature { program: p.clone(), delta_outermost, graphs, relations, iterations }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("signature serializes")
    }

    /// Parses a stored signature and checks that it is consistent with its
    /// own program.
    pub fn from_json(s: &str) -> Result<Self, ProfileError> {
        let sig: WorkloadSignature = serde_json::from_str(s).map_err(|e| ProfileError::Format(e.to_string()))?;
        sig.check()?;
        Ok(sig)
    }

    /// Rejects what a run could not have produced: mismatched shapes and
    /// counts beyond `MAX_COUNT`.
    pub fn check(&self) -> Result<(), ProfileError> {
        let bad = |m: String| Err(ProfileError::Format(m));
        let p = &self.program;
        match parse_program(&p.to_string()) {
            Ok(q) if q == *p => {}
            Ok(_) => return bad("program does not survive a round trip".into()),
            Err(e) => return bad(format!("program: {e}")),
        }
        let variants: BTreeSet<(usize, Option<usize>)> = plan_variants(p).into_iter().collect();
        for g in &self.graphs {
            let at = format!("graph of rule {} variant {:?}", g.rule, g.variant);
            if !variants.contains(&(g.rule, g.variant)) {
                return bad(format!("{at}: no such plan variant"));
            }
            let rule = &p.rules[g.rule];
            let n = rule.body.len();
            let mut order = g.order.clone();
            order.sort_unstable();
            if order != (0..n).collect::<Vec<_>>() {
                return bad(format!("{at}: order is not a permutation of the body"));
            }
            if g.relations.len() != n || g.relations.iter().zip(&rule.body).any(|(r, a)| *r != a.relation) {
                return bad(format!("{at}: body relations differ from the rule"));
            }
            if g.head_relation != rule.head.relation {
                return bad(format!("{at}: head relation differs from the rule"));
            }
            for (&atom, key) in &g.keys.body {
                if atom >= n || key.validate_for(rule.body[atom].arity()).is_err() {
                    return bad(format!("{at}: key {key} does not fit atom {atom}"));
                }
            }
            if let Some(k) = &g.keys.head {
                if k.len() != rule.head.arity() || k.validate_for(rule.head.arity()).is_err() {
                    return bad(format!("{at}: head key {k} does not cover the head"));
                }
            }
            for e in &g.edges {
                for node in [e.from, e.to] {
                    if let NodeRef::Body { atom, .. } = node {
                        if atom >= n {
                            return bad(format!("{at}: edge names atom {atom}"));
                        }
                    }
                }
                if e.calls > MAX_COUNT || e.returned > MAX_COUNT {
                    return bad(format!("{at}: edge count out of range"));
                }
                if matches!(e.op, EdgeOp::Iterate | EdgeOp::Probe) {
                    match e.to {
                        NodeRef::Body { atom, .. } if g.keys.body.contains_key(&atom) => {}
                        _ => return bad(format!("{at}: {:?} edge without a keyed body atom", e.op)),
                    }
                }
            }
        }
        if self.iterations.iter().any(|&i| i > MAX_COUNT) {
            return bad("iteration count out of range".into());
        }
        if !self.relations.keys().eq(p.decls.keys()) {
            return bad("relation signatures do not match the declarations".into());
        }
        for (name, r) in &self.relations {
            let Some(d) = p.decls.get(name) else {
                return bad(format!("relation {name} is not declared"));
            };
            if r.arity != d.arity || r.kind != d.kind {
                return bad(format!("relation {name} disagrees with its declaration"));
            }
            if let Some(k) = r.keys.iter().find(|k| k.validate_for(r.arity).is_err()) {
                return bad(format!("relation {name}: key {k} exceeds arity {}", r.arity));
            }
            if r.cardinality > MAX_COUNT || r.init > MAX_COUNT {
                return bad(format!("relation {name}: counts out of range"));
            }
            let ks: Vec<IndexKey> = r.keys.iter().cloned().collect();
            if r.widest_key != ks.iter().map(|k| k.len()).max().unwrap_or(0)
                || r.distinct_keys != ks.len()
                || r.shareable_keys != min_shareable_keys(&ks)
            {
                return bad(format!("relation {name}: key summary disagrees with its keys"));
            }
            if !r.multiplicity.is_finite() || r.multiplicity < 0.0 {
                return bad(format!("relation {name}: multiplicity {}", r.multiplicity));
            }
        }
        Ok(())
    }

    pub fn graphs_of(&self, rule: usize) -> impl Iterator<Item = &AlignmentGraph> {
        self.graphs.iter().filter(move |g| g.rule == rule)
    }
}

/// Builds a signature from counters recorded (or written by hand) for the
/// covered B+-tree baseline. `sizes` and `init` hold final cardinalities and
/// bulk-loaded tuples per relation.
pub fn signature_from_counts(
    p: &Program,
    counters: &OpCounters,
    sizes: &BTreeMap<String, u64>,
    init: &BTreeMap<String, u64>,
) -> Result<WorkloadSignature, ProfileError> {
    let graphs = graphs_for(p, &EvalConfig::baseline(p), counters)?;
    Ok(WorkloadSignature::assemble(p, graphs, sizes, init, counters.iterations.clone(), false))
}

/// Profiles `p` on `facts` and condenses the run into a signature.
pub fn compute_signature(p: &Program, facts: &Facts) -> Result<WorkloadSignature, ProfileError> {
    let prof = profile_run(p, facts)?;
    let mut sizes = BTreeMap::new();
    let mut init = BTreeMap::new();
    for name in p.decls.keys() {
        let card = match prof.output.results.get(name) {
            Some(rows) => rows.len() as u64,
            None => facts.get(name).map(|f| f.len() as u64).unwrap_or(0),
        };
        sizes.insert(name.clone(), card);
        let loaded = prof
            .output
            .counters
            .reps
            .iter()
            .filter(|((r, role, _), _)| r == name && *role == Role::Base)
            .map(|(_, c)| c.bulk_load)
            .max()
            .unwrap_or(0);
        init.insert(name.clone(), loaded);
    }
    Ok(WorkloadSignature::assemble(
        p,
        prof.graphs,
        &sizes,
        &init,
        prof.output.counters.iterations.clone(),
        false,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn k(s: &str) -> IndexKey {
        s.parse().unwrap()
    }

    #[test]
    fn shareable_chains() {
        assert_eq!(min_shareable_keys(&[k("0"), k("0_1")]), 1);
        assert_eq!(min_shareable_keys(&[k("0"), k("1_0"), k("2_0_1"), k("3_1_2_0")]), 1);
        assert_eq!(min_shareable_keys(&[k("0"), k("1")]), 2);
        assert_eq!(min_shareable_keys(&[k("0"), k("1"), k("0_1")]), 2);
        assert_eq!(min_shareable_keys(&[]), 0);
        assert_eq!(min_shareable_keys(&[k("0_1"), k("1_0")]), 1);
        assert_eq!(chain_cover(&[k("0_1"), k("0"), k("2")]), vec![vec![1, 0], vec![2]]);
    }

    #[test]
    fn json_roundtrip() {
        let p = parse_program("o(x,z) :- a(x,y), b(y,z)").unwrap();
        let mut f = Facts::new();
        f.insert_tuples("a", 2, &[[1, 2]]);
        f.insert_tuples("b", 2, &[[2, 3], [2, 4]]);
        let sig = compute_signature(&p, &f).unwrap();
        let b = &sig.relations["b"];
        assert_eq!((b.distinct_keys, b.shareable_keys, b.widest_key), (1, 1, 1));
        assert_eq!(b.multiplicity, 2.0);
        let back = WorkloadSignature::from_json(&sig.to_json()).unwrap();
        assert_eq!(back, sig);
    }
}
