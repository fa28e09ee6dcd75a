//! Profiling: alignment graphs with operation counts, condensed into a
//! workload signature.

mod alignment;
mod signature;

use thiserror::Error;

use crate::eval::{plan_rule, run_program_with, EvalConfig, EvalError, Facts, OpCounters, RunOptions, RunOutput};
use crate::frontend::{stratify, Program};

pub use alignment::{build_alignment_graph, AlignClass, AlignmentEdge, AlignmentGraph, AlignmentKeys, EdgeOp, NodeRef};
pub use signature::{chain_cover, compute_signature, min_shareable_keys, signature_from_counts, RelationSignature, WorkloadSignature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("rule {0} does not exist")]
    UnknownRule(usize),
    #[error("rule {rule}, atom {atom}: key {key} does not serve bound attributes {bound:?}")]
    KeyMismatch { rule: usize, atom: usize, key: String, bound: Vec<usize> },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("signature: {0}")]
    Format(String),
}

/// Every (rule, delta occurrence) pair the evaluator runs a plan for.
pub fn plan_variants(p: &Program) -> Vec<(usize, Option<usize>)> {
    let mut out = Vec::new();
    for s in stratify(p) {
        for &r in &s.seed_rules {
            out.push((r, None));
        }
        for &r in &s.recursive_rules {
            for (a, atom) in p.rules[r].body.iter().enumerate() {
                if s.relations.contains(&atom.relation) {
                    out.push((r, Some(a)));
                }
            }
        }
    }
    out
}

/// Alignment graphs of every plan variant under the keys `cfg` resolves to,
/// with counts attached from `counters`.
pub fn graphs_for(p: &Program, cfg: &EvalConfig, counters: &OpCounters) -> Result<Vec<AlignmentGraph>, ProfileError> {
    let mut out = Vec::new();
    for (rule, variant) in plan_variants(p) {
        let plan = plan_rule(p, rule, cfg, variant)?;
        let mut keys = AlignmentKeys::default();
        for l in &plan.levels {
            if let Some(k) = &l.key {
                keys.body.insert(l.atom, k.clone());
            }
        }
        let harity = p.rules[rule].head.arity();
        keys.head = cfg.relations.get(&plan.head_relation).and_then(|reps| {
            reps.iter().filter_map(|r| r.key.clone()).find(|k| k.len() == harity)
        });
        let mut g = build_alignment_graph(p, rule, variant, &keys, cfg.delta_outermost)?;
        g.attach_counts(counters);
        out.push(g);
    }
    Ok(out)
}

/// Result of a profiling run.
#[derive(Debug, Clone)]
pub struct Profile {
    pub output: RunOutput,
    pub graphs: Vec<AlignmentGraph>,
}

/// Runs `p` under the covered B+-tree baseline with order monitoring and
/// maps the counters onto alignment graphs.
pub fn profile_run(p: &Program, facts: &Facts) -> Result<Profile, ProfileError> {
    let cfg = EvalConfig::baseline(p);
    let output = run_program_with(p, facts, &cfg, &RunOptions { monitor_order: true })?;
    let graphs = graphs_for(p, &cfg, &output.counters)?;
    Ok(Profile { output, graphs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    #[test]
    fn tc_profile_edges() {
        let p = parse_program("path(x,y) :- edge(x,y)\npath(x,z) :- path(x,y), edge(y,z)").unwrap();
        let mut f = Facts::new();
        f.insert_tuples("edge", 2, &[[1, 2], [2, 3]]);
        let prof = profile_run(&p, &f).unwrap();
        let g = prof.graphs.iter().find(|g| g.rule == 1).unwrap();
        let probe = g.probe_edge(1).unwrap();
        assert_eq!((probe.calls, probe.returned), (3, 1));
        assert_eq!(probe.class, AlignClass::Never);
        assert_eq!(g.head_edge(NodeRef::HeadBase, EdgeOp::Contains).unwrap().calls, 1);
        assert_eq!(g.head_edge(NodeRef::HeadNew, EdgeOp::Append).unwrap().calls, 1);
    }

    #[test]
    fn no_rules_only_bulk_load() {
        let p = parse_program(".decl e/2").unwrap();
        let mut f = Facts::new();
        f.insert_tuples("e", 2, &[[1, 2]]);
        let prof = profile_run(&p, &f).unwrap();
        assert!(prof.graphs.is_empty());
        assert!(prof.output.counters.edges.is_empty());
        assert_eq!(prof.output.counters.rep("e", crate::eval::Role::Base, 0).bulk_load, 1);
    }
}
