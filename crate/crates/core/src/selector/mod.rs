//! Configuration selection from a workload signature.

mod keys;
mod policy;
mod trees;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{plan_rule, EvalConfig, EvalError, OccurrenceRef, Side, Strategy};
use crate::profiler::{plan_variants, AlignClass, EdgeOp, NodeRef, ProfileError, WorkloadSignature};
use crate::storage::{IndexKey, RepConfig};

pub use keys::{compute_index_keys, derive_keys, KeyChoice, KeyPlan};
pub use policy::{uki_worthwhile, Policy};

use trees::{collect_uses, map_use, select_access, select_sharing, select_structures, TreeInput};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelectError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("selected configuration does not evaluate: {0}")]
    Invalid(#[from] EvalError),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    /// Memory budget in bytes; when the estimated footprint of one index
    /// per distinct key exceeds it, the trees prefer compact choices.
    pub space_budget: Option<u64>,
    pub policy: Policy,
}

/// A selected configuration with the reasoning behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub relations: BTreeMap<String, Vec<RepConfig>>,
    pub deltas: BTreeMap<String, Vec<RepConfig>>,
    pub occurrences: BTreeMap<OccurrenceRef, Option<IndexKey>>,
    pub strategy: Strategy,
    pub delta_outermost: bool,
    pub key_choices: Vec<KeyChoice>,
    pub trace: Vec<String>,
}

impl SelectionResult {
    pub fn to_eval_config(&self) -> EvalConfig {
        EvalConfig {
            relations: self.relations.clone(),
            deltas: self.deltas.clone(),
            occurrences: self.occurrences.clone(),
            strategy: self.strategy,
            delta_outermost: self.delta_outermost,
        }
    }

    /// Human-readable summary: chosen representations followed by the
    /// decision trace.
    pub fn explain(&self) -> String {
        let mut s = String::new();
        for (name, reps) in &self.relations {
            let r: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
            s.push_str(&format!("{name}: {}\n", r.join(" ")));
        }
        for (name, reps) in &self.deltas {
            let r: Vec<String> = reps.iter().map(|r| r.to_string()).collect();
            s.push_str(&format!("{name} delta/new: {}\n", r.join(" ")));
        }
        s.push_str(&format!("strategy: {}\n", self.strategy));
        for t in &self.trace {
            s.push_str("  ");
            s.push_str(t);
            s.push('\n');
        }
        s
    }
}

fn estimate_bytes(sig: &WorkloadSignature, policy: &Policy) -> u64 {
    sig.relations
        .values()
        .map(|r| {
            r.cardinality
                .max(r.init)
                .saturating_mul(policy.bytes_per_attribute)
                .saturating_mul(r.arity as u64)
                .saturating_mul(r.distinct_keys.max(1) as u64)
        })
        .fold(0, u64::saturating_add)
}

fn choose_strategy(plan: &KeyPlan, policy: &Policy, trace: &mut Vec<String>) -> Strategy {
    let (mut new_contains, mut new_append, mut base_never, mut base_aligned) = (0u64, 0u64, 0u64, 0u64);
    let mut recursive = false;
    for g in plan.graphs.iter().filter(|g| g.variant.is_some()) {
        recursive = true;
        for e in &g.edges {
            match (e.to, e.op) {
                (NodeRef::HeadNew, EdgeOp::Contains) => new_contains += e.calls,
                (NodeRef::HeadNew, EdgeOp::Append) => new_append += e.calls,
                (NodeRef::HeadBase, EdgeOp::Contains) if e.class == AlignClass::Never => base_never += e.calls,
                (NodeRef::HeadBase, EdgeOp::Contains) => base_aligned += e.calls,
                _ => {}
            }
        }
    }
    if !recursive {
        trace.push("strategy: no recursion -> S1".into());
        return Strategy::S1;
    }
    let base_contains = base_never + base_aligned;
    let dup = if new_append == 0 { 0.0 } else { new_contains as f64 / new_append as f64 };
    let fresh = if base_contains == 0 { 0.0 } else { new_append as f64 / base_contains as f64 };
    let s = if dup > policy.s2_duplicate_ratio {
        Strategy::S2
    } else if fresh > policy.s3_new_ratio && base_never > base_aligned {
        Strategy::S3
    } else {
        Strategy::S1
    };
    trace.push(format!(
        "strategy: new contains/append={dup:.2} new append/base contains={fresh:.2} unaligned base contains={base_never}/{base_contains} -> {s}"
    ));
    s
}

/// Chooses index keys, representations, occurrence mappings and a
/// deduplication strategy for the workload in `sig`.
pub fn select_configuration(sig: &WorkloadSignature, opts: &SelectOptions) -> Result<SelectionResult, SelectError> {
    let mut trace = Vec::new();
    let plan = compute_index_keys(sig, &mut trace)?;
    let uses = collect_uses(sig, &plan);

    let budget_binding = match opts.space_budget {
        Some(b) => {
            let est = estimate_bytes(sig, &opts.policy);
            trace.push(format!("budget: estimated {est} bytes against {b}"));
            est > b
        }
        None => false,
    };
    let recursive = sig.relations.values().any(|r| r.recursive);
    let query_ops: u64 = plan
        .graphs
        .iter()
        .flat_map(|g| &g.edges)
        .filter(|e| e.op != EdgeOp::BulkLoad)
        .map(|e| e.calls)
        .sum();
    let init: u64 = sig.relations.values().map(|r| r.init).sum();
    let init_dominated = !recursive && query_ops < init;
    if init_dominated {
        trace.push(format!("init: {init} loaded tuples outweigh {query_ops} query operations"));
    }

    let t = TreeInput { sig, plan: &plan, uses: &uses, policy: &opts.policy, budget_binding, init_dominated };
    let ds = select_structures(&t, &mut trace);
    let acc = select_access(&t, &mut trace);
    let chosen = select_sharing(&t, &ds, &acc, &plan.head_keys, &mut trace);

    let mut relations = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    let mut occurrences = BTreeMap::new();
    for ((rel, side), reps) in &chosen {
        for u in &uses[&(rel.clone(), *side)] {
            if let Some(o) = u.occ {
                occurrences.insert(o, map_use(u, reps));
            }
        }
        let cfgs: Vec<RepConfig> = reps.iter().map(|c| c.config.clone()).collect();
        match side {
            Side::Base => relations.insert(rel.clone(), cfgs),
            Side::Delta => deltas.insert(rel.clone(), cfgs),
        };
    }
    let strategy = choose_strategy(&plan, &opts.policy, &mut trace);
    let out = SelectionResult {
        relations,
        deltas,
        occurrences,
        strategy,
        delta_outermost: sig.delta_outermost,
        key_choices: plan.choices,
        trace,
    };
    let cfg = out.to_eval_config();
    cfg.validate(&sig.program)?;
    for (rule, variant) in plan_variants(&sig.program) {
        plan_rule(&sig.program, rule, &cfg, variant)?;
    }
    Ok(out)
}
