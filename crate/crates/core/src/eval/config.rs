use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::plan::{bound_attrs, variant_order};
use super::{EvalError, Strategy};
use crate::frontend::{stratify, Program};
use crate::storage::{AccessType, DataStructure, IndexKey, RepConfig};

/// Which instance of a relation an occurrence reads: the full (base)
/// relation or the previous iteration's delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Base,
    Delta,
}

/// A body occurrence: rule index, atom index within the body, and side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccurrenceRef {
    pub rule: usize,
    pub atom: usize,
    pub side: Side,
}

/// Physical configuration of one evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Representations of every EDB relation and of every IDB base relation.
    pub relations: BTreeMap<String, Vec<RepConfig>>,
    /// Representations of the delta and new relations of recursive IDBs
    /// (both use the same list, so new can be rebranded as delta).
    pub deltas: BTreeMap<String, Vec<RepConfig>>,
    /// Index key of the representation an occurrence reads; `None` selects
    /// a full-scan representation. Unmapped occurrences are resolved to a
    /// representation whose key serves their bound attributes.
    pub occurrences: BTreeMap<OccurrenceRef, Option<IndexKey>>,
    pub strategy: Strategy,
    /// Move the delta occurrence to the outermost loop instead of keeping
    /// the written body order.
    pub delta_outermost: bool,
}

/// Bound-attribute sets (ascending) required per relation and side by the
/// plans of `p`, plus whether the relation needs `contains`.
pub(crate) fn required_keys(p: &Program, delta_outermost: bool) -> BTreeMap<(String, Side), BTreeSet<Vec<usize>>> {
    let mut out: BTreeMap<(String, Side), BTreeSet<Vec<usize>>> = BTreeMap::new();
    for name in p.decls.keys() {
        out.entry((name.clone(), Side::Base)).or_default();
    }
    let strata = stratify(p);
    for s in &strata {
        let recursive = s.is_recursive();
        for name in &s.relations {
            let arity = p.decls[name].arity;
            out.entry((name.clone(), Side::Base)).or_default().insert((0..arity).collect());
            if recursive {
                out.entry((name.clone(), Side::Delta)).or_default().insert((0..arity).collect());
            }
        }
        for &ri in s.seed_rules.iter().chain(&s.recursive_rules) {
            let rule = &p.rules[ri];
            let recursive_atoms: Vec<usize> = if s.recursive_rules.contains(&ri) {
                (0..rule.body.len()).filter(|&a| s.relations.contains(&rule.body[a].relation)).collect()
            } else {
                Vec::new()
            };
            let variants: Vec<Option<usize>> =
                if recursive_atoms.is_empty() { vec![None] } else { recursive_atoms.iter().map(|&a| Some(a)).collect() };
            for v in variants {
                let order = variant_order(rule, v, delta_outermost);
                for (pos, &a) in order.iter().enumerate() {
                    let bound = bound_attrs(rule, &order, pos);
                    let side = if Some(a) == v { Side::Delta } else { Side::Base };
                    let entry = out.entry((rule.body[a].relation.clone(), side)).or_default();
                    if !bound.is_empty() {
                        entry.insert(bound);
                    }
                }
            }
        }
    }
    out
}

impl EvalConfig {
    /// One representation of the given access type and structure per
    /// required key; full-scan configs get a single row store per relation.
    pub fn uniform(p: &Program, access: AccessType, ds: DataStructure, strategy: Strategy) -> Self {
        let mut cfg = EvalConfig { strategy, ..Default::default() };
        for ((name, side), keys) in required_keys(p, false) {
            let arity = p.decls[&name].arity;
            let reps: Vec<RepConfig> = if access == AccessType::FS {
                vec![RepConfig::full_scan()]
            } else {
                let mut keys = keys;
                if keys.is_empty() {
                    keys.insert((0..arity).collect());
                }
                keys.into_iter()
                    .map(|k| RepConfig::indexed(access, ds, IndexKey::new(k).expect("non-empty distinct")))
                    .collect()
            };
            match side {
                Side::Base => cfg.relations.insert(name, reps),
                Side::Delta => cfg.deltas.insert(name, reps),
            };
        }
        cfg
    }

    /// The profiling baseline: covered B+-trees on ascending keys.
    pub fn baseline(p: &Program) -> Self {
        EvalConfig::uniform(p, AccessType::CI, DataStructure::BP, Strategy::S1)
    }

    pub fn validate(&self, p: &Program) -> Result<(), EvalError> {
        for (name, reps) in self.relations.iter().chain(self.deltas.iter()) {
            let arity = p
                .arity(name)
                .ok_or_else(|| EvalError::InvalidConfig(format!("unknown relation {name}")))?;
            if reps.is_empty() {
                return Err(EvalError::InvalidConfig(format!("relation {name} has no representation")));
            }
            for r in reps {
                r.validate(arity)?;
            }
        }
        for o in self.occurrences.keys() {
            let rule = p
                .rules
                .get(o.rule)
                .ok_or_else(|| EvalError::InvalidConfig(format!("mapping for unknown rule {}", o.rule)))?;
            if o.atom >= rule.body.len() {
                return Err(EvalError::InvalidConfig(format!("mapping for unknown occurrence {}.{}", o.rule, o.atom)));
            }
        }
        Ok(())
    }
}
