//! Rule compilation into left-deep index-nested-loop plans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{EvalConfig, OccurrenceRef, Side};
use super::EvalError;
use crate::frontend::{Program, Rule, Term};
use crate::storage::{DataStructure, IndexKey, RepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueSrc {
    Var(usize),
    Const(u64),
}

impl ValueSrc {
    #[inline]
    pub fn get(self, vars: &[u64]) -> u64 {
        match self {
            ValueSrc::Var(s) => vars[s],
            ValueSrc::Const(c) => c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelAccess {
    /// Full iteration of the representation.
    Iterate,
    /// Probe on the first `prefix_len` key attributes.
    Probe { prefix_len: usize },
    /// Filtered scan of the row store on `attrs`.
    Scan { attrs: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub atom: usize,
    pub relation: String,
    pub side: Side,
    pub rep: usize,
    pub key: Option<IndexKey>,
    pub access: LevelAccess,
    /// Probe values in key order, or scan values aligned with the scan
    /// attributes.
    pub values: Vec<ValueSrc>,
    /// Attributes bound by earlier levels or constants, ascending.
    pub bound: Vec<usize>,
    /// (attribute, variable slot) pairs this level binds.
    pub binds: Vec<(usize, usize)>,
    /// Equality filters applied after binding.
    pub checks: Vec<(usize, ValueSrc)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinPlan {
    pub rule: usize,
    /// Body atom reading the delta relation, for semi-naive variants.
    pub variant: Option<usize>,
    pub levels: Vec<Level>,
    pub head_relation: String,
    pub head: Vec<ValueSrc>,
    pub vars: Vec<String>,
}

pub(crate) fn variant_order(rule: &Rule, variant: Option<usize>, delta_outermost: bool) -> Vec<usize> {
    let n = rule.body.len();
    match variant {
        Some(d) if delta_outermost => std::iter::once(d).chain((0..n).filter(|&a| a != d)).collect(),
        _ => (0..n).collect(),
    }
}

/// Attributes of `order[pos]` bound by constants or by earlier atoms.
pub(crate) fn bound_attrs(rule: &Rule, order: &[usize], pos: usize) -> Vec<usize> {
    let earlier: Vec<&str> = order[..pos]
        .iter()
        .flat_map(|&a| rule.body[a].args.iter().filter_map(|t| t.var()))
        .collect();
    rule.body[order[pos]]
        .args
        .iter()
        .enumerate()
        .filter(|(_, t)| match t {
            Term::Const(_) => true,
            Term::Var(v) => earlier.contains(&v.as_str()),
        })
        .map(|(i, _)| i)
        .collect()
}

/// Representation list a side of a relation reads.
pub(crate) fn reps_for<'a>(cfg: &'a EvalConfig, relation: &str, side: Side) -> Option<&'a [RepConfig]> {
    match side {
        Side::Base => cfg.relations.get(relation).map(|v| v.as_slice()),
        Side::Delta => cfg.deltas.get(relation).map(|v| v.as_slice()),
    }
}

/// The representation `contains` goes to: first full-width key, else the first.
pub(crate) fn primary_of(reps: &[RepConfig], arity: usize) -> usize {
    reps.iter()
        .position(|r| r.key.as_ref().map(|k| k.len() == arity).unwrap_or(false))
        .unwrap_or(0)
}

fn resolve(
    reps: &[RepConfig],
    arity: usize,
    mapped: Option<&Option<IndexKey>>,
    bound: &[usize],
    rule: usize,
    atom: usize,
    relation: &str,
) -> Result<(usize, LevelAccess), EvalError> {
    let missing = || EvalError::MissingRepresentation { rule, atom, relation: relation.to_string() };
    let is_fs = |r: &RepConfig| r.ds == DataStructure::RS;
    let access_for = |i: usize| -> Result<LevelAccess, EvalError> {
        let r = &reps[i];
        if bound.is_empty() {
            return Ok(LevelAccess::Iterate);
        }
        let Some(k) = &r.key else {
            return Ok(LevelAccess::Scan { attrs: bound.to_vec() });
        };
        if !k.serves(bound) {
            return Err(EvalError::KeyMismatch {
                rule,
                atom,
                relation: relation.to_string(),
                key: k.to_string(),
                bound: bound.to_vec(),
            });
        }
        if r.ds == DataStructure::HT && k.len() != bound.len() {
            return Err(EvalError::PrefixProbeUnsupported { rule, atom, relation: relation.to_string(), key: k.clone() });
        }
        Ok(LevelAccess::Probe { prefix_len: bound.len() })
    };
    match mapped {
        Some(None) => {
            let i = reps.iter().position(is_fs).ok_or_else(missing)?;
            Ok((i, access_for(i)?))
        }
        Some(Some(k)) => {
            let i = reps
                .iter()
                .position(|r| r.key.as_ref() == Some(k))
                .ok_or_else(missing)?;
            Ok((i, access_for(i)?))
        }
        None => {
            if bound.is_empty() {
                let i = primary_of(reps, arity);
                return Ok((i, LevelAccess::Iterate));
            }
            let exact = reps.iter().position(|r| {
                r.key.as_ref().map(|k| k.len() == bound.len() && k.serves(bound)).unwrap_or(false)
            });
            let prefix = || {
                reps.iter().position(|r| {
                    r.ds != DataStructure::HT && r.key.as_ref().map(|k| k.serves(bound)).unwrap_or(false)
                })
            };
            let fs = || reps.iter().position(is_fs);
            let i = exact.or_else(prefix).or_else(fs).ok_or_else(missing)?;
            Ok((i, access_for(i)?))
        }
    }
}

/// Compiles rule `rule_idx` of `p`. With `variant = Some(a)`, body atom
/// `a` reads the delta relation and every other atom of a relation in
/// `recursive` reads the base relation.
pub fn plan_rule(p: &Program, rule_idx: usize, cfg: &EvalConfig, variant: Option<usize>) -> Result<JoinPlan, EvalError> {
    let rule = &p.rules[rule_idx];
    let order = variant_order(rule, variant, cfg.delta_outermost);
    let mut slots: BTreeMap<String, usize> = BTreeMap::new();
    let mut vars: Vec<String> = Vec::new();
    let mut levels = Vec::with_capacity(order.len());

    for (pos, &a) in order.iter().enumerate() {
        let atom = &rule.body[a];
        let side = if Some(a) == variant { Side::Delta } else { Side::Base };
        let arity = atom.arity();
        let reps = reps_for(cfg, &atom.relation, side).ok_or_else(|| EvalError::MissingRepresentation {
            rule: rule_idx,
            atom: a,
            relation: atom.relation.clone(),
        })?;
        let bound = bound_attrs(rule, &order, pos);
        let mapped = cfg.occurrences.get(&OccurrenceRef { rule: rule_idx, atom: a, side });
        let (rep, access) = resolve(reps, arity, mapped, &bound, rule_idx, a, &atom.relation)?;
        let key = reps[rep].key.clone();

        let src_of = |attr: usize, slots: &BTreeMap<String, usize>| match &atom.args[attr] {
            Term::Const(c) => ValueSrc::Const(*c),
            Term::Var(v) => ValueSrc::Var(slots[v]),
        };
        let values: Vec<ValueSrc> = match &access {
            LevelAccess::Iterate => Vec::new(),
            LevelAccess::Probe { prefix_len } => {
                let k = key.as_ref().expect("probe has a key");
                k.attrs()[..*prefix_len].iter().map(|&attr| src_of(attr, &slots)).collect()
            }
            LevelAccess::Scan { attrs } => attrs.iter().map(|&attr| src_of(attr, &slots)).collect(),
        };

        let mut binds = Vec::new();
        let mut checks = Vec::new();
        for (attr, t) in atom.args.iter().enumerate() {
            if bound.contains(&attr) {
                continue;
            }
            match t {
                Term::Var(v) => match slots.get(v) {
                    // Repeated within this atom.
                    Some(&s) => checks.push((attr, ValueSrc::Var(s))),
                    None => {
                        let s = vars.len();
                        vars.push(v.clone());
                        slots.insert(v.clone(), s);
                        binds.push((attr, s));
                    }
                },
                Term::Const(c) => checks.push((attr, ValueSrc::Const(*c))),
            }
        }
        levels.push(Level {
            atom: a,
            relation: atom.relation.clone(),
            side,
            rep,
            key,
            access,
            values,
            bound,
            binds,
            checks,
        });
    }

    let head = rule
        .head
        .args
        .iter()
        .map(|t| match t {
            Term::Const(c) => ValueSrc::Const(*c),
            Term::Var(v) => ValueSrc::Var(slots[v]),
        })
        .collect();
    Ok(JoinPlan { rule: rule_idx, variant, levels, head_relation: rule.head.relation.clone(), head, vars })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;
    use crate::storage::{AccessType, DataStructure};

    #[test]
    fn tc_recursive_variant() {
        let p = parse_program("path(x,y) :- edge(x,y)\npath(x,z) :- path(x,y), edge(y,z)").unwrap();
        let cfg = EvalConfig::baseline(&p);
        let plan = plan_rule(&p, 1, &cfg, Some(0)).unwrap();
        assert_eq!(plan.levels[0].access, LevelAccess::Iterate);
        assert_eq!(plan.levels[0].side, Side::Delta);
        assert_eq!(plan.levels[1].access, LevelAccess::Probe { prefix_len: 1 });
        assert_eq!(plan.levels[1].key.as_ref().unwrap().attrs(), &[0]);
    }

    #[test]
    fn three_way_join() {
        let p = parse_program("D(i,l) :- A(i,j), B(j,k), C(k,l)").unwrap();
        let cfg = EvalConfig::baseline(&p);
        let plan = plan_rule(&p, 0, &cfg, None).unwrap();
        assert_eq!(plan.levels.len(), 3);
        for l in &plan.levels[1..] {
            assert_eq!(l.key.as_ref().unwrap().attrs(), &[0]);
        }
    }

    #[test]
    fn hash_prefix_rejected() {
        let p = parse_program("o(x,z) :- a(x,y), b(y,z)").unwrap();
        let mut cfg = EvalConfig::uniform(&p, AccessType::CI, DataStructure::HT, Default::default());
        cfg.relations.insert("b".into(), vec![RepConfig::indexed(AccessType::CI, DataStructure::HT, IndexKey::full(2))]);
        assert!(matches!(plan_rule(&p, 0, &cfg, None), Err(EvalError::MissingRepresentation { .. })));
        cfg.occurrences.insert(OccurrenceRef { rule: 0, atom: 1, side: Side::Base }, Some(IndexKey::full(2)));
        assert!(matches!(plan_rule(&p, 0, &cfg, None), Err(EvalError::PrefixProbeUnsupported { .. })));
    }

    #[test]
    fn key_mismatch() {
        let p = parse_program("o(x,z) :- a(x,y), b(y,z)").unwrap();
        let mut cfg = EvalConfig::baseline(&p);
        cfg.relations.insert("b".into(), vec![RepConfig::indexed(AccessType::CI, DataStructure::BP, "1".parse().unwrap())]);
        cfg.occurrences.insert(OccurrenceRef { rule: 0, atom: 1, side: Side::Base }, Some("1".parse().unwrap()));
        assert!(matches!(plan_rule(&p, 0, &cfg, None), Err(EvalError::KeyMismatch { .. })));
    }
}
