//! Alignment graphs: which accesses of a rule plan can arrive in the key
//! order of the representation they hit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ProfileError;
use crate::eval::{EdgeKey, EdgeTarget, Op, OpCounters, Role, Side};
use crate::frontend::{Atom, Program, Term};
use crate::storage::IndexKey;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlignClass {
    Full,
    Partial,
    Never,
}

impl AlignClass {
    pub fn is_aligned(self) -> bool {
        self != AlignClass::Never
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    /// Input data feeding a bulk load.
    Source,
    Body { atom: usize, side: Side },
    HeadBase,
    HeadNew,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeOp {
    BulkLoad,
    Iterate,
    Probe,
    Contains,
    Append,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentEdge {
    pub from: NodeRef,
    pub to: NodeRef,
    pub op: EdgeOp,
    /// Variables of the accessed key in key order (probe prefix for probes,
    /// full key for head accesses).
    pub key_vars: Vec<String>,
    /// Key attributes the access binds; zero for iteration and loading.
    pub prefix: usize,
    pub class: AlignClass,
    pub calls: u64,
    pub returned: u64,
}

/// Index keys assumed for one plan variant: per body atom, and the full key
/// of the head relation's base and new representations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentKeys {
    pub body: BTreeMap<usize, IndexKey>,
    pub head: Option<IndexKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentGraph {
    pub rule: usize,
    pub variant: Option<usize>,
    /// Body atoms in loop order.
    pub order: Vec<usize>,
    /// Relation name of every body atom, by atom index.
    pub relations: Vec<String>,
    pub head_relation: String,
    pub keys: AlignmentKeys,
    pub edges: Vec<AlignmentEdge>,
}

fn vars_in(atom: &Atom, attrs: &[usize]) -> Vec<String> {
    attrs.iter().filter_map(|&a| atom.args[a].var().map(str::to_string)).collect()
}

fn classify(k: &[String], stream: &[String]) -> AlignClass {
    if k.is_empty() {
        return AlignClass::Full;
    }
    let lcp = k.iter().zip(stream).take_while(|(a, b)| a == b).count();
    if lcp == k.len() {
        AlignClass::Full
    } else if lcp > 0 {
        AlignClass::Partial
    } else {
        AlignClass::Never
    }
}

fn push_new(stream: &mut Vec<String>, vars: Vec<String>) {
    for v in vars {
        if !stream.contains(&v) {
            stream.push(v);
        }
    }
}

/// Attributes of `atom` bound before it runs: constants and variables of
/// earlier atoms.
fn bound_in(atom: &Atom, seen: &[String]) -> Vec<usize> {
    atom.args
        .iter()
        .enumerate()
        .filter(|(_, t)| match t {
            Term::Const(_) => true,
            Term::Var(v) => seen.contains(v),
        })
        .map(|(i, _)| i)
        .collect()
}

/// Builds the alignment graph of one plan variant of `rule` under `keys`.
/// Missing probe keys default to the ascending bound attributes; a missing
/// outer key means the relation's natural attribute order.
pub fn build_alignment_graph(
    p: &Program,
    rule: usize,
    variant: Option<usize>,
    keys: &AlignmentKeys,
    delta_outermost: bool,
) -> Result<AlignmentGraph, ProfileError> {
    let r = p.rules.get(rule).ok_or(ProfileError::UnknownRule(rule))?;
    let n = r.body.len();
    let order: Vec<usize> = match variant {
        Some(d) if delta_outermost => std::iter::once(d).chain((0..n).filter(|&a| a != d)).collect(),
        _ => (0..n).collect(),
    };
    let side = |a: usize| if Some(a) == variant { Side::Delta } else { Side::Base };
    let mut keys = keys.clone();
    let mut edges = Vec::new();
    let mut stream: Vec<String> = Vec::new();
    let mut prev: Option<NodeRef> = None;

    for (pos, &a) in order.iter().enumerate() {
        let atom = &r.body[a];
        let arity = atom.arity();
        let node = NodeRef::Body { atom: a, side: side(a) };
        let bound = bound_in(atom, &stream);
        let key = match keys.body.get(&a) {
            Some(k) => {
                k.validate_for(arity).map_err(|_| ProfileError::KeyMismatch {
                    rule,
                    atom: a,
                    key: k.to_string(),
                    bound: bound.clone(),
                })?;
                k.clone()
            }
            None if bound.is_empty() => IndexKey::full(arity),
            None => IndexKey::new(bound.clone()).expect("distinct attributes"),
        };
        if pos == 0 && bound.is_empty() {
            edges.push(AlignmentEdge {
                from: NodeRef::Source,
                to: node,
                op: EdgeOp::BulkLoad,
                key_vars: Vec::new(),
                prefix: 0,
                class: AlignClass::Never,
                calls: 0,
                returned: 0,
            });
            edges.push(AlignmentEdge {
                from: node,
                to: node,
                op: EdgeOp::Iterate,
                key_vars: Vec::new(),
                prefix: 0,
                class: AlignClass::Full,
                calls: 0,
                returned: 0,
            });
        } else {
            if !key.serves(&bound) {
                return Err(ProfileError::KeyMismatch { rule, atom: a, key: key.to_string(), bound });
            }
            let k = vars_in(atom, &key.attrs()[..bound.len()]);
            let class = classify(&k, &stream);
            edges.push(AlignmentEdge {
                from: prev.unwrap_or(NodeRef::Source),
                to: node,
                op: EdgeOp::Probe,
                key_vars: k,
                prefix: bound.len(),
                class,
                calls: 0,
                returned: 0,
            });
        }
        push_new(&mut stream, vars_in(atom, &key.sort_order(arity)));
        keys.body.insert(a, key);
        prev = Some(node);
    }

    let harity = r.head.arity();
    let head_key = keys.head.clone().unwrap_or_else(|| IndexKey::full(harity));
    let hk = vars_in(&r.head, &head_key.sort_order(harity));
    let hclass = classify(&hk, &stream);
    let from = order.first().map(|&a| NodeRef::Body { atom: a, side: side(a) }).unwrap_or(NodeRef::Source);
    for (to, op) in [
        (NodeRef::HeadBase, EdgeOp::Contains),
        (NodeRef::HeadNew, EdgeOp::Contains),
        (NodeRef::HeadNew, EdgeOp::Append),
        (NodeRef::HeadBase, EdgeOp::Append),
    ] {
        edges.push(AlignmentEdge { from, to, op, key_vars: hk.clone(), prefix: harity, class: hclass, calls: 0, returned: 0 });
    }
    keys.head = Some(head_key);
    Ok(AlignmentGraph {
        rule,
        variant,
        order,
        relations: r.body.iter().map(|a| a.relation.clone()).collect(),
        head_relation: r.head.relation.clone(),
        keys,
        edges,
    })
}

impl AlignmentGraph {
    pub fn edge_key(&self, e: &AlignmentEdge) -> Option<EdgeKey> {
        let (target, op) = match (e.to, e.op) {
            (NodeRef::Body { atom, .. }, EdgeOp::Iterate) => (EdgeTarget::Body(atom), Op::Iterate),
            (NodeRef::Body { atom, .. }, EdgeOp::Probe) => (EdgeTarget::Body(atom), Op::Probe),
            (NodeRef::HeadBase, EdgeOp::Contains) => (EdgeTarget::HeadBase, Op::Contains),
            (NodeRef::HeadBase, EdgeOp::Append) => (EdgeTarget::HeadBase, Op::Append),
            (NodeRef::HeadNew, EdgeOp::Contains) => (EdgeTarget::HeadNew, Op::Contains),
            (NodeRef::HeadNew, EdgeOp::Append) => (EdgeTarget::HeadNew, Op::Append),
            _ => return None,
        };
        Some(EdgeKey { rule: self.rule, variant: self.variant, target, op })
    }

    /// Fills edge counts from an evaluation's counters. Bulk-load edges take
    /// the tuple count loaded into the outer relation.
    pub fn attach_counts(&mut self, c: &OpCounters) {
        let rule_rel = self.relations.clone();
        for i in 0..self.edges.len() {
            let e = &self.edges[i];
            if e.op == EdgeOp::BulkLoad {
                if let NodeRef::Body { atom, side } = e.to {
                    let role = match side {
                        Side::Base => Role::Base,
                        Side::Delta => Role::Delta,
                    };
                    let n = c
                        .reps
                        .iter()
                        .filter(|((r, ro, _), _)| *r == rule_rel[atom] && *ro == role)
                        .map(|(_, v)| v.bulk_load)
                        .max()
                        .unwrap_or(0);
                    self.edges[i].calls = n;
                }
                continue;
            }
            if let Some(k) = self.edge_key(e) {
                let ec = c.edge(&k);
                self.edges[i].calls = ec.calls;
                self.edges[i].returned = ec.returned;
            }
        }
    }

    /// Copies counts from a graph of the same rule variant; counts are
    /// logical and do not depend on the assumed keys.
    pub fn copy_counts(&mut self, other: &AlignmentGraph) {
        for e in &mut self.edges {
            if let Some(o) = other.edges.iter().find(|o| o.to == e.to && o.op == e.op) {
                e.calls = o.calls;
                e.returned = o.returned;
            }
        }
    }

    /// Edges on the alignment path from the outer relation: probe edges
    /// count while every earlier probe edge was aligned; head edges hang
    /// off the outer stream directly. Only aligned edges are returned.
    pub fn aligned_path(&self) -> Vec<&AlignmentEdge> {
        let mut out = Vec::new();
        let mut connected = true;
        for e in &self.edges {
            match e.op {
                EdgeOp::Probe => {
                    if connected && e.class.is_aligned() {
                        out.push(e);
                    } else {
                        connected = false;
                    }
                }
                EdgeOp::Contains | EdgeOp::Append => {
                    if e.class.is_aligned() {
                        out.push(e);
                    }
                }
                EdgeOp::BulkLoad | EdgeOp::Iterate => {}
            }
        }
        out
    }

    /// Operations performed along the aligned path.
    pub fn path_ops(&self) -> u64 {
        self.aligned_path().iter().map(|e| e.calls).sum()
    }

    pub fn probe_edge(&self, atom: usize) -> Option<&AlignmentEdge> {
        self.edges.iter().find(|e| e.op == EdgeOp::Probe && matches!(e.to, NodeRef::Body { atom: a, .. } if a == atom))
    }

    pub fn head_edge(&self, to: NodeRef, op: EdgeOp) -> Option<&AlignmentEdge> {
        self.edges.iter().find(|e| e.to == to && e.op == op)
    }

    pub fn outer(&self) -> Option<usize> {
        self.order.first().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_program;

    fn key(s: &str) -> IndexKey {
        s.parse().unwrap()
    }

    #[test]
    fn load_rule_classes() {
        let p = parse_program(
            "points_to(y,w) :- load(y,x), points_to(x,z), points_to(z,w)\npoints_to(y,x) :- address_of(y,x)",
        )
        .unwrap();
        let keys = AlignmentKeys {
            body: [(0, key("1")), (1, key("0")), (2, key("0"))].into_iter().collect(),
            head: Some(key("0_1")),
        };
        let g = build_alignment_graph(&p, 0, Some(1), &keys, false).unwrap();
        assert_eq!(g.probe_edge(1).unwrap().class, AlignClass::Full);
        assert_eq!(g.probe_edge(2).unwrap().class, AlignClass::Never);
        assert_eq!(g.head_edge(NodeRef::HeadBase, EdgeOp::Contains).unwrap().class, AlignClass::Never);

        let keys0 = AlignmentKeys { body: [(0, key("0"))].into_iter().collect(), head: Some(key("0_1")) };
        let g0 = build_alignment_graph(&p, 0, Some(1), &keys0, false).unwrap();
        assert_eq!(g0.probe_edge(1).unwrap().class, AlignClass::Never);
        assert_eq!(g0.head_edge(NodeRef::HeadNew, EdgeOp::Append).unwrap().class, AlignClass::Partial);
    }

    #[test]
    fn reachability_full() {
        let p = parse_program("Reachable(y) :- Reachable(x), Edges(x,y)").unwrap();
        let keys = AlignmentKeys { body: [(0, key("0")), (1, key("0"))].into_iter().collect(), head: None };
        let g = build_alignment_graph(&p, 0, Some(0), &keys, false).unwrap();
        assert_eq!(g.probe_edge(1).unwrap().class, AlignClass::Full);
    }

    #[test]
    fn single_atom_graph() {
        let p = parse_program("a(x) :- b(x)").unwrap();
        let g = build_alignment_graph(&p, 0, None, &AlignmentKeys::default(), false).unwrap();
        assert!(g.edges.iter().all(|e| e.op != EdgeOp::Probe));
        assert_eq!(g.edges.iter().filter(|e| e.op == EdgeOp::Iterate).count(), 1);
    }

    #[test]
    fn key_mismatch() {
        let p = parse_program("o(x,z) :- a(x,y), b(y,z)").unwrap();
        let keys = AlignmentKeys { body: [(1, key("1"))].into_iter().collect(), head: None };
        assert!(matches!(build_alignment_graph(&p, 0, None, &keys, false), Err(ProfileError::KeyMismatch { .. })));
    }
}
