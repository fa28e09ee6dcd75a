//! Index-key selection along alignment paths.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eval::Side;
use crate::frontend::{Atom, Program, Term};
use crate::profiler::{
    build_alignment_graph, AlignClass, AlignmentGraph, AlignmentKeys, EdgeOp, NodeRef, ProfileError, WorkloadSignature,
};
use crate::storage::IndexKey;

/// The outer-key decision of one rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyChoice {
    pub rule: usize,
    pub outer_atom: usize,
    pub relation: String,
    /// (attribute, operations on the aligned path) per candidate.
    pub candidates: Vec<(usize, u64)>,
    pub chosen: IndexKey,
}

/// Graphs rebuilt under the selected keys, with the profiled counts.
#[derive(Clone, Debug)]
pub struct KeyPlan {
    pub graphs: Vec<AlignmentGraph>,
    pub choices: Vec<KeyChoice>,
    /// Full key of every IDB relation, used for contains.
    pub head_keys: BTreeMap<String, IndexKey>,
}

fn var_pos(stream: &[String], t: &Term) -> usize {
    match t {
        Term::Const(_) => 0,
        Term::Var(v) => stream.iter().position(|s| s == v).map(|i| i + 1).unwrap_or(usize::MAX),
    }
}

/// `attrs` ordered so that constants come first and variables follow the
/// stream order; this keeps a key aligned with the stream for as long as
/// the stream allows.
fn order_by_stream(atom: &Atom, attrs: &[usize], stream: &[String]) -> Vec<usize> {
    let mut a = attrs.to_vec();
    a.sort_by_key(|&i| (var_pos(stream, &atom.args[i]), i));
    a
}

/// Keys for every atom of a plan variant given the outer key, ordered to
/// follow the stream. The head key is the stream-ordered full key.
pub fn derive_keys(
    p: &Program,
    rule: usize,
    variant: Option<usize>,
    outer_key: Option<&IndexKey>,
    delta_outermost: bool,
) -> AlignmentKeys {
    let r = &p.rules[rule];
    let n = r.body.len();
    let order: Vec<usize> = match variant {
        Some(d) if delta_outermost => std::iter::once(d).chain((0..n).filter(|&a| a != d)).collect(),
        _ => (0..n).collect(),
    };
    let mut keys = AlignmentKeys::default();
    let mut stream: Vec<String> = Vec::new();
    for (pos, &a) in order.iter().enumerate() {
        let atom = &r.body[a];
        let arity = atom.arity();
        let bound: Vec<usize> = (0..arity)
            .filter(|&i| match &atom.args[i] {
                Term::Const(_) => true,
                Term::Var(v) => stream.contains(v),
            })
            .collect();
        let key = if pos == 0 && bound.is_empty() {
            outer_key.cloned().unwrap_or_else(|| IndexKey::full(arity))
        } else if bound.is_empty() {
            IndexKey::full(arity)
        } else {
            IndexKey::new(order_by_stream(atom, &bound, &stream)).expect("distinct attributes")
        };
        for i in key.sort_order(arity) {
            if let Some(v) = atom.args[i].var() {
                if !stream.iter().any(|s| s == v) {
                    stream.push(v.to_string());
                }
            }
        }
        keys.body.insert(a, key);
    }
    let h = &r.head;
    let all: Vec<usize> = (0..h.arity()).collect();
    keys.head = Some(IndexKey::new(order_by_stream(h, &all, &stream)).expect("distinct attributes"));
    keys
}

fn rebuild(
    sig: &WorkloadSignature,
    g: &AlignmentGraph,
    outer: Option<&IndexKey>,
    head: Option<&IndexKey>,
) -> Result<AlignmentGraph, ProfileError> {
    let mut keys = derive_keys(&sig.program, g.rule, g.variant, outer, sig.delta_outermost);
    if let Some(h) = head {
        keys.head = Some(h.clone());
    }
    let mut out = build_alignment_graph(&sig.program, g.rule, g.variant, &keys, sig.delta_outermost)?;
    out.copy_counts(g);
    Ok(out)
}

/// Longest fully aligned key whose variables all come from the outer atom,
/// mapped back to the outer atom's attributes.
fn extension(g: &AlignmentGraph, outer: &Atom) -> Option<Vec<usize>> {
    g.aligned_path()
        .into_iter()
        .filter(|e| e.class == AlignClass::Full && !e.key_vars.is_empty())
        .filter_map(|e| {
            e.key_vars
                .iter()
                .map(|v| outer.args.iter().position(|t| t.var() == Some(v.as_str())))
                .collect::<Option<Vec<usize>>>()
        })
        .max_by_key(|k| k.len())
}

/// Chooses the outer key of every rule: each single attribute of the outer
/// atom is tried, the one whose aligned path carries the most operations
/// wins (lower attribute on ties), and the key is then extended along the
/// longest fully aligned access it feeds.
pub fn compute_index_keys(sig: &WorkloadSignature, trace: &mut Vec<String>) -> Result<KeyPlan, ProfileError> {
    let p = &sig.program;
    let mut groups: BTreeMap<(usize, usize), Vec<&AlignmentGraph>> = BTreeMap::new();
    for g in &sig.graphs {
        if let Some(o) = g.outer() {
            groups.entry((g.rule, o)).or_default().push(g);
        }
    }
    let mut choices = Vec::new();
    let mut outer_keys: BTreeMap<(usize, usize), IndexKey> = BTreeMap::new();
    for (&(rule, oa), gs) in &groups {
        let atom = &p.rules[rule].body[oa];
        let mut cands: Vec<usize> = Vec::new();
        for (i, t) in atom.args.iter().enumerate() {
            if let Term::Var(v) = t {
                if atom.args[..i].iter().all(|u| u.var() != Some(v.as_str())) {
                    cands.push(i);
                }
            }
        }
        if cands.is_empty() {
            continue;
        }
        let mut scored = Vec::with_capacity(cands.len());
        for &c in &cands {
            let key = IndexKey::new(vec![c]).expect("single attribute");
            let mut ops = 0u64;
            for g in gs {
                ops += rebuild(sig, g, Some(&key), None)?.path_ops();
            }
            scored.push((c, ops));
        }
        let best = scored.iter().fold(scored[0], |b, &x| if x.1 > b.1 { x } else { b }).0;
        let single = IndexKey::new(vec![best]).expect("single attribute");
        let mut ext: Vec<usize> = vec![best];
        for g in gs {
            let rg = rebuild(sig, g, Some(&single), None)?;
            if let Some(k) = extension(&rg, atom) {
                if k.len() > ext.len() && k[0] == best {
                    ext = k;
                }
            }
        }
        let chosen = IndexKey::new(ext).expect("distinct attributes");
        trace.push(format!(
            "keys: rule {rule} outer {}: {} -> {}",
            atom.relation,
            scored.iter().map(|(c, o)| format!("[{c}]={o}")).collect::<Vec<_>>().join(" "),
            chosen
        ));
        outer_keys.insert((rule, oa), chosen.clone());
        choices.push(KeyChoice { rule, outer_atom: oa, relation: atom.relation.clone(), candidates: scored, chosen });
    }

    // One full key per head relation, taken from the variant with the most
    // head operations.
    let mut head_votes: BTreeMap<String, (u64, IndexKey)> = BTreeMap::new();
    let mut staged = Vec::with_capacity(sig.graphs.len());
    for g in &sig.graphs {
        let ok = g.outer().and_then(|o| outer_keys.get(&(g.rule, o)));
        let rg = rebuild(sig, g, ok, None)?;
        let w: u64 = rg
            .edges
            .iter()
            .filter(|e| matches!(e.op, EdgeOp::Contains | EdgeOp::Append))
            .map(|e| e.calls)
            .sum();
        let hk = rg.keys.head.clone().expect("head key derived");
        let entry = head_votes.entry(rg.head_relation.clone()).or_insert((0, hk.clone()));
        if w > entry.0 {
            *entry = (w, hk);
        }
        staged.push((g, ok.cloned()));
    }
    let head_keys: BTreeMap<String, IndexKey> = head_votes.into_iter().map(|(k, (_, v))| (k, v)).collect();
    for (rel, k) in &head_keys {
        trace.push(format!("keys: head {rel} -> {k}"));
    }
    let mut graphs = Vec::with_capacity(staged.len());
    for (g, ok) in staged {
        graphs.push(rebuild(sig, g, ok.as_ref(), head_keys.get(&g.head_relation))?);
    }
    Ok(KeyPlan { graphs, choices, head_keys })
}

/// Side of a body node.
pub(crate) fn node_side(n: NodeRef) -> Option<(usize, Side)> {
    match n {
        NodeRef::Body { atom, side } => Some((atom, side)),
        _ => None,
    }
}
