//! The three decision trees: data structures, access types and sharing.

use std::collections::{BTreeMap, BTreeSet};

use super::keys::{node_side, KeyPlan};
use super::policy::{uki_worthwhile, Policy};
use crate::eval::{OccurrenceRef, Side};
use crate::frontend::RelKind;
use crate::profiler::{chain_cover, AlignClass, EdgeOp, NodeRef, WorkloadSignature};
use crate::storage::{AccessType, DataStructure, IndexKey, RepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum UseKind {
    Iterate,
    Probe,
    Contains,
}

/// One access of a relation instance under the selected keys.
#[derive(Clone, Debug)]
pub(crate) struct KeyUse {
    pub occ: Option<OccurrenceRef>,
    pub key: IndexKey,
    pub kind: UseKind,
    /// On the aligned path from the outer relation.
    pub aligned: bool,
    pub weight: u64,
}

pub(crate) type Uses = BTreeMap<(String, Side), Vec<KeyUse>>;

pub(crate) fn collect_uses(sig: &WorkloadSignature, plan: &KeyPlan) -> Uses {
    let mut uses: Uses = BTreeMap::new();
    for g in &plan.graphs {
        let path: Vec<(NodeRef, EdgeOp)> = g.aligned_path().iter().map(|e| (e.to, e.op)).collect();
        for e in &g.edges {
            let aligned = path.contains(&(e.to, e.op));
            match e.op {
                EdgeOp::Iterate | EdgeOp::Probe => {
                    let (atom, side) = node_side(e.to).expect("body node");
                    let key = g.keys.body[&atom].clone();
                    uses.entry((g.relations[atom].clone(), side)).or_default().push(KeyUse {
                        occ: Some(OccurrenceRef { rule: g.rule, atom, side }),
                        key,
                        kind: if e.op == EdgeOp::Iterate { UseKind::Iterate } else { UseKind::Probe },
                        aligned: e.op == EdgeOp::Iterate || aligned,
                        weight: e.calls,
                    });
                }
                EdgeOp::Contains => {
                    let side = match e.to {
                        NodeRef::HeadBase => Side::Base,
                        NodeRef::HeadNew if g.variant.is_some() => Side::Delta,
                        _ => continue,
                    };
                    let key = plan.head_keys.get(&g.head_relation).cloned().or_else(|| g.keys.head.clone());
                    if let Some(key) = key {
                        uses.entry((g.head_relation.clone(), side)).or_default().push(KeyUse {
                            occ: None,
                            key,
                            kind: UseKind::Contains,
                            aligned,
                            weight: e.calls,
                        });
                    }
                }
                _ => {}
            }
        }
    }
    for (name, r) in &sig.relations {
        let full = IndexKey::full(r.arity);
        let base = uses.entry((name.clone(), Side::Base)).or_default();
        if base.is_empty() || (r.kind == RelKind::Idb && !base.iter().any(|u| u.key.len() == r.arity)) {
            base.push(KeyUse { occ: None, key: full.clone(), kind: UseKind::Contains, aligned: false, weight: 0 });
        }
        if r.recursive {
            let d = uses.entry((name.clone(), Side::Delta)).or_default();
            if !d.iter().any(|u| u.key.len() == r.arity) {
                let key = plan.head_keys.get(name).cloned().unwrap_or(full);
                d.push(KeyUse { occ: None, key, kind: UseKind::Contains, aligned: false, weight: 0 });
            }
        }
    }
    uses
}

/// Context shared by the trees.
pub(crate) struct TreeInput<'a> {
    pub sig: &'a WorkloadSignature,
    pub plan: &'a KeyPlan,
    pub uses: &'a Uses,
    pub policy: &'a Policy,
    pub budget_binding: bool,
    pub init_dominated: bool,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        if a == 0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        a as f64 / b as f64
    }
}

/// Structure of an IDB's base relation from the arrivals of its head
/// operations.
fn head_base(t: &TreeInput, rel: &str, trace: &mut Vec<String>) -> DataStructure {
    if t.init_dominated {
        trace.push(format!("dt1: {rel} base: initialization dominates -> SA"));
        return DataStructure::SA;
    }
    let (mut never, mut aligned, mut appends) = (0u64, 0u64, 0u64);
    let recursive = t.sig.relations.get(rel).is_some_and(|r| r.recursive);
    // Only a fully aligned stream lets an ordered structure walk its
    // contains in order; partial alignment still lands at random leaves.
    for g in t.plan.graphs.iter().filter(|g| g.head_relation == rel && (!recursive || g.variant.is_some())) {
        for e in &g.edges {
            match (e.to, e.op) {
                (NodeRef::HeadBase, EdgeOp::Contains) => {
                    if e.class == AlignClass::Full {
                        aligned += e.calls;
                    } else {
                        never += e.calls;
                    }
                }
                (NodeRef::HeadNew, EdgeOp::Append) if g.variant.is_some() => appends += e.calls,
                (NodeRef::HeadBase, EdgeOp::Append) if g.variant.is_none() => appends += e.calls,
                _ => {}
            }
        }
    }
    let ds = if never > aligned {
        DataStructure::HT
    } else if ratio(appends, never + aligned) > t.policy.sapp_new_ratio {
        DataStructure::SAPP
    } else {
        DataStructure::BP
    };
    trace.push(format!(
        "dt1: {rel} base: contains unordered={never} ordered={aligned} appends={appends} -> {ds}"
    ));
    ds
}

fn delta_structure(t: &TreeInput, rel: &str, trace: &mut Vec<String>) -> DataStructure {
    let uses = t.uses.get(&(rel.to_string(), Side::Delta)).map(|v| v.as_slice()).unwrap_or(&[]);
    let ordered = uses.iter().any(|u| u.kind == UseKind::Iterate || (u.kind == UseKind::Probe && u.aligned));
    let probed = uses.iter().any(|u| u.kind == UseKind::Probe);
    let ds = if ordered || !probed || t.budget_binding { DataStructure::BP } else { DataStructure::HT };
    trace.push(format!("dt1: {rel} delta/new: ordered={ordered} probed={probed} -> {ds}"));
    ds
}

/// DT1: a structure per use.
pub(crate) fn select_structures(t: &TreeInput, trace: &mut Vec<String>) -> BTreeMap<(String, Side), Vec<DataStructure>> {
    let mut out = BTreeMap::new();
    for ((rel, side), uses) in t.uses {
        let r = &t.sig.relations[rel];
        let v: Vec<DataStructure> = match (side, r.kind) {
            (Side::Delta, _) => {
                let ds = delta_structure(t, rel, trace);
                vec![ds; uses.len()]
            }
            (Side::Base, RelKind::Idb) => {
                let ds = head_base(t, rel, trace);
                vec![ds; uses.len()]
            }
            (Side::Base, RelKind::Edb) => uses
                .iter()
                .map(|u| {
                    let ds = if t.init_dominated {
                        DataStructure::SA
                    } else {
                        match u.kind {
                            UseKind::Probe if !u.aligned => {
                                if t.budget_binding {
                                    DataStructure::BP
                                } else {
                                    DataStructure::HT
                                }
                            }
                            _ => DataStructure::SA,
                        }
                    };
                    if let Some(o) = u.occ {
                        trace.push(format!(
                            "dt1: {rel}({}) rule {} atom {} {:?} aligned={} -> {ds}",
                            u.key, o.rule, o.atom, u.kind, u.aligned
                        ));
                    }
                    ds
                })
                .collect(),
        };
        out.insert((rel.clone(), *side), v);
    }
    out
}

/// DT2: an access type per use.
pub(crate) fn select_access(t: &TreeInput, trace: &mut Vec<String>) -> BTreeMap<(String, Side), Vec<AccessType>> {
    let mut out = BTreeMap::new();
    for ((rel, side), uses) in t.uses {
        let arity = t.sig.relations[rel].arity;
        let distinct: BTreeSet<&IndexKey> = uses.iter().map(|u| &u.key).collect();
        let upi = t.budget_binding && *side == Side::Base && arity >= 3 && distinct.len() >= 2;
        let v: Vec<AccessType> = uses
            .iter()
            .map(|u| {
                if upi {
                    AccessType::UPI
                } else if u.kind == UseKind::Probe && !u.aligned && uki_worthwhile(u.key.len(), arity) {
                    AccessType::UKI
                } else {
                    AccessType::CI
                }
            })
            .collect();
        let picked: BTreeSet<String> = v.iter().map(|a| a.to_string()).collect();
        trace.push(format!(
            "dt2: {rel}{} -> {}",
            if *side == Side::Delta { " delta/new" } else { "" },
            picked.into_iter().collect::<Vec<_>>().join(",")
        ));
        out.insert((rel.clone(), *side), v);
    }
    out
}

const DS_ORDER: [DataStructure; 5] =
    [DataStructure::SA, DataStructure::SAPP, DataStructure::BP, DataStructure::HT, DataStructure::RX];

fn vote<T: Copy + Ord>(votes: &[(T, u64)], rank: impl Fn(T) -> usize) -> T {
    let mut tally: BTreeMap<T, u64> = BTreeMap::new();
    for &(x, w) in votes {
        *tally.entry(x).or_default() += w;
    }
    let mut best: Option<(T, u64)> = None;
    for (&x, &w) in &tally {
        best = match best {
            None => Some((x, w)),
            Some((b, bw)) if w > bw || (w == bw && rank(x) < rank(b)) => Some((x, w)),
            keep => keep,
        };
    }
    best.expect("at least one vote").0
}

/// A representation chosen by DT3 with the keys of the uses it serves.
#[derive(Clone, Debug)]
pub(crate) struct Chosen {
    pub config: RepConfig,
}

/// Key of a chain built by increments: each longer set appends its new
/// attributes in the order its own key lists them.
fn chain_key(keys: &[&IndexKey]) -> IndexKey {
    let mut attrs: Vec<usize> = Vec::new();
    for k in keys {
        for &a in k.attrs() {
            if !attrs.contains(&a) {
                attrs.push(a);
            }
        }
    }
    IndexKey::new(attrs).expect("distinct attributes")
}

/// DT3: exclusive or shared representations per relation instance.
pub(crate) fn select_sharing(
    t: &TreeInput,
    ds: &BTreeMap<(String, Side), Vec<DataStructure>>,
    acc: &BTreeMap<(String, Side), Vec<AccessType>>,
    head_keys: &BTreeMap<String, IndexKey>,
    trace: &mut Vec<String>,
) -> BTreeMap<(String, Side), Vec<Chosen>> {
    let mut out = BTreeMap::new();
    for ((rel, side), uses) in t.uses {
        let r = &t.sig.relations[rel];
        let ds = &ds[&(rel.clone(), *side)];
        let acc = &acc[&(rel.clone(), *side)];
        // Distinct keys with their votes.
        let mut keys: BTreeMap<IndexKey, (Vec<(DataStructure, u64)>, Vec<(AccessType, u64)>, bool)> = BTreeMap::new();
        for (i, u) in uses.iter().enumerate() {
            let e = keys.entry(u.key.clone()).or_default();
            e.0.push((ds[i], u.weight.max(1)));
            e.1.push((acc[i], u.weight.max(1)));
            e.2 |= u.kind == UseKind::Probe && u.aligned;
        }
        let rank_ds = |d: DataStructure| DS_ORDER.iter().position(|&x| x == d).unwrap_or(DS_ORDER.len());
        let rank_acc = |a: AccessType| AccessType::ALL.iter().position(|&x| x == a).unwrap_or(4);
        let per_key: Vec<(IndexKey, DataStructure, AccessType, bool, u64)> = keys
            .into_iter()
            .map(|(k, (d, a, ordered))| {
                let w = d.iter().map(|x| x.1).sum();
                (k, vote(&d, rank_ds), vote(&a, rank_acc), ordered, w)
            })
            .collect();
        // Ordered iterations over a key that went to a hash table get an
        // ordered representation of their own on the key widened to the
        // full tuple.
        let mut scans: BTreeMap<IndexKey, (Vec<(DataStructure, u64)>, Vec<(AccessType, u64)>)> = BTreeMap::new();
        for (i, u) in uses.iter().enumerate() {
            let hashed = per_key.iter().any(|x| x.0 == u.key && x.1 == DataStructure::HT);
            if u.kind == UseKind::Iterate && ds[i] != DataStructure::HT && hashed {
                let e = scans.entry(u.key.clone()).or_default();
                e.0.push((ds[i], u.weight.max(1)));
                e.1.push((acc[i], u.weight.max(1)));
            }
        }
        let mut chosen: Vec<Chosen> = Vec::new();
        for (k, (d, a)) in scans {
            let full = chain_key(&[&k, &IndexKey::full(r.arity)]);
            trace.push(format!("dt3: {rel}: ordered scan of hashed key {k} -> {full}"));
            chosen.push(Chosen { config: RepConfig::indexed(vote(&a, rank_acc), vote(&d, rank_ds), full) });
        }
        let (hashed, ordered): (Vec<_>, Vec<_>) = per_key.into_iter().partition(|x| x.1 == DataStructure::HT);
        for (k, d, a, _, _) in &hashed {
            chosen.push(Chosen { config: RepConfig::indexed(*a, *d, k.clone()) });
        }
        if !hashed.is_empty() && hashed.len() > 1 {
            trace.push(format!("dt3: {rel}: hash representations stay exclusive"));
        }
        if !ordered.is_empty() {
            let ordered_probes = ordered.iter().any(|x| x.3);
            let eval: u64 = uses.iter().filter(|u| u.kind != UseKind::Iterate).map(|u| u.weight).sum();
            let init = r.init.max(r.cardinality);
            let exclusive = *side == Side::Base
                && ordered_probes
                && (r.multiplicity <= t.policy.exclusive_max_multiplicity
                    || ratio(eval, init) >= t.policy.exclusive_min_eval_init);
            let groups: Vec<Vec<usize>> = if exclusive {
                // Keys that are ordered prefixes of another key share it.
                let mut g: Vec<Vec<usize>> = Vec::new();
                let mut idx: Vec<usize> = (0..ordered.len()).collect();
                idx.sort_by_key(|&i| std::cmp::Reverse(ordered[i].0.len()));
                for i in idx {
                    match g.iter_mut().find(|grp| ordered[i].0.is_prefix_of(&ordered[grp[0]].0)) {
                        Some(grp) => grp.push(i),
                        None => g.push(vec![i]),
                    }
                }
                g.into_iter()
                    .map(|mut grp| {
                        grp.reverse();
                        grp
                    })
                    .collect()
            } else {
                let ks: Vec<IndexKey> = ordered.iter().map(|x| x.0.clone()).collect();
                chain_cover(&ks)
            };
            if ordered.len() > 1 {
                trace.push(format!(
                    "dt3: {rel}{}: ordered_probes={ordered_probes} multiplicity={:.2} eval/init={:.2} -> {}",
                    if *side == Side::Delta { " delta/new" } else { "" },
                    r.multiplicity,
                    ratio(eval, init),
                    if exclusive { "exclusive" } else { "shared" }
                ));
            }
            for grp in groups {
                let members: Vec<&IndexKey> = grp.iter().map(|&i| &ordered[i].0).collect();
                let key = chain_key(&members);
                let dv: Vec<(DataStructure, u64)> = grp.iter().map(|&i| (ordered[i].1, ordered[i].4)).collect();
                let av: Vec<(AccessType, u64)> = grp.iter().map(|&i| (ordered[i].2, ordered[i].4)).collect();
                chosen.push(Chosen { config: RepConfig::indexed(vote(&av, rank_acc), vote(&dv, rank_ds), key) });
            }
        }
        let head = head_keys.get(rel);
        chosen.sort_by(|a, b| {
            let ka = a.config.key.as_ref().expect("indexed");
            let kb = b.config.key.as_ref().expect("indexed");
            (ka.len(), Some(ka) != head, ka.attrs()).cmp(&(kb.len(), Some(kb) != head, kb.attrs()))
        });
        chosen.dedup_by(|a, b| a.config.key == b.config.key);
        out.insert((rel.clone(), *side), chosen);
    }
    out
}

/// Representation an occurrence should read, preferring keys that keep
/// its key order.
pub(crate) fn map_use(u: &KeyUse, reps: &[Chosen]) -> Option<IndexKey> {
    let bound: Vec<usize> = match u.kind {
        UseKind::Iterate => Vec::new(),
        _ => u.key.attrs().to_vec(),
    };
    let fits = |c: &&Chosen| {
        let k = c.config.key.as_ref().expect("indexed");
        k.serves(&bound) && (c.config.ds != DataStructure::HT || bound.is_empty() || k.len() == bound.len())
    };
    let key_of = |c: &Chosen| c.config.key.clone().expect("indexed");
    let keeps_order = |c: &&Chosen| u.key.is_prefix_of(c.config.key.as_ref().expect("indexed"));
    // iterations read an ordered structure when one keeps their order
    let scan = u.kind == UseKind::Iterate;
    reps.iter()
        .filter(fits)
        .filter(|c| scan && c.config.ds != DataStructure::HT)
        .find(keeps_order)
        .or_else(|| reps.iter().filter(fits).find(keeps_order))
        .or_else(|| reps.iter().filter(fits).find(|c| c.config.key.as_ref().map(|k| k.len()) == Some(bound.len())))
        .or_else(|| reps.iter().find(fits))
        .map(key_of)
}
