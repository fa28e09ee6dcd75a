#![allow(dead_code)]

pub mod graphs;
pub mod props;

use std::collections::BTreeMap;

use reprlog::eval::{EdgeCount, EdgeKey, EdgeTarget, Op, OpCounters};
use reprlog::frontend::{parse_program, Program};
use reprlog::profiler::{signature_from_counts, WorkloadSignature};

pub const ANDERSEN: &str = include_str!("../../corpus/andersen.dl");

const K: u64 = 1_000;
const M: u64 = 1_000_000;

fn put(c: &mut OpCounters, rule: usize, variant: Option<usize>, target: EdgeTarget, op: Op, calls: u64, returned: u64) {
    c.edges.insert(EdgeKey { rule, variant, target, op }, EdgeCount { calls, returned, descents: 0 });
}

/// One plan variant's counts: outer iteration, probes in plan order, then
/// base contains, new contains and append.
struct Variant {
    rule: usize,
    variant: Option<usize>,
    iterate: (usize, u64, u64),
    probes: Vec<(usize, u64, u64)>,
    head: (u64, u64, u64),
}

fn put_variant(c: &mut OpCounters, v: &Variant) {
    let (a, calls, ret) = v.iterate;
    put(c, v.rule, v.variant, EdgeTarget::Body(a), Op::Iterate, calls, ret);
    for &(a, calls, ret) in &v.probes {
        put(c, v.rule, v.variant, EdgeTarget::Body(a), Op::Probe, calls, ret);
    }
    let (base, new, append) = v.head;
    if v.variant.is_some() {
        put(c, v.rule, v.variant, EdgeTarget::HeadBase, Op::Contains, base, base - new);
        put(c, v.rule, v.variant, EdgeTarget::HeadNew, Op::Contains, new, new - append);
        put(c, v.rule, v.variant, EdgeTarget::HeadNew, Op::Append, append, 0);
    } else {
        put(c, v.rule, v.variant, EdgeTarget::HeadBase, Op::Contains, base, base - append);
        put(c, v.rule, v.variant, EdgeTarget::HeadBase, Op::Append, append, 0);
    }
}

/// Andersen's analysis with the load rule's delta-on-points_to(x,z) variant
/// carrying the published profile: load bulk-loaded with 1.6M tuples,
/// iterated 15 times delivering 24.8M tuples, 24.8M delta probes returning
/// 135.3K, 135.3K base probes returning 10.0K, 10.0K contains on base and
/// new and 9.9K appends. The remaining variants carry counts of the same
/// order for a profile over 15 iterations.
pub fn andersen_counters() -> OpCounters {
    let mut c = OpCounters::default();
    let variants = [
        Variant { rule: 0, variant: None, iterate: (0, 1, 150 * K), probes: vec![], head: (150 * K, 0, 150 * K) },
        Variant {
            rule: 1,
            variant: Some(1),
            iterate: (0, 15, 3 * M),
            probes: vec![(1, 3 * M, 40 * K)],
            head: (40 * K, 30 * K, 25 * K),
        },
        Variant {
            rule: 2,
            variant: Some(1),
            iterate: (0, 15, 24_800 * K),
            probes: vec![(1, 24_800 * K, 135_300), (2, 135_300, 10 * K)],
            head: (10 * K, 10 * K, 9_900),
        },
        Variant {
            rule: 2,
            variant: Some(2),
            iterate: (0, 15, 24_800 * K),
            probes: vec![(1, 24_800 * K, 2 * M), (2, 2 * M, 12 * K)],
            head: (12 * K, 11 * K, 10 * K),
        },
        Variant {
            rule: 3,
            variant: Some(1),
            iterate: (0, 15, 4 * M),
            probes: vec![(1, 4 * M, 50 * K), (2, 50 * K, 60 * K)],
            head: (60 * K, 8 * K, 7 * K),
        },
        Variant {
            rule: 3,
            variant: Some(2),
            iterate: (0, 15, 4 * M),
            probes: vec![(1, 4 * M, 300 * K), (2, 300 * K, 9 * K)],
            head: (9 * K, 5 * K, 4 * K),
        },
    ];
    for v in &variants {
        put_variant(&mut c, v);
    }
    c.iterations = vec![16];
    c
}

pub fn andersen_sizes() -> (BTreeMap<String, u64>, BTreeMap<String, u64>) {
    let init: BTreeMap<String, u64> = [
        ("address_of", 150 * K),
        ("assign", 200 * K),
        ("load", 1_600 * K),
        ("store", 300 * K),
        ("points_to", 150 * K),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let mut sizes = init.clone();
    sizes.insert("points_to".into(), 250 * K);
    (sizes, init)
}

pub fn andersen_program() -> Program {
    parse_program(ANDERSEN).expect("corpus program parses")
}

pub fn andersen_signature(counters: &OpCounters) -> WorkloadSignature {
    let p = andersen_program();
    let (sizes, init) = andersen_sizes();
    signature_from_counts(&p, counters, &sizes, &init).expect("signature")
}

/// Exchanges, in both variants of the load rule, the probe calls issued
/// from `load` with the head operations: the path behind key [1] then
/// carries the small count and the path behind key [0] the large one.
pub fn swap_load_counts(c: &mut OpCounters) {
    for variant in [Some(1), Some(2)] {
        let key = |target, op| EdgeKey { rule: 2, variant, target, op };
        let probe = c.edge(&key(EdgeTarget::Body(1), Op::Probe)).calls;
        let heads = [
            key(EdgeTarget::HeadBase, Op::Contains),
            key(EdgeTarget::HeadNew, Op::Contains),
            key(EdgeTarget::HeadNew, Op::Append),
        ];
        let head: u64 = heads.iter().map(|k| c.edge(k).calls).sum();
        c.edges.get_mut(&key(EdgeTarget::Body(1), Op::Probe)).expect("probe edge").calls = head;
        let parts = [probe * 2 / 5, probe * 2 / 5, probe - 4 * (probe / 5)];
        for (k, n) in heads.iter().zip(parts) {
            c.edges.get_mut(k).expect("head edge").calls = n;
        }
    }
}
