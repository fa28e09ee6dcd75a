//! Seeded workload generators. Every output is a pure function of the
//! parameters; tuples are returned flat, row-major.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::eval::Facts;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shuffles whole rows of a flat buffer.
fn shuffle_rows(data: Vec<u64>, arity: usize, r: &mut ChaCha8Rng) -> Vec<u64> {
    if arity == 0 {
        return data;
    }
    let mut rows: Vec<&[u64]> = data.chunks_exact(arity).collect();
    rows.shuffle(r);
    rows.concat()
}

/// `n` tuples whose first attribute is drawn densely from
/// `[0, ceil(n / multiplicity))`, each key repeated `multiplicity` times
/// (the last key may repeat fewer times), in shuffled order. Attribute `j > 0`
/// of the `i`-th copy of key `k` is `k * multiplicity + i + j * n`, so tuples
/// are unique.
pub fn gen_dense_shuffled(n: usize, arity: usize, multiplicity: usize, seed: u64) -> Vec<u64> {
    assert!(arity >= 1 && multiplicity >= 1);
    let mut out = Vec::with_capacity(n * arity);
    for t in 0..n {
        let k = (t / multiplicity) as u64;
        let i = (t % multiplicity) as u64;
        out.push(k);
        for j in 1..arity {
            out.push(k * multiplicity as u64 + i + (j * n) as u64);
        }
    }
    shuffle_rows(out, arity, &mut rng(seed))
}

/// Outer and inner relation of a two-attribute join on the first attribute
/// in which every outer tuple finds exactly `partners` inner tuples. Sizes
/// are raw bytes at 8 bytes per attribute. Keys are dense over the inner
/// key space; the outer keys are a random subset of it, and both relations
/// are shuffled.
pub fn gen_probe_pair(r_bytes: usize, s_bytes: usize, partners: usize, seed: u64) -> (Vec<u64>, Vec<u64>) {
    let nr = r_bytes / 16;
    let ns = s_bytes / 16;
    let mut r = rng(seed);
    if partners == 0 {
        let s: Vec<u64> = (0..ns as u64).flat_map(|k| [k, k]).collect();
        let o: Vec<u64> = (0..nr as u64).flat_map(|k| [ns as u64 + k, k]).collect();
        return (shuffle_rows(o, 2, &mut r), shuffle_rows(s, 2, &mut r));
    }
    assert!(nr * partners <= ns, "inner relation too small for {partners} partners per outer tuple");
    let keys = nr + (ns - nr * partners);
    let mut space: Vec<u64> = (0..keys as u64).collect();
    space.shuffle(&mut r);
    let joined = &space[..nr];
    let mut s = Vec::with_capacity(ns * 2);
    let mut o = Vec::with_capacity(nr * 2);
    for (i, &k) in joined.iter().enumerate() {
        o.extend([k, i as u64]);
        for c in 0..partners {
            s.extend([k, (c * nr + i) as u64]);
        }
    }
    for &k in &space[nr..] {
        s.extend([k, k]);
    }
    (shuffle_rows(o, 2, &mut r), shuffle_rows(s, 2, &mut r))
}

/// Outer and inner relation of `schema` attributes each, `n` tuples, joining
/// on the first `key_width` attributes. Key attributes are functions of a
/// dense key, so every outer tuple finds exactly one partner; the remaining
/// attributes are random.
pub fn gen_wide_pair(n: usize, schema: usize, key_width: usize, seed: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(key_width >= 1 && key_width <= schema);
    let mut r = rng(seed);
    let make = |r: &mut ChaCha8Rng| {
        let mut out = Vec::with_capacity(n * schema);
        for k in 0..n as u64 {
            for j in 0..schema {
                if j < key_width {
                    out.push(k.wrapping_mul(j as u64 + 1));
                } else {
                    out.push(r.random());
                }
            }
        }
        shuffle_rows(out, schema, r)
    };
    let a = make(&mut r);
    let b = make(&mut r);
    (a, b)
}

/// Inner relation of `schema` attributes joined on its first attribute by a
/// two-attribute outer relation with one partner per outer tuple.
pub fn gen_schema_pair(n: usize, schema: usize, seed: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(schema >= 1);
    let mut r = rng(seed);
    let outer: Vec<u64> = (0..n as u64).flat_map(|k| [k, k]).collect();
    let mut inner = Vec::with_capacity(n * schema);
    for k in 0..n as u64 {
        inner.push(k);
        for _ in 1..schema {
            inner.push(r.random());
        }
    }
    (shuffle_rows(outer, 2, &mut r), shuffle_rows(inner, schema, &mut r))
}

/// Facts for the four-rule interweaving program: `r1..r4` with `n` tuples
/// each and `s` (8 attributes) with `n * multiplicity`. Group `k` of `s` has
/// attribute 0 equal to `k` and attributes 1..3 drawn at random once per
/// group; `r_i` lists the first `i` of these in the order its rule binds
/// them, so every outer tuple joins with the `multiplicity` copies of its
/// group.
pub fn gen_interweaving(n: usize, multiplicity: usize, seed: u64) -> Facts {
    assert!(multiplicity >= 1);
    let mut r = rng(seed);
    let groups: Vec<[u64; 4]> = (0..n as u64)
        .map(|k| [k, r.random_range(0..n.max(1) as u64), r.random_range(0..n.max(1) as u64), r.random_range(0..n.max(1) as u64)])
        .collect();
    let mut s = Vec::with_capacity(n * multiplicity * 8);
    for (k, g) in groups.iter().enumerate() {
        for c in 0..multiplicity {
            s.extend_from_slice(g);
            s.extend([c as u64, k as u64, r.random(), r.random()]);
        }
    }
    let mut f = Facts::new();
    f.insert("s", 8, shuffle_rows(s, 8, &mut r));
    // Written argument orders: r1(A), r2(B,A), r3(C,A,B), r4(D,B,C,A).
    let orders: [&[usize]; 4] = [&[0], &[1, 0], &[2, 0, 1], &[3, 1, 2, 0]];
    for (i, ord) in orders.iter().enumerate() {
        let rows: Vec<u64> = groups.iter().flat_map(|g| ord.iter().map(move |&a| g[a])).collect();
        f.insert(format!("r{}", i + 1), ord.len(), shuffle_rows(rows, ord.len(), &mut r));
    }
    f
}

/// Base contents and a found-tuple stream for the build-up experiment.
/// Base holds `base_n` unique tuples `(2k, k)`. The stream has `found_n`
/// tuples made of `found_n / dup_multiplicity` distinct tuples, each
/// repeated `dup_multiplicity` times; a `new_fraction` share of the distinct
/// tuples is absent from base (odd first attribute), the rest is drawn from
/// base. The stream is sorted when `ordered`, otherwise shuffled.
pub fn gen_buildup_stream(
    base_n: usize,
    found_n: usize,
    new_fraction: f64,
    dup_multiplicity: usize,
    ordered: bool,
    seed: u64,
) -> (Vec<u64>, Vec<u64>) {
    assert!((0.0..=1.0).contains(&new_fraction) && dup_multiplicity >= 1);
    let mut r = rng(seed);
    let base: Vec<u64> = (0..base_n as u64).flat_map(|k| [2 * k, k]).collect();
    let distinct = found_n / dup_multiplicity;
    let fresh = (distinct as f64 * new_fraction).round() as usize;
    let old = if base_n == 0 { 0 } else { distinct - fresh };
    let mut rows: Vec<[u64; 2]> = Vec::with_capacity(found_n);
    let mut fresh_keys: Vec<u64> = (0..fresh as u64).collect();
    fresh_keys.shuffle(&mut r);
    for k in fresh_keys {
        for _ in 0..dup_multiplicity {
            rows.push([2 * k + 1, k]);
        }
    }
    let mut old_keys: Vec<u64> = (0..base_n as u64).collect();
    old_keys.shuffle(&mut r);
    for &k in old_keys.iter().take(old) {
        for _ in 0..dup_multiplicity {
            rows.push([2 * k, k]);
        }
    }
    if ordered {
        rows.sort_unstable();
    } else {
        rows.shuffle(&mut r);
    }
    (shuffle_rows(base, 2, &mut r), rows.concat())
}

/// Size parameter of a random directed graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphSize {
    /// Each of the `n(n-1)` possible edges independently with probability p.
    P(f64),
    /// Exactly m distinct edges chosen uniformly.
    M(usize),
}

/// Directed random graph on nodes `0..n` without self loops. `P` uses
/// geometric skipping so the cost is linear in the number of edges.
pub fn gen_random_graph(n: usize, size: GraphSize, seed: u64) -> Vec<u64> {
    let mut r = rng(seed);
    let slots = (n as u64) * (n as u64).saturating_sub(1);
    let decode = |s: u64| {
        let u = s / (n as u64 - 1);
        let mut v = s % (n as u64 - 1);
        if v >= u {
            v += 1;
        }
        [u, v]
    };
    let mut out = Vec::new();
    match size {
        GraphSize::P(p) => {
            assert!((0.0..=1.0).contains(&p));
            if p <= 0.0 || slots == 0 {
                return out;
            }
            if p >= 1.0 {
                return (0..slots).flat_map(decode).collect();
            }
            let lq = (1.0 - p).ln();
            let mut s: i64 = -1;
            loop {
                let u: f64 = r.random();
                s += 1 + ((1.0 - u).ln() / lq).floor() as i64;
                if s as u64 >= slots {
                    break;
                }
                out.extend(decode(s as u64));
            }
        }
        GraphSize::M(m) => {
            assert!(m as u64 <= slots, "more edges than node pairs");
            let mut seen = HashSet::with_capacity(m);
            while seen.len() < m {
                let s = r.random_range(0..slots);
                if seen.insert(s) {
                    out.extend(decode(s));
                }
            }
        }
    }
    out
}

/// Random inputs for the points-to analysis over `vars` variables: `m`
/// address-of facts, `m / 2` assign facts and `m / 20` each of load and
/// store. Denser loads and stores push the points-to relation towards
/// `vars²` tuples.
pub fn gen_andersen(vars: usize, m: usize, seed: u64) -> Facts {
    let mut r = rng(seed);
    let mut f = Facts::new();
    for (name, count) in [("address_of", m), ("assign", m / 2), ("load", m / 20), ("store", m / 20)] {
        let rows: Vec<u64> =
            (0..count).flat_map(|_| [r.random_range(0..vars as u64), r.random_range(0..vars as u64)]).collect();
        f.insert(name, 2, rows);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_shuffled_small() {
        let mut t = gen_dense_shuffled(4, 1, 2, 7);
        t.sort_unstable();
        assert_eq!(t, vec![0, 0, 1, 1]);
        assert!(gen_dense_shuffled(0, 2, 1, 1).is_empty());
        assert_eq!(gen_dense_shuffled(100, 2, 10, 3), gen_dense_shuffled(100, 2, 10, 3));
    }

    #[test]
    fn complete_graph() {
        let mut e: Vec<_> = gen_random_graph(3, GraphSize::P(1.0), 0).chunks(2).map(|c| (c[0], c[1])).collect();
        e.sort_unstable();
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]);
        assert_eq!(gen_random_graph(50, GraphSize::M(100), 4).len(), 200);
    }

    #[test]
    fn buildup_all_new_ordered() {
        let (base, found) = gen_buildup_stream(10, 8, 1.0, 1, true, 2);
        let b: HashSet<&[u64]> = base.chunks(2).collect();
        let rows: Vec<&[u64]> = found.chunks(2).collect();
        assert!(rows.windows(2).all(|w| w[0] < w[1]));
        assert!(rows.iter().all(|t| !b.contains(t)));
        let (base, found) = gen_buildup_stream(10, 8, 0.0, 2, false, 2);
        let b: HashSet<&[u64]> = base.chunks(2).collect();
        assert!(found.chunks(2).all(|t| b.contains(t)));
    }
}
