//! Graph oracles written directly against adjacency structures.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edges = Vec<(u64, u64)>;

/// Random directed graph with `n` nodes and up to `m` distinct edges
/// (self loops allowed, unlike the bench generator).
pub fn random_graph(seed: u64, n: u64, m: usize) -> Edges {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut set = BTreeSet::new();
    for _ in 0..m {
        set.insert((r.random_range(0..n), r.random_range(0..n)));
    }
    set.into_iter().collect()
}

pub fn flat(edges: &[(u64, u64)]) -> Vec<u64> {
    edges.iter().flat_map(|&(a, b)| [a, b]).collect()
}

fn nodes(edges: &[(u64, u64)]) -> usize {
    edges.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0)
}

/// Transitive closure by Warshall's algorithm over a boolean matrix.
pub fn warshall(edges: &[(u64, u64)]) -> BTreeSet<Vec<u64>> {
    let n = nodes(edges);
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in edges {
        m[a as usize][b as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x {
                out.insert(vec![i as u64, j as u64]);
            }
        }
    }
    out
}

/// Nodes reachable from `seeds` along edges in either direction,
/// including the seeds.
pub fn bfs_undirected(edges: &[(u64, u64)], seeds: &[u64]) -> BTreeSet<Vec<u64>> {
    let n = nodes(edges).max(seeds.iter().map(|&s| s as usize + 1).max().unwrap_or(0));
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    let mut seen = vec![false; n];
    let mut q: VecDeque<u64> = VecDeque::new();
    for &s in seeds {
        if !seen[s as usize] {
            seen[s as usize] = true;
            q.push_back(s);
        }
    }
    while let Some(x) = q.pop_front() {
        for &y in &adj[x as usize] {
            if !seen[y as usize] {
                seen[y as usize] = true;
                q.push_back(y);
            }
        }
    }
    (0..n as u64).filter(|&i| seen[i as usize]).map(|i| vec![i]).collect()
}

/// Same generation: pairs of children of a common parent, closed under
/// stepping both members of a pair to a child. Explores the product graph
/// level by level from the sibling pairs.
pub fn same_generation(edges: &[(u64, u64)]) -> BTreeSet<Vec<u64>> {
    let n = nodes(edges);
    let mut children = vec![Vec::new(); n];
    for &(a, b) in edges {
        children[a as usize].push(b);
    }
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut level: Vec<(u64, u64)> = Vec::new();
    for c in &children {
        for &x in c {
            for &y in c {
                if seen.insert((x, y)) {
                    level.push((x, y));
                }
            }
        }
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        for (a, b) in level {
            for &x in &children[a as usize] {
                for &y in &children[b as usize] {
                    if seen.insert((x, y)) {
                        next.push((x, y));
                    }
                }
            }
        }
        level = next;
    }
    seen.into_iter().map(|(x, y)| vec![x, y]).collect()
}
