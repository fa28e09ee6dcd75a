//! Radix tree over order-preserving key bytes.
//!
//! Fixed 8-bit span with path compression: every node carries the bytes
//! it compresses, inner nodes switch from a sorted sparse child list to a
//! 256-way array once they outgrow [`SPARSE_MAX`] children. All keys have
//! the same length, so leaves sit exactly at the end of the key and hold
//! the payload list for that key (tuples for CI, references otherwise).

use std::mem::size_of;

pub(crate) const NIL: u32 = u32::MAX;
const SPARSE_MAX: usize = 48;

#[derive(Debug)]
enum Children {
    Sparse { bytes: Vec<u8>, ids: Vec<u32> },
    Dense { ids: Box<[u32; 256]>, count: usize },
}

impl Children {
    fn empty() -> Self {
        Children::Sparse { bytes: Vec::new(), ids: Vec::new() }
    }

    fn get(&self, b: u8) -> Option<u32> {
        match self {
            Children::Sparse { bytes, ids } => bytes.binary_search(&b).ok().map(|i| ids[i]),
            Children::Dense { ids, .. } => {
                let id = ids[b as usize];
                (id != NIL).then_some(id)
            }
        }
    }

    fn insert(&mut self, b: u8, id: u32) {
        match self {
            Children::Sparse { bytes, ids } => {
                let i = bytes.binary_search(&b).unwrap_err();
                bytes.insert(i, b);
                ids.insert(i, id);
                if bytes.len() > SPARSE_MAX {
                    let mut dense = Box::new([NIL; 256]);
                    for (&b, &id) in bytes.iter().zip(ids.iter()) {
                        dense[b as usize] = id;
                    }
                    let count = bytes.len();
                    *self = Children::Dense { ids: dense, count };
                }
            }
            Children::Dense { ids, count } => {
                ids[b as usize] = id;
                *count += 1;
            }
        }
    }

    /// Child at or after position `pos` in byte order, with the position
    /// to resume from.
    fn next_from(&self, pos: usize) -> Option<(u32, usize)> {
        match self {
            Children::Sparse { ids, .. } => ids.get(pos).map(|&id| (id, pos + 1)),
            Children::Dense { ids, .. } => {
                (pos..256).find(|&b| ids[b] != NIL).map(|b| (ids[b], b + 1))
            }
        }
    }

    fn footprint(&self) -> usize {
        match self {
            Children::Sparse { bytes, ids } => bytes.capacity() + ids.capacity() * 4,
            Children::Dense { .. } => 256 * 4,
        }
    }
}

#[derive(Debug)]
enum Kind {
    Inner(Children),
    Leaf(Vec<u64>),
}

#[derive(Debug)]
struct RxNode {
    prefix: Vec<u8>,
    kind: Kind,
}

#[derive(Debug)]
pub(crate) struct RadixTree {
    nodes: Vec<RxNode>,
    len: usize,
    payload: usize,
}

impl RadixTree {
    /// `payload` is the number of words per stored entry.
    pub fn new(payload: usize) -> Self {
        RadixTree {
            nodes: vec![RxNode { prefix: Vec::new(), kind: Kind::Inner(Children::empty()) }],
            len: 0,
            payload,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn payload_width(&self) -> usize {
        self.payload
    }

    pub fn footprint(&self) -> usize {
        self.nodes.capacity() * size_of::<RxNode>()
            + self
                .nodes
                .iter()
                .map(|n| {
                    n.prefix.capacity()
                        + match &n.kind {
                            Kind::Inner(c) => c.footprint(),
                            Kind::Leaf(p) => p.capacity() * 8,
                        }
                })
                .sum::<usize>()
    }

    fn push(&mut self, prefix: Vec<u8>, kind: Kind) -> u32 {
        self.nodes.push(RxNode { prefix, kind });
        (self.nodes.len() - 1) as u32
    }

    pub fn insert(&mut self, key: &[u8], entry: &[u64]) {
        debug_assert_eq!(entry.len(), self.payload);
        self.len += 1;
        let mut node = 0u32;
        let mut depth = 0usize;
        loop {
            let n = &self.nodes[node as usize];
            let rest = &key[depth..];
            let common = n.prefix.iter().zip(rest).take_while(|(a, b)| a == b).count();
            if common < n.prefix.len() {
                // Split the compressed path at the first differing byte.
                let old_prefix = n.prefix.clone();
                let moved_kind =
                    std::mem::replace(&mut self.nodes[node as usize].kind, Kind::Inner(Children::empty()));
                let moved = self.push(old_prefix[common + 1..].to_vec(), moved_kind);
                let leaf = self.push(rest[common + 1..].to_vec(), Kind::Leaf(entry.to_vec()));
                let n = &mut self.nodes[node as usize];
                n.prefix.truncate(common);
                let mut children = Children::empty();
                children.insert(old_prefix[common], moved);
                children.insert(rest[common], leaf);
                n.kind = Kind::Inner(children);
                return;
            }
            depth += n.prefix.len();
            match &self.nodes[node as usize].kind {
                Kind::Leaf(_) => {
                    debug_assert_eq!(depth, key.len());
                    if let Kind::Leaf(p) = &mut self.nodes[node as usize].kind {
                        p.extend_from_slice(entry);
                    }
                    return;
                }
                Kind::Inner(children) => {
                    let b = key[depth];
                    match children.get(b) {
                        Some(child) => {
                            node = child;
                            depth += 1;
                        }
                        None => {
                            let leaf = self.push(key[depth + 1..].to_vec(), Kind::Leaf(entry.to_vec()));
                            if let Kind::Inner(children) = &mut self.nodes[node as usize].kind {
                                children.insert(b, leaf);
                            }
                            return;
                        }
                    }
                }
            }
        }
    }

    /// Root of the subtree holding exactly the keys that start with `prefix`.
    pub fn find_prefix(&self, prefix: &[u8]) -> Option<u32> {
        let mut node = 0u32;
        let mut depth = 0usize;
        loop {
            let n = &self.nodes[node as usize];
            let rest = &prefix[depth..];
            let m = n.prefix.len().min(rest.len());
            if n.prefix[..m] != rest[..m] {
                return None;
            }
            if rest.len() <= n.prefix.len() {
                return Some(node);
            }
            depth += n.prefix.len();
            match &n.kind {
                Kind::Leaf(_) => return None,
                Kind::Inner(children) => {
                    node = children.get(prefix[depth])?;
                    depth += 1;
                }
            }
        }
    }

    /// Payload list stored under the complete key.
    pub fn get(&self, key: &[u8]) -> &[u64] {
        match self.find_prefix(key) {
            Some(id) => match &self.nodes[id as usize].kind {
                Kind::Leaf(p) => p,
                Kind::Inner(_) => &[],
            },
            None => &[],
        }
    }

    /// Removes the first entry in the key's payload list accepted by `hit`.
    pub fn remove_where<F: Fn(&[u64]) -> bool>(&mut self, key: &[u8], hit: F) -> Option<Vec<u64>> {
        let id = self.find_prefix(key)?;
        let w = self.payload;
        let Kind::Leaf(p) = &mut self.nodes[id as usize].kind else { return None };
        let pos = p.chunks_exact(w).position(hit)?;
        let removed: Vec<u64> = p.drain(pos * w..(pos + 1) * w).collect();
        self.len -= 1;
        Some(removed)
    }

    /// In-order walk of the leaves below `root`.
    pub fn walk(&self, root: Option<u32>) -> Walk<'_> {
        let mut stack = Vec::new();
        if let Some(r) = root {
            stack.push((r, 0usize));
        }
        Walk { tree: self, stack }
    }

    pub fn root(&self) -> u32 {
        0
    }
}

pub(crate) struct Walk<'a> {
    tree: &'a RadixTree,
    stack: Vec<(u32, usize)>,
}

impl<'a> Walk<'a> {
    /// Next non-empty leaf payload in key order.
    pub fn next_leaf(&mut self) -> Option<&'a [u64]> {
        let tree = self.tree;
        while let Some(top) = self.stack.last_mut() {
            match &tree.nodes[top.0 as usize].kind {
                Kind::Leaf(p) => {
                    self.stack.pop();
                    if !p.is_empty() {
                        return Some(p);
                    }
                }
                Kind::Inner(children) => match children.next_from(top.1) {
                    Some((child, resume)) => {
                        top.1 = resume;
                        self.stack.push((child, 0));
                    }
                    None => {
                        self.stack.pop();
                    }
                },
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(v: &[u64]) -> Vec<u8> {
        v.iter().flat_map(|x| x.to_be_bytes()).collect()
    }

    fn all(t: &RadixTree, root: Option<u32>) -> Vec<u64> {
        let mut w = t.walk(root);
        let mut out = Vec::new();
        while let Some(p) = w.next_leaf() {
            out.extend_from_slice(p);
        }
        out
    }

    #[test]
    fn ordered_walk() {
        let mut t = RadixTree::new(1);
        let vals = [300u64, 5, 70000, 5, 1 << 40, 0, 256];
        for v in vals {
            t.insert(&key(&[v]), &[v]);
        }
        let mut sorted = vals.to_vec();
        sorted.sort();
        assert_eq!(all(&t, Some(t.root())), sorted);
        assert_eq!(t.get(&key(&[5])), &[5, 5]);
        assert!(t.get(&key(&[6])).is_empty());
    }

    #[test]
    fn dense_nodes_and_prefixes() {
        let mut t = RadixTree::new(2);
        for a in 0..3u64 {
            for b in 0..100u64 {
                t.insert(&key(&[a, b]), &[a, b]);
            }
        }
        let sub = t.find_prefix(&key(&[1]));
        let got = all(&t, sub);
        assert_eq!(got.len(), 200);
        assert!(got.chunks(2).all(|r| r[0] == 1));
        assert!(got.chunks(2).zip(got.chunks(2).skip(1)).all(|(x, y)| x < y));
        assert!(t.find_prefix(&key(&[7])).is_none());
    }

    #[test]
    fn remove_leaves_empty_leaf() {
        let mut t = RadixTree::new(1);
        t.insert(&key(&[9]), &[9]);
        assert!(t.remove_where(&key(&[9]), |e| e[0] == 9).is_some());
        assert_eq!(t.len(), 0);
        assert!(all(&t, Some(t.root())).is_empty());
        assert!(t.remove_where(&key(&[9]), |_| true).is_none());
    }
}
