//! Arena-allocated B+-tree multiset over fixed-width index rows.
//!
//! Leaves hold rows in sort order and are chained for range scans. Inner
//! nodes hold copies of the minimum row of every child but the first.
//! Node capacities are chosen so a node is roughly 256 bytes.

use std::cmp::Ordering;
use std::mem::size_of;

use super::layout::{partition_point, sort_rows, Layout};
use super::row_store::{RowStore, TupleRef};

pub(crate) const NIL: u32 = u32::MAX;
const NODE_BYTES: usize = 256;

#[derive(Debug)]
enum Node {
    Leaf { rows: Vec<u64>, next: u32 },
    Inner { seps: Vec<u64>, children: Vec<u32> },
}

#[derive(Debug)]
pub(crate) struct BTree {
    nodes: Vec<Node>,
    root: u32,
    first_leaf: u32,
    len: usize,
    width: usize,
    leaf_cap: usize,
    inner_cap: usize,
}

/// A position in the leaf chain: (leaf, row index).
pub(crate) type Cursor = (u32, usize);

impl BTree {
    pub fn new(width: usize) -> Self {
        BTree {
            nodes: vec![Node::Leaf { rows: Vec::new(), next: NIL }],
            root: 0,
            first_leaf: 0,
            len: 0,
            width,
            leaf_cap: (NODE_BYTES / (8 * width)).max(8),
            inner_cap: (NODE_BYTES / (8 * width + 8)).max(8) + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn footprint(&self) -> usize {
        let mut bytes = self.nodes.capacity() * size_of::<Node>();
        for n in &self.nodes {
            bytes += match n {
                Node::Leaf { rows, .. } => rows.capacity() * 8,
                Node::Inner { seps, children } => seps.capacity() * 8 + children.capacity() * 4,
            };
        }
        bytes
    }

    fn new_leaf(&mut self, rows: Vec<u64>, next: u32) -> u32 {
        self.nodes.push(Node::Leaf { rows, next });
        (self.nodes.len() - 1) as u32
    }

    pub fn leaf_rows(&self, leaf: u32) -> (&[u64], u32) {
        match &self.nodes[leaf as usize] {
            Node::Leaf { rows, next } => (rows, *next),
            Node::Inner { .. } => unreachable!("cursor on inner node"),
        }
    }

    /// First position whose row is not `Less` under `f` (the row compared
    /// against a target). `f` must be monotone over the sort order.
    pub fn lower_bound<F: Fn(&[u64]) -> Ordering>(&self, f: F) -> Cursor {
        self.descend(|row| f(row) == Ordering::Less)
    }

    /// First position whose row is `Greater` under `f`.
    pub fn upper_bound<F: Fn(&[u64]) -> Ordering>(&self, f: F) -> Cursor {
        self.descend(|row| f(row) != Ordering::Greater)
    }

    /// Cursors delimiting the rows equal under `f`. A miss costs one
    /// descent, and a range ending inside its first leaf is closed there.
    pub fn equal_range<F: Fn(&[u64]) -> Ordering>(&self, f: F) -> (Cursor, Cursor) {
        let w = self.width;
        let (mut leaf, mut pos) = self.lower_bound(&f);
        loop {
            if leaf == NIL {
                return ((NIL, 0), (NIL, 0));
            }
            let (rows, next) = self.leaf_rows(leaf);
            if pos * w < rows.len() {
                if f(&rows[pos * w..(pos + 1) * w]) != Ordering::Equal {
                    return ((leaf, pos), (leaf, pos));
                }
                let end = pos + partition_point(&rows[pos * w..], w, |r| f(r) != Ordering::Greater);
                if end * w < rows.len() {
                    return ((leaf, pos), (leaf, end));
                }
                return ((leaf, pos), self.upper_bound(&f));
            }
            (leaf, pos) = (next, 0);
        }
    }

    fn descend<P: Fn(&[u64]) -> bool>(&self, before: P) -> Cursor {
        let w = self.width;
        let mut node = self.root;
        loop {
            match &self.nodes[node as usize] {
                Node::Inner { seps, children } => {
                    let j = partition_point(seps, w, &before);
                    node = children[j];
                }
                Node::Leaf { rows, .. } => {
                    return (node, partition_point(rows, w, &before));
                }
            }
        }
    }

    pub fn begin(&self) -> Cursor {
        (self.first_leaf, 0)
    }

    pub fn end(&self) -> Cursor {
        (NIL, 0)
    }

    /// Bulk insert. An empty tree is built bottom-up from the sorted batch;
    /// otherwise the sorted batch is inserted row by row.
    pub fn bulk_load(&mut self, mut rows: Vec<u64>, layout: &Layout, store: &RowStore) {
        if rows.is_empty() {
            return;
        }
        sort_rows(&mut rows, self.width, layout.plain_rows(), false, |a, b| layout.cmp_rows(a, b, store));
        if self.len > 0 {
            for row in rows.chunks_exact(self.width) {
                self.insert(row, layout, store);
            }
            return;
        }
        self.build(&rows);
    }

    fn build(&mut self, rows: &[u64]) {
        let w = self.width;
        let n = rows.len() / w;
        self.nodes.clear();
        self.len = n;

        let per_leaf = self.leaf_cap;
        let leaf_count = n.div_ceil(per_leaf);
        let mut level: Vec<u32> = Vec::with_capacity(leaf_count);
        let mut mins: Vec<u64> = Vec::with_capacity(leaf_count * w);
        for (i, chunk) in rows.chunks(per_leaf * w).enumerate() {
            let mut v = Vec::with_capacity(self.leaf_cap * w);
            v.extend_from_slice(chunk);
            let next = if i + 1 < leaf_count { (i + 1) as u32 } else { NIL };
            mins.extend_from_slice(&chunk[..w]);
            level.push(self.new_leaf(v, next));
        }
        self.first_leaf = level[0];

        while level.len() > 1 {
            let mut up = Vec::with_capacity(level.len().div_ceil(self.inner_cap));
            let mut up_mins = Vec::with_capacity(up.capacity() * w);
            for (g, group) in level.chunks(self.inner_cap).enumerate() {
                let base = g * self.inner_cap;
                let mut seps = Vec::with_capacity((self.inner_cap - 1) * w);
                for k in 1..group.len() {
                    seps.extend_from_slice(&mins[(base + k) * w..(base + k + 1) * w]);
                }
                let mut children = Vec::with_capacity(self.inner_cap);
                children.extend_from_slice(group);
                up_mins.extend_from_slice(&mins[base * w..(base + 1) * w]);
                self.nodes.push(Node::Inner { seps, children });
                up.push((self.nodes.len() - 1) as u32);
            }
            level = up;
            mins = up_mins;
        }
        self.root = level[0];
    }

    pub fn insert(&mut self, row: &[u64], layout: &Layout, store: &RowStore) {
        let w = self.width;
        let mut path: Vec<(u32, usize)> = Vec::new();
        let mut node = self.root;
        loop {
            match &self.nodes[node as usize] {
                Node::Inner { seps, children } => {
                    let j = partition_point(seps, w, |s| layout.cmp_rows(s, row, store) != Ordering::Greater);
                    path.push((node, j));
                    node = children[j];
                }
                Node::Leaf { .. } => break,
            }
        }
        let leaf_cap = self.leaf_cap;
        let split = {
            let Node::Leaf { rows, next } = &mut self.nodes[node as usize] else { unreachable!() };
            let pos = partition_point(rows, w, |r| layout.cmp_rows(r, row, store) != Ordering::Greater);
            if rows.capacity() == 0 {
                rows.reserve_exact(leaf_cap * w);
            }
            rows.extend_from_slice(row);
            rows[pos * w..].rotate_right(w);
            if rows.len() / w > leaf_cap {
                let mid = rows.len() / w / 2;
                let mut right = Vec::with_capacity(leaf_cap * w);
                right.extend_from_slice(&rows[mid * w..]);
                rows.truncate(mid * w);
                Some((right, *next))
            } else {
                None
            }
        };
        self.len += 1;
        let Some((right, old_next)) = split else { return };
        let sep = right[..w].to_vec();
        let right_id = self.new_leaf(right, old_next);
        if let Node::Leaf { next, .. } = &mut self.nodes[node as usize] {
            *next = right_id;
        }
        self.insert_up(path, sep, right_id);
    }

    fn insert_up(&mut self, mut path: Vec<(u32, usize)>, mut sep: Vec<u64>, mut right: u32) {
        let w = self.width;
        let inner_cap = self.inner_cap;
        while let Some((node, j)) = path.pop() {
            let split = {
                let Node::Inner { seps, children } = &mut self.nodes[node as usize] else { unreachable!() };
                seps.splice(j * w..j * w, sep.iter().copied());
                children.insert(j + 1, right);
                if children.len() > inner_cap {
                    let mid = children.len() / 2;
                    let right_children = children.split_off(mid);
                    let promoted = seps[(mid - 1) * w..mid * w].to_vec();
                    let right_seps = seps[mid * w..].to_vec();
                    seps.truncate((mid - 1) * w);
                    Some((promoted, right_seps, right_children))
                } else {
                    None
                }
            };
            let Some((promoted, right_seps, right_children)) = split else { return };
            self.nodes.push(Node::Inner { seps: right_seps, children: right_children });
            sep = promoted;
            right = (self.nodes.len() - 1) as u32;
        }
        // The root split.
        let old_root = self.root;
        self.nodes.push(Node::Inner { seps: sep, children: vec![old_root, right] });
        self.root = (self.nodes.len() - 1) as u32;
    }

    fn locate(&self, t: &[u64], pick: Option<TupleRef>, layout: &Layout, store: &RowStore) -> Option<Cursor> {
        let w = self.width;
        let (mut leaf, mut pos) = self.lower_bound(|row| layout.cmp_seek(row, t, store));
        while leaf != NIL {
            let (rows, next) = self.leaf_rows(leaf);
            while pos * w < rows.len() {
                let row = &rows[pos * w..(pos + 1) * w];
                if layout.cmp_seek(row, t, store) != Ordering::Equal {
                    return None;
                }
                let hit = match pick {
                    Some(r) => layout.row_ref(row) == Some(r),
                    None => layout.row_is(row, t, store),
                };
                if hit {
                    return Some((leaf, pos));
                }
                pos += 1;
            }
            leaf = next;
            pos = 0;
        }
        None
    }

    pub fn contains(&self, t: &[u64], layout: &Layout, store: &RowStore) -> bool {
        self.locate(t, None, layout, store).is_some()
    }

    /// Removes one entry (leaves may become under-full; no rebalancing).
    pub fn remove(
        &mut self,
        t: &[u64],
        pick: Option<TupleRef>,
        layout: &Layout,
        store: &RowStore,
    ) -> Option<Option<TupleRef>> {
        let (leaf, pos) = self.locate(t, pick, layout, store)?;
        let w = self.width;
        let Node::Leaf { rows, .. } = &mut self.nodes[leaf as usize] else { unreachable!() };
        let r = layout.row_ref(&rows[pos * w..(pos + 1) * w]);
        rows.drain(pos * w..(pos + 1) * w);
        self.len -= 1;
        Some(r)
    }

    pub fn width(&self) -> usize {
        self.width
    }
}
