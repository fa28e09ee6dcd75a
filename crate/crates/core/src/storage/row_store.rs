//! Chunked tuple store with stable tuple addresses.
//!
//! Tuples are packed into fixed-capacity chunks of [`CHUNK_BYTES`]. A chunk
//! is allocated once at full capacity and never grows, so a [`TupleRef`]
//! (and the address it resolves to) stays valid for the life of the store.

use std::mem::size_of;

pub const CHUNK_BYTES: usize = 2 * 1024 * 1024;

/// Position of a tuple inside a [`RowStore`]: chunk index and slot within
/// the chunk, packed into one word so indexes can store it inline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TupleRef(u64);

impl TupleRef {
    pub fn new(chunk: u32, slot: u32) -> Self {
        TupleRef(((chunk as u64) << 32) | slot as u64)
    }

    pub fn chunk(self) -> u32 {
        (self.0 >> 32) as u32
    }

    pub fn slot(self) -> u32 {
        self.0 as u32
    }

    pub fn to_word(self) -> u64 {
        self.0
    }

    pub fn from_word(w: u64) -> Self {
        TupleRef(w)
    }
}

#[derive(Debug)]
pub struct RowStore {
    arity: usize,
    per_chunk: usize,
    chunks: Vec<Vec<u64>>,
    len: usize,
    // One bit per slot, allocated on first removal.
    removed: Vec<u64>,
    removed_count: usize,
}

impl RowStore {
    pub fn new(arity: usize) -> Self {
        assert!(arity > 0, "row store arity must be positive");
        RowStore {
            arity,
            per_chunk: (CHUNK_BYTES / (8 * arity)).max(1),
            chunks: Vec::new(),
            len: 0,
            removed: Vec::new(),
            removed_count: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples_per_chunk(&self) -> usize {
        self.per_chunk
    }

    /// Number of live tuples.
    pub fn len(&self) -> usize {
        self.len - self.removed_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    pub fn push(&mut self, t: &[u64]) -> TupleRef {
        debug_assert_eq!(t.len(), self.arity);
        let slot = self.len % self.per_chunk;
        if slot == 0 {
            self.chunks.push(Vec::with_capacity(self.per_chunk * self.arity));
        }
        let chunk = self.chunks.len() - 1;
        self.chunks[chunk].extend_from_slice(t);
        self.len += 1;
        TupleRef::new(chunk as u32, slot as u32)
    }

    #[inline]
    pub fn get(&self, r: TupleRef) -> &[u64] {
        let start = r.slot() as usize * self.arity;
        &self.chunks[r.chunk() as usize][start..start + self.arity]
    }

    #[inline]
    pub fn get_word(&self, w: u64) -> &[u64] {
        self.get(TupleRef::from_word(w))
    }

    fn ordinal(&self, r: TupleRef) -> usize {
        r.chunk() as usize * self.per_chunk + r.slot() as usize
    }

    pub fn is_removed(&self, r: TupleRef) -> bool {
        if self.removed.is_empty() {
            return false;
        }
        let i = self.ordinal(r);
        self.removed[i / 64] & (1 << (i % 64)) != 0
    }

    /// Marks a tuple as removed. Its slot is not reused, so other references
    /// stay valid; scans skip it.
    pub fn remove(&mut self, r: TupleRef) {
        let i = self.ordinal(r);
        if i >= self.len {
            return;
        }
        let words = self.len.div_ceil(64);
        if self.removed.len() < words {
            self.removed.resize(words, 0);
        }
        let bit = 1 << (i % 64);
        if self.removed[i / 64] & bit == 0 {
            self.removed[i / 64] |= bit;
            self.removed_count += 1;
        }
    }

    /// Live tuples in insertion order together with their references.
    pub fn iter(&self) -> RowStoreIter<'_> {
        RowStoreIter { store: self, next: 0 }
    }

    /// Bytes held: full chunk capacities plus the chunk list and the
    /// removal bitmap.
    pub fn memory_footprint(&self) -> usize {
        self.chunks.iter().map(|c| c.capacity() * 8).sum::<usize>()
            + self.chunks.capacity() * size_of::<Vec<u64>>()
            + self.removed.capacity() * 8
    }
}

pub struct RowStoreIter<'a> {
    store: &'a RowStore,
    next: usize,
}

impl<'a> Iterator for RowStoreIter<'a> {
    type Item = (TupleRef, &'a [u64]);

    fn next(&mut self) -> Option<Self::Item> {
        while self.next < self.store.len {
            let i = self.next;
            self.next += 1;
            let r = TupleRef::new((i / self.store.per_chunk) as u32, (i % self.store.per_chunk) as u32);
            if !self.store.is_removed(r) {
                return Some((r, self.store.get(r)));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_get_and_chunking() {
        let mut s = RowStore::new(2);
        assert_eq!(s.tuples_per_chunk(), CHUNK_BYTES / 16);
        let r0 = s.push(&[1, 2]);
        let r1 = s.push(&[3, 4]);
        assert_eq!(s.get(r0), &[1, 2]);
        assert_eq!(s.get(r1), &[3, 4]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().map(|(_, t)| t.to_vec()).collect::<Vec<_>>(), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn removal_skips_in_scans() {
        let mut s = RowStore::new(1);
        let refs: Vec<_> = (0..5).map(|v| s.push(&[v])).collect();
        s.remove(refs[2]);
        s.remove(refs[2]);
        assert_eq!(s.len(), 4);
        let live: Vec<u64> = s.iter().map(|(_, t)| t[0]).collect();
        assert_eq!(live, vec![0, 1, 3, 4]);
        assert_eq!(s.get(refs[4]), &[4]);
    }

    #[test]
    fn million_pairs_footprint() {
        let mut s = RowStore::new(2);
        for i in 0..1_000_000u64 {
            s.push(&[i, i]);
        }
        let fp = s.memory_footprint();
        assert!(fp >= 16_000_000);
        assert!(fp <= 16_000_000 + CHUNK_BYTES);
    }
}
