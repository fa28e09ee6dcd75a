//! Open-addressing hash multimap with linear probing.
//!
//! Each occupied slot holds one distinct key and a growable payload list:
//! full tuples for covered indexes, tuple references otherwise. The table
//! doubles whenever an insertion of a new key would push the load factor
//! above one half. Deletion uses backward shifting, so there are no
//! tombstones.

use std::mem::size_of;

use super::key::AccessType;
use super::layout::Layout;
use super::row_store::{RowStore, TupleRef};

const MAX_LOAD_NUM: usize = 1;
const MAX_LOAD_DEN: usize = 2;
const MIN_CAPACITY: usize = 16;

/// MurmurHash64A over the big-endian encoding of `values`.
pub(crate) fn hash_values(values: &[u64]) -> u64 {
    const M: u64 = 0xc6a4_a793_5bd1_e995;
    const R: u32 = 47;
    let seed: u64 = 0x9747_b28c;
    let mut h = seed ^ ((values.len() as u64 * 8).wrapping_mul(M));
    for v in values {
        // The algorithm reads little-endian blocks; the key bytes are the
        // big-endian encoding of each value.
        let mut k = v.swap_bytes();
        k = k.wrapping_mul(M);
        k ^= k >> R;
        k = k.wrapping_mul(M);
        h ^= k;
        h = h.wrapping_mul(M);
    }
    h ^= h >> R;
    h = h.wrapping_mul(M);
    h ^= h >> R;
    h
}

#[derive(Debug)]
pub(crate) struct HashIndex {
    // Slot keys: key values for CI/UKI, a representative reference for UPI.
    keys: Vec<u64>,
    // Empty list marks a vacant slot.
    vals: Vec<Vec<u64>>,
    key_words: usize,
    payload: usize,
    occupied: usize,
    len: usize,
}

impl HashIndex {
    pub fn new(layout: &Layout) -> Self {
        let (key_words, payload) = match layout.access {
            AccessType::UPI => (1, 1),
            AccessType::UKI => (layout.key_len(), 1),
            _ => (layout.key_len(), layout.arity),
        };
        HashIndex { keys: Vec::new(), vals: Vec::new(), key_words, payload, occupied: 0, len: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn capacity(&self) -> usize {
        self.vals.len()
    }

    pub fn occupied(&self) -> usize {
        self.occupied
    }

    /// Words per payload entry: the arity for CI, one reference otherwise.
    pub fn payload_width(&self) -> usize {
        self.payload
    }

    pub fn footprint(&self) -> usize {
        self.keys.capacity() * 8
            + self.vals.capacity() * size_of::<Vec<u64>>()
            + self.vals.iter().map(|v| v.capacity() * 8).sum::<usize>()
    }

    pub fn slots(&self) -> &[Vec<u64>] {
        &self.vals
    }

    #[inline]
    fn slot_matches(&self, i: usize, kv: &[u64], layout: &Layout, store: &RowStore) -> bool {
        let kw = self.key_words;
        if layout.access == AccessType::UPI {
            let t = store.get_word(self.keys[i]);
            layout.key.iter().zip(kv).all(|(&a, &v)| t[a] == v)
        } else {
            &self.keys[i * kw..(i + 1) * kw] == kv
        }
    }

    fn slot_hash(&self, i: usize, layout: &Layout, store: &RowStore) -> u64 {
        let kw = self.key_words;
        if layout.access == AccessType::UPI {
            let t = store.get_word(self.keys[i]);
            let mut kv = smallvec::SmallVec::<[u64; 8]>::new();
            kv.extend(layout.key.iter().map(|&a| t[a]));
            hash_values(&kv)
        } else {
            hash_values(&self.keys[i * kw..(i + 1) * kw])
        }
    }

    /// Ok(slot) if the key is present, Err(first vacant slot) otherwise.
    fn find(&self, kv: &[u64], layout: &Layout, store: &RowStore) -> Result<usize, usize> {
        let cap = self.vals.len();
        debug_assert!(cap > 0);
        let mask = cap - 1;
        let mut i = hash_values(kv) as usize & mask;
        loop {
            if self.vals[i].is_empty() {
                return Err(i);
            }
            if self.slot_matches(i, kv, layout, store) {
                return Ok(i);
            }
            i = (i + 1) & mask;
        }
    }

    /// Payload entries stored under exactly these key values.
    pub fn get(&self, kv: &[u64], layout: &Layout, store: &RowStore) -> &[u64] {
        if self.occupied == 0 {
            return &[];
        }
        match self.find(kv, layout, store) {
            Ok(i) => &self.vals[i],
            Err(_) => &[],
        }
    }

    fn grow(&mut self, layout: &Layout, store: &RowStore) {
        let new_cap = (self.vals.len() * 2).max(MIN_CAPACITY);
        let kw = self.key_words;
        let old_keys = std::mem::replace(&mut self.keys, vec![0; new_cap * kw]);
        let old_vals = std::mem::replace(&mut self.vals, (0..new_cap).map(|_| Vec::new()).collect());
        let mask = new_cap - 1;
        for (j, v) in old_vals.into_iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let key = &old_keys[j * kw..(j + 1) * kw];
            let h = if layout.access == AccessType::UPI {
                let t = store.get_word(key[0]);
                let kv: smallvec::SmallVec<[u64; 8]> = layout.key.iter().map(|&a| t[a]).collect();
                hash_values(&kv)
            } else {
                hash_values(key)
            };
            let mut i = h as usize & mask;
            while !self.vals[i].is_empty() {
                i = (i + 1) & mask;
            }
            self.keys[i * kw..(i + 1) * kw].copy_from_slice(key);
            self.vals[i] = v;
        }
    }

    pub fn insert(&mut self, t: &[u64], r: Option<TupleRef>, layout: &Layout, store: &RowStore) {
        let mut kv = smallvec::SmallVec::<[u64; 8]>::new();
        kv.extend(layout.key.iter().map(|&a| t[a]));
        if (self.occupied + 1) * MAX_LOAD_DEN > self.vals.len() * MAX_LOAD_NUM {
            let present = self.occupied > 0 && self.find(&kv, layout, store).is_ok();
            if !present {
                self.grow(layout, store);
            }
        }
        let i = match self.find(&kv, layout, store) {
            Ok(i) => i,
            Err(i) => {
                let kw = self.key_words;
                if layout.access == AccessType::UPI {
                    self.keys[i] = r.expect("UPI entry needs a tuple reference").to_word();
                } else {
                    self.keys[i * kw..(i + 1) * kw].copy_from_slice(&kv);
                }
                self.occupied += 1;
                i
            }
        };
        match layout.access {
            AccessType::CI | AccessType::FS => self.vals[i].extend_from_slice(t),
            _ => self.vals[i].push(r.expect("unclustered entry needs a tuple reference").to_word()),
        }
        self.len += 1;
    }

    pub fn contains(&self, t: &[u64], layout: &Layout, store: &RowStore) -> bool {
        let kv: smallvec::SmallVec<[u64; 8]> = layout.key.iter().map(|&a| t[a]).collect();
        let p = self.payload;
        self.get(&kv, layout, store).chunks_exact(p).any(|e| match layout.access {
            AccessType::CI | AccessType::FS => e == t,
            _ => store.get_word(e[0]) == t,
        })
    }

    pub fn remove(
        &mut self,
        t: &[u64],
        pick: Option<TupleRef>,
        layout: &Layout,
        store: &RowStore,
    ) -> Option<Option<TupleRef>> {
        if self.occupied == 0 {
            return None;
        }
        let kv: smallvec::SmallVec<[u64; 8]> = layout.key.iter().map(|&a| t[a]).collect();
        let i = self.find(&kv, layout, store).ok()?;
        let p = self.payload;
        let pos = self.vals[i].chunks_exact(p).position(|e| match (layout.access, pick) {
            (AccessType::CI | AccessType::FS, _) => e == t,
            (_, Some(r)) => e[0] == r.to_word(),
            (_, None) => store.get_word(e[0]) == t,
        })?;
        let removed = match layout.access {
            AccessType::CI | AccessType::FS => None,
            _ => Some(TupleRef::from_word(self.vals[i][pos])),
        };
        self.vals[i].drain(pos * p..(pos + 1) * p);
        self.len -= 1;
        if self.vals[i].is_empty() {
            self.vals[i] = Vec::new();
            self.delete_slot(i, layout, store);
        } else if layout.access == AccessType::UPI && Some(TupleRef::from_word(self.keys[i])) == removed {
            // The representative reference may be tombstoned later; keep
            // one that is still listed under this key.
            self.keys[i] = self.vals[i][0];
        }
        Some(removed)
    }

    fn delete_slot(&mut self, i: usize, layout: &Layout, store: &RowStore) {
        let cap = self.vals.len();
        let mask = cap - 1;
        let kw = self.key_words;
        let mut hole = i;
        let mut j = (i + 1) & mask;
        while !self.vals[j].is_empty() {
            let home = self.slot_hash(j, layout, store) as usize & mask;
            if (j.wrapping_sub(home) & mask) >= (j.wrapping_sub(hole) & mask) {
                let v = std::mem::take(&mut self.vals[j]);
                self.vals[hole] = v;
                self.keys.copy_within(j * kw..(j + 1) * kw, hole * kw);
                hole = j;
            }
            j = (j + 1) & mask;
        }
        self.occupied -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::IndexKey;

    #[test]
    fn six_tuples_need_twelve_slots() {
        let l = Layout::new(AccessType::CI, 2, Some(&IndexKey::new(vec![0]).unwrap()));
        let store = RowStore::new(2);
        let mut h = HashIndex::new(&l);
        for i in 0..6 {
            h.insert(&[i, i], None, &l, &store);
        }
        assert!(h.capacity() >= 12);
        assert!(h.occupied() * 2 <= h.capacity());
        assert_eq!(h.get(&[3], &l, &store), &[3, 3]);
    }

    #[test]
    fn duplicates_share_a_slot() {
        let l = Layout::new(AccessType::CI, 2, Some(&IndexKey::new(vec![0]).unwrap()));
        let store = RowStore::new(2);
        let mut h = HashIndex::new(&l);
        h.insert(&[1, 2], None, &l, &store);
        h.insert(&[1, 3], None, &l, &store);
        h.insert(&[1, 2], None, &l, &store);
        assert_eq!(h.occupied(), 1);
        assert_eq!(h.len(), 3);
        assert!(h.remove(&[1, 2], None, &l, &store).is_some());
        assert_eq!(h.get(&[1], &l, &store), &[1, 3, 1, 2]);
    }

    #[test]
    fn removal_keeps_probe_chains_intact() {
        let l = Layout::new(AccessType::CI, 1, Some(&IndexKey::full(1)));
        let store = RowStore::new(1);
        let mut h = HashIndex::new(&l);
        for v in 0..200u64 {
            h.insert(&[v], None, &l, &store);
        }
        for v in (0..200u64).step_by(2) {
            assert!(h.remove(&[v], None, &l, &store).is_some());
        }
        for v in 0..200u64 {
            assert_eq!(h.contains(&[v], &l, &store), v % 2 == 1, "value {v}");
        }
        assert_eq!(h.occupied(), 100);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(hash_values(&[1, 2]), hash_values(&[1, 2]));
        assert_ne!(hash_values(&[1, 2]), hash_values(&[2, 1]));
    }
}
