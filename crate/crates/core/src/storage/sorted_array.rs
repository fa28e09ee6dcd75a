//! Sorted array of index rows with an unsorted append tail (SA), and the
//! deferred-dedup variant (SA++), which stops answering `contains` from the
//! tail and instead removes duplicates when an append sequence finishes.

use std::cmp::Ordering;

use super::layout::{dedup_rows, partition_point, sort_rows, Layout};
use super::row_store::{RowStore, TupleRef, CHUNK_BYTES};

#[derive(Debug)]
pub(crate) struct SortedArray {
    rows: Vec<u64>,
    width: usize,
    // Words in the sorted prefix; everything after is the append tail.
    sorted: usize,
    dedup: bool,
}

impl SortedArray {
    pub fn new(width: usize, dedup: bool) -> Self {
        SortedArray { rows: Vec::new(), width, sorted: 0, dedup }
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.width
    }

    pub fn footprint(&self) -> usize {
        self.rows.capacity() * 8
    }

    pub fn sorted_rows(&self) -> &[u64] {
        &self.rows[..self.sorted]
    }

    pub fn tail_rows(&self) -> &[u64] {
        &self.rows[self.sorted..]
    }

    pub fn all_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn scans_tail(&self) -> bool {
        !self.dedup
    }

    // Amortized doubling; at or above one chunk the capacity is kept a
    // multiple of the chunk size.
    fn reserve(&mut self, extra: usize) {
        let need = self.rows.len() + extra;
        if need <= self.rows.capacity() {
            return;
        }
        let chunk = CHUNK_BYTES / 8;
        let mut target = need.max(2 * self.rows.capacity());
        if target >= chunk {
            target = target.div_ceil(chunk) * chunk;
        }
        self.rows.reserve_exact(target - self.rows.len());
    }

    fn sort(&mut self, layout: &Layout, store: &RowStore, stable: bool) {
        let plain = layout.plain_rows() && !(self.dedup && layout.access == super::AccessType::UKI);
        if self.dedup {
            sort_rows(&mut self.rows, self.width, plain, stable, |a, b| layout.cmp_rows_dedup(a, b, store));
        } else {
            sort_rows(&mut self.rows, self.width, plain, stable, |a, b| layout.cmp_rows(a, b, store));
        }
    }

    pub fn bulk_load(&mut self, new_rows: &[u64], layout: &Layout, store: &RowStore) {
        if new_rows.is_empty() {
            return;
        }
        self.reserve(new_rows.len());
        let had_sorted = self.sorted > 0;
        self.rows.extend_from_slice(new_rows);
        // A stable sort over two sorted runs degenerates into a merge.
        if had_sorted {
            sort_rows(&mut self.rows[self.sorted..], self.width, layout.plain_rows(), false, |a, b| {
                layout.cmp_rows(a, b, store)
            });
        }
        self.sort(layout, store, had_sorted);
        self.sorted = self.rows.len();
    }

    /// As [`bulk_load`](Self::bulk_load), taking over `rows` as the array
    /// when empty.
    pub fn bulk_load_owned(&mut self, rows: Vec<u64>, layout: &Layout, store: &RowStore) {
        if !self.rows.is_empty() {
            return self.bulk_load(&rows, layout, store);
        }
        self.rows = rows;
        self.sort(layout, store, false);
        self.sorted = self.rows.len();
    }

    pub fn append(&mut self, row: &[u64]) {
        self.reserve(row.len());
        self.rows.extend_from_slice(row);
    }

    pub fn finished_append(&mut self, layout: &Layout, store: &RowStore) {
        if self.sorted == self.rows.len() && !self.dedup {
            return;
        }
        if self.sorted < self.rows.len() {
            let w = self.width;
            let start = self.sorted;
            if self.dedup {
                sort_rows(&mut self.rows[start..], w, false, false, |a, b| layout.cmp_rows_dedup(a, b, store));
            } else {
                sort_rows(&mut self.rows[start..], w, layout.plain_rows(), false, |a, b| {
                    layout.cmp_rows(a, b, store)
                });
            }
            self.sort(layout, store, start > 0);
        }
        if self.dedup {
            let kept = dedup_rows(&mut self.rows, self.width, |a, b| {
                layout.tuple(a, store) == layout.tuple(b, store)
            });
            self.rows.truncate(kept);
        }
        self.sorted = self.rows.len();
    }

    fn seek(&self, t: &[u64], layout: &Layout, store: &RowStore) -> usize {
        partition_point(self.sorted_rows(), self.width, |row| {
            layout.cmp_seek(row, t, store) == Ordering::Less
        })
    }

    /// Row index (over the whole array) of the first entry holding `t`.
    fn find(&self, t: &[u64], pick: Option<TupleRef>, layout: &Layout, store: &RowStore, tail: bool) -> Option<usize> {
        let w = self.width;
        let matches = |row: &[u64]| match pick {
            Some(r) => layout.row_ref(row) == Some(r),
            None => layout.row_is(row, t, store),
        };
        let sorted_rows = self.sorted / w;
        let mut i = self.seek(t, layout, store);
        while i < sorted_rows {
            let row = &self.rows[i * w..(i + 1) * w];
            if layout.cmp_seek(row, t, store) != Ordering::Equal {
                break;
            }
            if matches(row) {
                return Some(i);
            }
            i += 1;
        }
        if tail {
            for (j, row) in self.tail_rows().chunks_exact(w).enumerate() {
                if matches(row) {
                    return Some(sorted_rows + j);
                }
            }
        }
        None
    }

    pub fn contains(&self, t: &[u64], layout: &Layout, store: &RowStore) -> bool {
        self.find(t, None, layout, store, !self.dedup).is_some()
    }

    /// Sorted-region row range whose key prefix equals `prefix`.
    pub fn range(&self, prefix: &[u64], layout: &Layout, store: &RowStore) -> &[u64] {
        let rows = self.sorted_rows();
        let w = self.width;
        let lo = partition_point(rows, w, |row| layout.cmp_prefix(row, prefix, store) == Ordering::Less);
        let hi = lo
            + partition_point(&rows[lo * w..], w, |row| {
                layout.cmp_prefix(row, prefix, store) != Ordering::Greater
            });
        &rows[lo * w..hi * w]
    }

    /// Removes one entry for `t` (or exactly the entry referencing `pick`).
    /// Returns the removed entry's tuple reference, if any entry was removed.
    pub fn remove(
        &mut self,
        t: &[u64],
        pick: Option<TupleRef>,
        layout: &Layout,
        store: &RowStore,
    ) -> Option<Option<TupleRef>> {
        let i = self.find(t, pick, layout, store, true)?;
        let w = self.width;
        let r = layout.row_ref(&self.rows[i * w..(i + 1) * w]);
        self.rows.drain(i * w..(i + 1) * w);
        if i * w < self.sorted {
            self.sorted -= w;
        }
        Some(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storage::{AccessType, IndexKey};

    fn ci(arity: usize, key: &[usize]) -> Layout {
        Layout::new(AccessType::CI, arity, Some(&IndexKey::new(key.to_vec()).unwrap()))
    }

    #[test]
    fn tail_semantics_differ_between_variants() {
        let l = ci(1, &[0]);
        let store = RowStore::new(1);
        let mut sa = SortedArray::new(1, false);
        let mut sapp = SortedArray::new(1, true);
        for s in [&mut sa, &mut sapp] {
            s.bulk_load(&[1], &l, &store);
            s.append(&[2]);
        }
        assert!(sa.contains(&[2], &l, &store));
        assert!(!sapp.contains(&[2], &l, &store));
        assert!(sapp.contains(&[1], &l, &store));
    }

    #[test]
    fn sapp_dedups_on_finish() {
        let l = ci(1, &[0]);
        let store = RowStore::new(1);
        let mut s = SortedArray::new(1, true);
        for v in [5, 3, 5, 3] {
            s.append(&[v]);
        }
        s.finished_append(&l, &store);
        assert_eq!(s.all_rows(), &[3, 5]);
    }

    #[test]
    fn bulk_merge_keeps_order_and_duplicates() {
        let l = ci(2, &[0]);
        let store = RowStore::new(2);
        let mut s = SortedArray::new(2, false);
        s.bulk_load(&[3, 0, 1, 0, 2, 0], &l, &store);
        assert_eq!(s.all_rows(), &[1, 0, 2, 0, 3, 0]);
        s.bulk_load(&[2, 0, 0, 9], &l, &store);
        assert_eq!(s.all_rows(), &[0, 9, 1, 0, 2, 0, 2, 0, 3, 0]);
        assert_eq!(s.range(&[2], &l, &store), &[2, 0, 2, 0]);
        assert!(s.range(&[7], &l, &store).is_empty());
    }

    #[test]
    fn remove_one_occurrence() {
        let l = ci(1, &[0]);
        let store = RowStore::new(1);
        let mut s = SortedArray::new(1, false);
        s.bulk_load(&[1, 1], &l, &store);
        assert!(s.remove(&[1], None, &l, &store).is_some());
        assert_eq!(s.all_rows(), &[1]);
        assert!(s.remove(&[4], None, &l, &store).is_none());
    }

    #[test]
    fn growth_rounds_to_chunks_for_large_loads() {
        let l = ci(2, &[0]);
        let store = RowStore::new(2);
        let mut s = SortedArray::new(2, false);
        let data: Vec<u64> = (0..1_000_000u64).flat_map(|i| [i, i]).collect();
        s.bulk_load(&data, &l, &store);
        assert!(s.footprint() >= 16_000_000);
        assert!(s.footprint() <= 16_000_000 + CHUNK_BYTES);
    }
}
