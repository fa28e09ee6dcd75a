//! Index-entry layout shared by all indexed structures.
//!
//! Every structure stores fixed-width rows of words:
//!
//! * CI  — the full tuple, in attribute order;
//! * UKI — the key values followed by one [`TupleRef`] word;
//! * UPI — a single [`TupleRef`] word; comparisons dereference the store.
//!
//! Ordered structures sort rows by the key attributes followed by the
//! remaining attributes (UKI breaks key ties by reference instead, so it
//! never touches the store while sorting).

use std::cmp::Ordering;

use super::key::{AccessType, IndexKey};
use super::row_store::{RowStore, TupleRef};

#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub access: AccessType,
    pub arity: usize,
    pub key: Vec<usize>,
    pub order: Vec<usize>,
    pub width: usize,
    identity: bool,
}

impl Layout {
    pub fn new(access: AccessType, arity: usize, key: Option<&IndexKey>) -> Self {
        let key: Vec<usize> = match key {
            Some(k) => k.attrs().to_vec(),
            None => (0..arity).collect(),
        };
        let mut order = key.clone();
        order.extend((0..arity).filter(|a| !key.contains(a)));
        let identity = order.iter().enumerate().all(|(i, &a)| i == a);
        let width = match access {
            AccessType::CI | AccessType::FS => arity,
            AccessType::UKI => key.len() + 1,
            AccessType::UPI => 1,
        };
        Layout { access, arity, key, order, width, identity }
    }

    pub fn key_len(&self) -> usize {
        self.key.len()
    }

    /// True when plain lexicographic comparison of rows is the sort order.
    pub fn plain_rows(&self) -> bool {
        match self.access {
            AccessType::CI | AccessType::FS => self.identity,
            AccessType::UKI => true,
            AccessType::UPI => false,
        }
    }

    #[inline]
    pub fn tuple<'a>(&self, row: &'a [u64], store: &'a RowStore) -> &'a [u64] {
        match self.access {
            AccessType::CI | AccessType::FS => row,
            AccessType::UKI => store.get_word(row[self.key.len()]),
            AccessType::UPI => store.get_word(row[0]),
        }
    }

    #[inline]
    pub fn row_ref(&self, row: &[u64]) -> Option<TupleRef> {
        match self.access {
            AccessType::CI | AccessType::FS => None,
            AccessType::UKI => Some(TupleRef::from_word(row[self.key.len()])),
            AccessType::UPI => Some(TupleRef::from_word(row[0])),
        }
    }

    pub fn make_row(&self, t: &[u64], r: Option<TupleRef>, out: &mut Vec<u64>) {
        match self.access {
            AccessType::CI | AccessType::FS => out.extend_from_slice(t),
            AccessType::UKI => {
                out.extend(self.key.iter().map(|&a| t[a]));
                out.push(r.expect("UKI row needs a tuple reference").to_word());
            }
            AccessType::UPI => out.push(r.expect("UPI row needs a tuple reference").to_word()),
        }
    }

    /// Compares the first `probe.len()` key attributes of `row` with `probe`.
    #[inline]
    pub fn cmp_prefix(&self, row: &[u64], probe: &[u64], store: &RowStore) -> Ordering {
        match self.access {
            AccessType::UKI => row[..probe.len()].cmp(probe),
            AccessType::CI | AccessType::FS => {
                for (i, v) in probe.iter().enumerate() {
                    match row[self.key[i]].cmp(v) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
            AccessType::UPI => {
                let t = store.get_word(row[0]);
                for (i, v) in probe.iter().enumerate() {
                    match t[self.key[i]].cmp(v) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
        }
    }

    #[inline]
    fn cmp_tuples_ordered(&self, a: &[u64], b: &[u64]) -> Ordering {
        if self.identity {
            return a.cmp(b);
        }
        for &i in &self.order {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// The sort order of rows.
    #[inline]
    pub fn cmp_rows(&self, a: &[u64], b: &[u64], store: &RowStore) -> Ordering {
        match self.access {
            AccessType::CI | AccessType::FS => self.cmp_tuples_ordered(a, b),
            AccessType::UKI => a.cmp(b),
            AccessType::UPI => {
                self.cmp_tuples_ordered(store.get_word(a[0]), store.get_word(b[0]))
            }
        }
    }

    /// Sort order used when duplicates must end up adjacent: for UKI the
    /// key ties are broken by the dereferenced tuple.
    #[inline]
    pub fn cmp_rows_dedup(&self, a: &[u64], b: &[u64], store: &RowStore) -> Ordering {
        match self.access {
            AccessType::UKI => {
                let k = self.key.len();
                a[..k].cmp(&b[..k]).then_with(|| {
                    self.cmp_tuples_ordered(store.get_word(a[k]), store.get_word(b[k]))
                })
            }
            _ => self.cmp_rows(a, b, store),
        }
    }

    /// Seek comparator for locating `t`: CI and UPI compare the whole tuple
    /// in sort order; UKI can only compare the key.
    #[inline]
    pub fn cmp_seek(&self, row: &[u64], t: &[u64], store: &RowStore) -> Ordering {
        match self.access {
            AccessType::CI | AccessType::FS => self.cmp_tuples_ordered(row, t),
            AccessType::UPI => self.cmp_tuples_ordered(store.get_word(row[0]), t),
            AccessType::UKI => {
                for (i, &a) in self.key.iter().enumerate() {
                    match row[i].cmp(&t[a]) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                Ordering::Equal
            }
        }
    }

    #[inline]
    pub fn row_is(&self, row: &[u64], t: &[u64], store: &RowStore) -> bool {
        self.tuple(row, store) == t
    }
}

/// Sorts a flat buffer of `width`-word rows.
pub(crate) fn sort_rows<F>(data: &mut [u64], width: usize, plain: bool, stable: bool, cmp: F)
where
    F: Fn(&[u64], &[u64]) -> Ordering,
{
    macro_rules! fixed {
        ($($n:literal),*) => {
            match width {
                $($n => {
                    let (rows, rest) = data.as_chunks_mut::<$n>();
                    debug_assert!(rest.is_empty());
                    match (plain, stable) {
                        (true, true) => rows.sort(),
                        (true, false) => rows.sort_unstable(),
                        (false, true) => rows.sort_by(|a, b| cmp(a, b)),
                        (false, false) => rows.sort_unstable_by(|a, b| cmp(a, b)),
                    }
                    return;
                })*
                _ => {}
            }
        };
    }
    fixed!(1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16);

    // Wide rows: sort a permutation and gather.
    let n = data.len() / width;
    let mut idx: Vec<usize> = (0..n).collect();
    let row = |i: usize| &data[i * width..(i + 1) * width];
    if stable {
        idx.sort_by(|&a, &b| if plain { row(a).cmp(row(b)) } else { cmp(row(a), row(b)) });
    } else {
        idx.sort_unstable_by(|&a, &b| if plain { row(a).cmp(row(b)) } else { cmp(row(a), row(b)) });
    }
    let mut out = Vec::with_capacity(data.len());
    for i in idx {
        out.extend_from_slice(&data[i * width..(i + 1) * width]);
    }
    data.copy_from_slice(&out);
}

/// Removes adjacent rows for which `same` holds, keeping the first; returns
/// the number of words kept.
pub(crate) fn dedup_rows<F>(data: &mut [u64], width: usize, same: F) -> usize
where
    F: Fn(&[u64], &[u64]) -> bool,
{
    let n = data.len() / width;
    if n == 0 {
        return 0;
    }
    let mut kept = 1;
    for i in 1..n {
        let dup = {
            let prev = &data[(kept - 1) * width..kept * width];
            let cur = &data[i * width..(i + 1) * width];
            same(prev, cur)
        };
        if !dup {
            if kept != i {
                data.copy_within(i * width..(i + 1) * width, kept * width);
            }
            kept += 1;
        }
    }
    kept * width
}

/// First row index in `data[lo..hi)` for which `pred` is false, assuming
/// `pred` is true on a prefix.
#[inline]
pub(crate) fn partition_point<F>(data: &[u64], width: usize, mut pred: F) -> usize
where
    F: FnMut(&[u64]) -> bool,
{
    let (mut lo, mut hi) = (0usize, data.len() / width);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(&data[mid * width..(mid + 1) * width]) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sort_fixed_and_wide() {
        let mut d = vec![3, 0, 1, 9, 2, 5, 1, 1];
        sort_rows(&mut d, 2, true, false, |a, b| a.cmp(b));
        assert_eq!(d, vec![1, 1, 1, 9, 2, 5, 3, 0]);

        let width = 20;
        let mut wide = Vec::new();
        for r in [5u64, 1, 3] {
            wide.extend(std::iter::repeat_n(r, width));
        }
        sort_rows(&mut wide, width, false, false, |a, b| a.cmp(b));
        assert_eq!(wide[0], 1);
        assert_eq!(wide[width], 3);
        assert_eq!(wide[2 * width], 5);
    }

    #[test]
    fn permuted_order() {
        let k = IndexKey::new(vec![1]).unwrap();
        let l = Layout::new(AccessType::CI, 2, Some(&k));
        let store = RowStore::new(2);
        assert_eq!(l.order, vec![1, 0]);
        assert_eq!(l.cmp_rows(&[0, 2], &[5, 1], &store), Ordering::Greater);
        assert_eq!(l.cmp_prefix(&[7, 3], &[3], &store), Ordering::Equal);
    }

    #[test]
    fn dedup_adjacent() {
        let mut d = vec![1, 1, 1, 2, 2, 3, 3];
        let n = dedup_rows(&mut d, 1, |a, b| a == b);
        assert_eq!(&d[..n], &[1, 2, 3]);
    }
}
