//! Physical relation representations.
//!
//! A [`Relation`] bundles one or more representations of the same tuple
//! multiset. Covered representations (CI) hold tuples themselves; the
//! unclustered ones (UKI, UPI) and full scans (FS) share the relation's
//! [`RowStore`]. All structures tolerate duplicates; set semantics is left
//! to the evaluator.

mod btree;
mod hash_index;
mod key;
mod layout;
mod radix;
mod row_store;
mod sorted_array;

use std::mem::size_of;

use smallvec::SmallVec;
use thiserror::Error;

pub use key::{encode_key, AccessType, DataStructure, IndexKey, RepConfig};
pub use row_store::{RowStore, RowStoreIter, TupleRef, CHUNK_BYTES};

use btree::BTree;
use hash_index::HashIndex;
use key::encode_key_into;
use layout::Layout;
use radix::{RadixTree, Walk};
use sorted_array::SortedArray;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StorageError {
    #[error("invalid index key: {0}")]
    InvalidKey(String),
    #[error("{0}")]
    Parse(String),
    #[error("{access}-{ds} is not a supported combination")]
    InvalidCombination { access: AccessType, ds: DataStructure },
    #[error("hash index on {key_len} attributes cannot serve a probe on a {prefix_len}-attribute prefix")]
    PrefixProbeUnsupported { key_len: usize, prefix_len: usize },
    #[error("probe on {prefix_len} values exceeds the {key_len}-attribute key")]
    ProbeTooWide { key_len: usize, prefix_len: usize },
    #[error("append protocol violated: {0}")]
    AppendProtocol(String),
    #[error("tuple of arity {got} given to relation of arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("no representation #{0}")]
    UnknownRepresentation(usize),
    #[error("full-scan representation has no index key to probe")]
    NotIndexed,
}

#[derive(Debug)]
enum Structure {
    Sa(SortedArray),
    Bp(BTree),
    Ht(HashIndex),
    Rx(RadixTree),
    Fs,
}

/// One physical representation inside a [`Relation`].
#[derive(Debug)]
pub struct Representation {
    config: RepConfig,
    layout: Layout,
    structure: Structure,
}

impl Representation {
    fn new(config: RepConfig, arity: usize) -> Result<Self, StorageError> {
        config.validate(arity)?;
        let layout = Layout::new(config.access, arity, config.key.as_ref());
        let w = layout.width;
        let payload = if config.access == AccessType::CI { arity } else { 1 };
        let structure = match config.ds {
            DataStructure::SA => Structure::Sa(SortedArray::new(w, false)),
            DataStructure::SAPP => Structure::Sa(SortedArray::new(w, true)),
            DataStructure::BP => Structure::Bp(BTree::new(w)),
            DataStructure::HT => Structure::Ht(HashIndex::new(&layout)),
            DataStructure::RX => Structure::Rx(RadixTree::new(payload)),
            DataStructure::RS => Structure::Fs,
        };
        Ok(Representation { config, layout, structure })
    }

    pub fn config(&self) -> &RepConfig {
        &self.config
    }

    pub fn key(&self) -> Option<&IndexKey> {
        self.config.key.as_ref()
    }

    fn len(&self, store: &RowStore) -> usize {
        match &self.structure {
            Structure::Sa(s) => s.len(),
            Structure::Bp(b) => b.len(),
            Structure::Ht(h) => h.len(),
            Structure::Rx(r) => r.len(),
            Structure::Fs => store.len(),
        }
    }

    fn footprint(&self) -> usize {
        size_of::<Self>()
            + match &self.structure {
                Structure::Sa(s) => s.footprint(),
                Structure::Bp(b) => b.footprint(),
                Structure::Ht(h) => h.footprint(),
                Structure::Rx(r) => r.footprint(),
                Structure::Fs => 0,
            }
    }

    fn radix_payload(&self, t: &[u64], r: Option<TupleRef>) -> SmallVec<[u64; 8]> {
        match self.config.access {
            AccessType::CI => SmallVec::from_slice(t),
            _ => SmallVec::from_slice(&[r.expect("unclustered entry needs a tuple reference").to_word()]),
        }
    }

    fn insert(&mut self, t: &[u64], r: Option<TupleRef>, store: &RowStore, scratch: &mut Vec<u64>) {
        let layout = &self.layout;
        match &mut self.structure {
            Structure::Sa(s) => {
                scratch.clear();
                layout.make_row(t, r, scratch);
                s.append(scratch);
            }
            Structure::Bp(b) => {
                scratch.clear();
                layout.make_row(t, r, scratch);
                b.insert(scratch, layout, store);
            }
            Structure::Ht(h) => h.insert(t, r, layout, store),
            Structure::Rx(x) => {
                let mut kb = Vec::with_capacity(8 * layout.key_len());
                encode_key_into(t, &layout.key, &mut kb);
                let p = match self.config.access {
                    AccessType::CI => SmallVec::<[u64; 8]>::from_slice(t),
                    _ => SmallVec::from_slice(&[r.expect("unclustered entry needs a tuple reference").to_word()]),
                };
                x.insert(&kb, &p);
            }
            Structure::Fs => {}
        }
    }

    fn bulk(&mut self, tuples: &[u64], refs: &[TupleRef], store: &RowStore) {
        let arity = self.layout.arity;
        let n = tuples.len() / arity;
        let refs_at = |i: usize| refs.get(i).copied();
        match &mut self.structure {
            Structure::Sa(_) | Structure::Bp(_) => {
                let rows = if self.config.access == AccessType::CI {
                    tuples.to_vec()
                } else {
                    let mut rows = Vec::with_capacity(n * self.layout.width);
                    for i in 0..n {
                        self.layout.make_row(&tuples[i * arity..(i + 1) * arity], refs_at(i), &mut rows);
                    }
                    rows
                };
                match &mut self.structure {
                    Structure::Sa(s) => s.bulk_load_owned(rows, &self.layout, store),
                    Structure::Bp(b) => b.bulk_load(rows, &self.layout, store),
                    _ => unreachable!(),
                }
            }
            Structure::Ht(h) => {
                for i in 0..n {
                    h.insert(&tuples[i * arity..(i + 1) * arity], refs_at(i), &self.layout, store);
                }
            }
            Structure::Rx(_) => {
                for i in 0..n {
                    let t = &tuples[i * arity..(i + 1) * arity];
                    let p = self.radix_payload(t, refs_at(i));
                    let mut kb = Vec::with_capacity(8 * self.layout.key_len());
                    encode_key_into(t, &self.layout.key, &mut kb);
                    if let Structure::Rx(x) = &mut self.structure {
                        x.insert(&kb, &p);
                    }
                }
            }
            Structure::Fs => {}
        }
    }

    fn finished_append(&mut self, store: &RowStore) {
        if let Structure::Sa(s) = &mut self.structure {
            s.finished_append(&self.layout, store);
        }
    }

    fn contains(&self, t: &[u64], store: &RowStore) -> bool {
        let layout = &self.layout;
        match &self.structure {
            Structure::Sa(s) => s.contains(t, layout, store),
            Structure::Bp(b) => b.contains(t, layout, store),
            Structure::Ht(h) => h.contains(t, layout, store),
            Structure::Rx(x) => {
                let mut kb = Vec::with_capacity(8 * layout.key_len());
                encode_key_into(t, &layout.key, &mut kb);
                let w = x.payload_width();
                x.get(&kb).chunks_exact(w).any(|e| match layout.access {
                    AccessType::CI => e == t,
                    _ => store.get_word(e[0]) == t,
                })
            }
            Structure::Fs => store.iter().any(|(_, s)| s == t),
        }
    }

    fn remove(&mut self, t: &[u64], pick: Option<TupleRef>, store: &RowStore) -> Option<Option<TupleRef>> {
        let layout = &self.layout;
        match &mut self.structure {
            Structure::Sa(s) => s.remove(t, pick, layout, store),
            Structure::Bp(b) => b.remove(t, pick, layout, store),
            Structure::Ht(h) => h.remove(t, pick, layout, store),
            Structure::Rx(x) => {
                let mut kb = Vec::with_capacity(8 * layout.key_len());
                encode_key_into(t, &layout.key, &mut kb);
                let removed = x.remove_where(&kb, |e| match (layout.access, pick) {
                    (AccessType::CI, _) => e == t,
                    (_, Some(r)) => e[0] == r.to_word(),
                    (_, None) => store.get_word(e[0]) == t,
                })?;
                Some(match layout.access {
                    AccessType::CI => None,
                    _ => Some(TupleRef::from_word(removed[0])),
                })
            }
            Structure::Fs => {
                let r = match pick {
                    Some(r) => r,
                    None => store.iter().find(|(_, s)| *s == t)?.0,
                };
                Some(Some(r))
            }
        }
    }

    fn probe<'a>(&'a self, values: &[u64], store: &'a RowStore) -> Result<Tuples<'a>, StorageError> {
        let layout = &self.layout;
        let key_len = layout.key_len();
        if matches!(self.structure, Structure::Fs) {
            return Err(StorageError::NotIndexed);
        }
        if values.len() > key_len {
            return Err(StorageError::ProbeTooWide { key_len, prefix_len: values.len() });
        }
        let src = match &self.structure {
            Structure::Sa(s) => {
                let head = s.range(values, layout, store);
                let tail = if s.scans_tail() { s.tail_rows() } else { &[] };
                Src::Sa { head, tail, width: layout.width, prefix: SmallVec::from_slice(values) }
            }
            Structure::Bp(b) => {
                let (cur, end) = b.equal_range(|r| layout.cmp_prefix(r, values, store));
                Src::Bp { tree: b, cur, end }
            }
            Structure::Ht(h) => {
                if values.len() != key_len {
                    return Err(StorageError::PrefixProbeUnsupported { key_len, prefix_len: values.len() });
                }
                Src::Payload { data: h.get(values, layout, store), step: h.payload_width() }
            }
            Structure::Rx(x) => {
                let mut kb = SmallVec::<[u8; 64]>::new();
                for v in values {
                    kb.extend_from_slice(&v.to_be_bytes());
                }
                if values.len() == key_len {
                    Src::Payload { data: x.get(&kb), step: x.payload_width() }
                } else {
                    Src::Radix { walk: x.walk(x.find_prefix(&kb)), cur: &[], step: x.payload_width() }
                }
            }
            Structure::Fs => unreachable!(),
        };
        Ok(Tuples { layout, store, src })
    }

    fn iter<'a>(&'a self, store: &'a RowStore) -> Tuples<'a> {
        let layout = &self.layout;
        let src = match &self.structure {
            Structure::Sa(s) => Src::Sa { head: s.all_rows(), tail: &[], width: layout.width, prefix: SmallVec::new() },
            Structure::Bp(b) => Src::Bp { tree: b, cur: b.begin(), end: b.end() },
            Structure::Ht(h) => Src::Buckets { slots: h.slots().iter(), cur: &[], step: h.payload_width() },
            Structure::Rx(x) => Src::Radix { walk: x.walk(Some(x.root())), cur: &[], step: x.payload_width() },
            Structure::Fs => Src::Scan { it: store.iter(), attrs: SmallVec::new(), values: SmallVec::new() },
        };
        Tuples { layout, store, src }
    }

    /// Capacity and occupancy of a hash representation.
    fn hash_load(&self) -> Option<(usize, usize)> {
        match &self.structure {
            Structure::Ht(h) => Some((h.occupied(), h.capacity())),
            _ => None,
        }
    }
}

enum Src<'a> {
    Sa { head: &'a [u64], tail: &'a [u64], width: usize, prefix: SmallVec<[u64; 4]> },
    Bp { tree: &'a BTree, cur: btree::Cursor, end: btree::Cursor },
    Payload { data: &'a [u64], step: usize },
    Buckets { slots: std::slice::Iter<'a, Vec<u64>>, cur: &'a [u64], step: usize },
    Radix { walk: Walk<'a>, cur: &'a [u64], step: usize },
    Scan { it: RowStoreIter<'a>, attrs: SmallVec<[usize; 4]>, values: SmallVec<[u64; 4]> },
    Filtered { inner: Box<Tuples<'a>>, attrs: SmallVec<[usize; 4]>, values: SmallVec<[u64; 4]> },
}

/// Iterator over the tuples of a representation, a probe result, or a
/// filtered scan. Unclustered entries are dereferenced through the store.
pub struct Tuples<'a> {
    layout: &'a Layout,
    store: &'a RowStore,
    src: Src<'a>,
}

impl<'a> Tuples<'a> {
    #[inline]
    fn entry(&self, e: &'a [u64]) -> &'a [u64] {
        match self.layout.access {
            AccessType::CI | AccessType::FS => e,
            _ => self.store.get_word(e[0]),
        }
    }
}

impl<'a> Iterator for Tuples<'a> {
    type Item = &'a [u64];

    #[inline]
    fn next(&mut self) -> Option<&'a [u64]> {
        let layout = self.layout;
        let store = self.store;
        match &mut self.src {
            Src::Sa { head, tail, width, prefix } => {
                let w = *width;
                if head.len() >= w {
                    let (row, rest) = head.split_at(w);
                    *head = rest;
                    return Some(layout.tuple(row, store));
                }
                while tail.len() >= w {
                    let (row, rest) = tail.split_at(w);
                    *tail = rest;
                    if layout.cmp_prefix(row, prefix, store) == std::cmp::Ordering::Equal {
                        return Some(layout.tuple(row, store));
                    }
                }
                None
            }
            Src::Bp { tree, cur, end } => loop {
                if *cur == *end || cur.0 == btree::NIL {
                    return None;
                }
                let (rows, next) = tree.leaf_rows(cur.0);
                let w = tree.width();
                if cur.1 * w >= rows.len() {
                    *cur = (next, 0);
                    continue;
                }
                let row = &rows[cur.1 * w..(cur.1 + 1) * w];
                cur.1 += 1;
                return Some(layout.tuple(row, store));
            },
            Src::Payload { data, step } => {
                if data.is_empty() {
                    return None;
                }
                let (e, rest) = data.split_at(*step);
                *data = rest;
                Some(self.entry(e))
            }
            Src::Buckets { slots, cur, step } => loop {
                if !cur.is_empty() {
                    let (e, rest) = cur.split_at(*step);
                    *cur = rest;
                    return Some(self.entry(e));
                }
                *cur = slots.next()?;
            },
            Src::Radix { walk, cur, step } => loop {
                if !cur.is_empty() {
                    let (e, rest) = cur.split_at(*step);
                    *cur = rest;
                    return Some(self.entry(e));
                }
                *cur = walk.next_leaf()?;
            },
            Src::Scan { it, attrs, values } => {
                for (_, t) in it.by_ref() {
                    if attrs.iter().zip(values.iter()).all(|(&a, &v)| t[a] == v) {
                        return Some(t);
                    }
                }
                None
            }
            Src::Filtered { inner, attrs, values } => {
                inner.find(|t| attrs.iter().zip(values.iter()).all(|(&a, &v)| t[a] == v))
            }
        }
    }
}

/// A relation with all of its physical representations.
#[derive(Debug)]
pub struct Relation {
    arity: usize,
    store: RowStore,
    uses_store: bool,
    reps: Vec<Representation>,
    primary: usize,
    appending: bool,
    scratch: Vec<u64>,
}

impl Relation {
    pub fn new(arity: usize, configs: &[RepConfig]) -> Result<Self, StorageError> {
        if arity == 0 {
            return Err(StorageError::ArityMismatch { expected: 1, got: 0 });
        }
        let mut rel = Relation {
            arity,
            store: RowStore::new(arity),
            uses_store: false,
            reps: Vec::new(),
            primary: 0,
            appending: false,
            scratch: Vec::new(),
        };
        for c in configs {
            rel.add_representation(c.clone())?;
        }
        Ok(rel)
    }

    /// A new empty relation with the same representations.
    pub fn empty_like(&self) -> Self {
        let configs: Vec<RepConfig> = self.reps.iter().map(|r| r.config.clone()).collect();
        Relation::new(self.arity, &configs).expect("configs were valid")
    }

    /// Adds a representation, indexing the relation's current contents.
    pub fn add_representation(&mut self, cfg: RepConfig) -> Result<usize, StorageError> {
        let mut rep = Representation::new(cfg, self.arity)?;
        if !self.reps.is_empty() {
            let mut tuples = Vec::new();
            let mut refs = Vec::new();
            if self.uses_store {
                for (r, t) in self.store.iter() {
                    refs.push(r);
                    tuples.extend_from_slice(t);
                }
            } else {
                for t in self.reps[self.primary].iter(&self.store) {
                    tuples.extend_from_slice(t);
                }
            }
            if rep.config.access.uses_store() && !self.uses_store {
                for t in tuples.chunks_exact(self.arity) {
                    refs.push(self.store.push(t));
                }
            }
            rep.bulk(&tuples, &refs, &self.store);
        }
        self.uses_store |= rep.config.access.uses_store();
        self.reps.push(rep);
        self.primary = self
            .reps
            .iter()
            .position(|r| r.key().map(|k| k.len() == self.arity).unwrap_or(false))
            .unwrap_or(0);
        Ok(self.reps.len() - 1)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rep_count(&self) -> usize {
        self.reps.len()
    }

    pub fn representation(&self, rep: usize) -> Option<&Representation> {
        self.reps.get(rep)
    }

    pub fn configs(&self) -> impl Iterator<Item = &RepConfig> {
        self.reps.iter().map(|r| &r.config)
    }

    /// Index of the representation answering `contains`.
    pub fn primary(&self) -> usize {
        self.primary
    }

    /// Number of stored tuples, duplicates included.
    pub fn len(&self) -> usize {
        match self.reps.get(self.primary) {
            Some(r) => r.len(&self.store),
            None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rep_len(&self, rep: usize) -> usize {
        self.reps[rep].len(&self.store)
    }

    pub fn is_appending(&self) -> bool {
        self.appending
    }

    fn check_arity(&self, got: usize) -> Result<(), StorageError> {
        if got != self.arity {
            return Err(StorageError::ArityMismatch { expected: self.arity, got });
        }
        Ok(())
    }

    /// Loads a flat buffer of tuples (`arity` words each).
    pub fn bulk_load(&mut self, tuples: &[u64]) -> Result<(), StorageError> {
        if self.appending {
            return Err(StorageError::AppendProtocol("bulk_load during an open append sequence".into()));
        }
        if tuples.len() % self.arity != 0 {
            return Err(StorageError::ArityMismatch { expected: self.arity, got: tuples.len() % self.arity });
        }
        let mut refs = Vec::new();
        if self.uses_store {
            refs.reserve(tuples.len() / self.arity);
            for t in tuples.chunks_exact(self.arity) {
                refs.push(self.store.push(t));
            }
        }
        for rep in &mut self.reps {
            rep.bulk(tuples, &refs, &self.store);
        }
        Ok(())
    }

    pub fn append(&mut self, t: &[u64]) -> Result<(), StorageError> {
        self.check_arity(t.len())?;
        let r = if self.uses_store { Some(self.store.push(t)) } else { None };
        for rep in &mut self.reps {
            rep.insert(t, r, &self.store, &mut self.scratch);
        }
        self.appending = true;
        Ok(())
    }

    /// Closes the current append sequence; a no-op when none is open.
    pub fn finished_append(&mut self) {
        if !self.appending {
            return;
        }
        for rep in &mut self.reps {
            rep.finished_append(&self.store);
        }
        self.appending = false;
    }

    pub fn contains(&self, t: &[u64]) -> bool {
        match self.reps.get(self.primary) {
            Some(r) => r.contains(t, &self.store),
            None => false,
        }
    }

    pub fn contains_in(&self, rep: usize, t: &[u64]) -> bool {
        self.reps[rep].contains(t, &self.store)
    }

    /// Tuples of representation `rep` whose first `values.len()` key
    /// attributes equal `values`.
    pub fn probe(&self, rep: usize, values: &[u64]) -> Result<Tuples<'_>, StorageError> {
        self.reps.get(rep).ok_or(StorageError::UnknownRepresentation(rep))?.probe(values, &self.store)
    }

    /// Full scan with an equality filter, `t[attrs[i]] == values[i]`.
    pub fn scan_filter(&self, attrs: &[usize], values: &[u64]) -> Tuples<'_> {
        let fs = self.reps.iter().find(|r| matches!(r.structure, Structure::Fs));
        let rep = fs.or(self.reps.get(self.primary));
        match rep {
            Some(r) if self.uses_store => Tuples {
                layout: &r.layout,
                store: &self.store,
                src: Src::Scan { it: self.store.iter(), attrs: SmallVec::from_slice(attrs), values: SmallVec::from_slice(values) },
            },
            Some(r) => Tuples {
                layout: &r.layout,
                store: &self.store,
                src: Src::Filtered {
                    inner: Box::new(r.iter(&self.store)),
                    attrs: SmallVec::from_slice(attrs),
                    values: SmallVec::from_slice(values),
                },
            },
            None => Tuples {
                layout: &EMPTY_LAYOUT,
                store: &self.store,
                src: Src::Payload { data: &[], step: 1 },
            },
        }
    }

    /// Tuples through the primary representation.
    pub fn iter(&self) -> Tuples<'_> {
        match self.reps.get(self.primary) {
            Some(r) => r.iter(&self.store),
            None => Tuples { layout: &EMPTY_LAYOUT, store: &self.store, src: Src::Payload { data: &[], step: 1 } },
        }
    }

    pub fn iter_rep(&self, rep: usize) -> Tuples<'_> {
        self.reps[rep].iter(&self.store)
    }

    /// Removes one occurrence of `t` from every representation.
    pub fn remove(&mut self, t: &[u64]) -> bool {
        if t.len() != self.arity {
            return false;
        }
        let mut tref: Option<TupleRef> = None;
        let mut removed = false;
        if self.uses_store {
            let first = self.reps.iter().position(|r| r.config.access.uses_store());
            if let Some(i) = first {
                match self.reps[i].remove(t, None, &self.store) {
                    Some(r) => {
                        tref = r;
                        removed = true;
                    }
                    None => return false,
                }
            }
        }
        for rep in &mut self.reps {
            if rep.config.access.uses_store() {
                if let Some(r) = tref {
                    if matches!(rep.structure, Structure::Fs) {
                        continue;
                    }
                    if rep.remove(t, Some(r), &self.store).is_some() {
                        removed = true;
                    }
                }
            } else if rep.remove(t, None, &self.store).is_some() {
                removed = true;
            }
        }
        if let Some(r) = tref {
            self.store.remove(r);
        }
        removed
    }

    pub fn store(&self) -> Option<&RowStore> {
        self.uses_store.then_some(&self.store)
    }

    pub fn rep_footprint(&self, rep: usize) -> usize {
        self.reps[rep].footprint()
    }

    pub fn store_footprint(&self) -> usize {
        if self.uses_store {
            self.store.memory_footprint()
        } else {
            0
        }
    }

    /// All bytes held: every representation plus the shared store.
    pub fn memory_footprint(&self) -> usize {
        self.reps.iter().map(|r| r.footprint()).sum::<usize>() + self.store_footprint()
    }

    /// (occupied slots, capacity) of a hash representation.
    pub fn hash_load(&self, rep: usize) -> Option<(usize, usize)> {
        self.reps[rep].hash_load()
    }
}

static EMPTY_LAYOUT: std::sync::LazyLock<Layout> =
    std::sync::LazyLock::new(|| Layout::new(AccessType::CI, 1, None));
