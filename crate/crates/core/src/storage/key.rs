use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StorageError;

/// Ordered list of attribute positions a representation is indexed on.
///
/// Rendered as the positions joined by underscores, so `[1, 0]` is `1_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct IndexKey(Vec<usize>);

impl IndexKey {
    pub fn new(attrs: Vec<usize>) -> Result<Self, StorageError> {
        if attrs.is_empty() {
            return Err(StorageError::InvalidKey("index key must not be empty".into()));
        }
        for (i, a) in attrs.iter().enumerate() {
            if attrs[..i].contains(a) {
                return Err(StorageError::InvalidKey(format!(
                    "attribute {a} repeated in key"
                )));
            }
        }
        Ok(IndexKey(attrs))
    }

    /// The key covering every attribute in positional order.
    pub fn full(arity: usize) -> Self {
        IndexKey((0..arity).collect())
    }

    pub fn attrs(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate_for(&self, arity: usize) -> Result<(), StorageError> {
        match self.0.iter().find(|&&a| a >= arity) {
            Some(a) => Err(StorageError::InvalidKey(format!(
                "attribute {a} out of range for arity {arity}"
            ))),
            None => Ok(()),
        }
    }

    /// True if `self` is a (non-strict) prefix of `other` as a sequence.
    pub fn is_prefix_of(&self, other: &IndexKey) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True if the first `set.len()` attributes of this key are exactly `set`
    /// (in any order), i.e. a probe binding `set` can use this key.
    pub fn serves(&self, set: &[usize]) -> bool {
        set.len() <= self.0.len() && set.iter().all(|a| self.0[..set.len()].contains(a))
    }

    /// The key attributes followed by every remaining attribute in ascending
    /// position order; this is the total order ordered structures sort by.
    pub fn sort_order(&self, arity: usize) -> Vec<usize> {
        let mut order = self.0.clone();
        order.extend((0..arity).filter(|a| !self.0.contains(a)));
        order
    }
}

impl fmt::Display for IndexKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for IndexKey {
    type Err = StorageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let attrs = s
            .split('_')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| StorageError::InvalidKey(format!("bad key component {p:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        IndexKey::new(attrs)
    }
}

impl From<IndexKey> for String {
    fn from(k: IndexKey) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for IndexKey {
    type Error = StorageError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Order-preserving byte encoding of the key attributes of `t`.
///
/// Each attribute becomes its big-endian 8-byte form, so byte-wise
/// lexicographic order matches attribute-wise numeric order under `key`.
pub fn encode_key(t: &[u64], key: &IndexKey) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 * key.len());
    encode_key_into(t, key.attrs(), &mut out);
    out
}

pub(crate) fn encode_key_into(t: &[u64], attrs: &[usize], out: &mut Vec<u8>) {
    for &a in attrs {
        out.extend_from_slice(&t[a].to_be_bytes());
    }
}

/// Where tuples live and how the index reaches them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AccessType {
    /// Covered index: the structure materializes full tuples.
    CI,
    /// Unclustered key-based index: (key, tuple reference) pairs over a row store.
    UKI,
    /// Unclustered pointer-based index: bare tuple references over a row store.
    UPI,
    /// Full scan of the row store.
    FS,
}

impl AccessType {
    pub const ALL: [AccessType; 4] = [AccessType::CI, AccessType::UKI, AccessType::UPI, AccessType::FS];

    pub fn uses_store(self) -> bool {
        !matches!(self, AccessType::CI)
    }
}

impl fmt::Display for AccessType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessType::CI => "CI",
            AccessType::UKI => "UKI",
            AccessType::UPI => "UPI",
            AccessType::FS => "FS",
        })
    }
}

impl FromStr for AccessType {
    type Err = StorageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CI" => Ok(AccessType::CI),
            "UKI" => Ok(AccessType::UKI),
            "UPI" => Ok(AccessType::UPI),
            "FS" => Ok(AccessType::FS),
            _ => Err(StorageError::Parse(format!("unknown access type {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DataStructure {
    /// Sorted array with an unsorted append tail.
    SA,
    /// Sorted array whose `contains` ignores the tail while appending and
    /// which deduplicates on `finished_append`.
    SAPP,
    /// B+-tree multiset.
    BP,
    /// Open-addressing hash table, linear probing.
    HT,
    /// Radix tree over the encoded key.
    RX,
    /// Row store (chunked, stable addresses).
    RS,
}

impl DataStructure {
    pub const ALL: [DataStructure; 6] = [
        DataStructure::SA,
        DataStructure::SAPP,
        DataStructure::BP,
        DataStructure::HT,
        DataStructure::RX,
        DataStructure::RS,
    ];

    pub fn is_ordered(self) -> bool {
        matches!(
            self,
            DataStructure::SA | DataStructure::SAPP | DataStructure::BP | DataStructure::RX
        )
    }
}

impl fmt::Display for DataStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataStructure::SA => "SA",
            DataStructure::SAPP => "SAPP",
            DataStructure::BP => "BP",
            DataStructure::HT => "HT",
            DataStructure::RX => "RX",
            DataStructure::RS => "RS",
        })
    }
}

impl FromStr for DataStructure {
    type Err = StorageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "SA" => Ok(DataStructure::SA),
            "SAPP" | "SA++" => Ok(DataStructure::SAPP),
            "BP" => Ok(DataStructure::BP),
            "HT" => Ok(DataStructure::HT),
            "RX" => Ok(DataStructure::RX),
            "RS" => Ok(DataStructure::RS),
            _ => Err(StorageError::Parse(format!("unknown data structure {s:?}"))),
        }
    }
}

/// One physical representation: access type, data structure and index key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepConfig {
    pub access: AccessType,
    pub ds: DataStructure,
    /// Absent only for the full-scan row store.
    pub key: Option<IndexKey>,
}

impl RepConfig {
    pub fn new(access: AccessType, ds: DataStructure, key: Option<IndexKey>) -> Self {
        RepConfig { access, ds, key }
    }

    pub fn indexed(access: AccessType, ds: DataStructure, key: IndexKey) -> Self {
        RepConfig { access, ds, key: Some(key) }
    }

    pub fn full_scan() -> Self {
        RepConfig { access: AccessType::FS, ds: DataStructure::RS, key: None }
    }

    /// Checks the combination against the supported table and the key
    /// against `arity`.
    pub fn validate(&self, arity: usize) -> Result<(), StorageError> {
        let ok = match (self.access, self.ds) {
            (AccessType::FS, DataStructure::RS) => self.key.is_none(),
            (AccessType::FS, _) | (_, DataStructure::RS) => false,
            _ => self.key.is_some(),
        };
        if !ok {
            return Err(StorageError::InvalidCombination { access: self.access, ds: self.ds });
        }
        if let Some(k) = &self.key {
            k.validate_for(arity)?;
        }
        Ok(())
    }

    /// The 13 access-type/data-structure combinations (SA standing in for
    /// both sorted-array variants), each keyed on `key`.
    pub fn all_combinations(key: &IndexKey) -> Vec<RepConfig> {
        let mut out = Vec::with_capacity(13);
        for access in [AccessType::CI, AccessType::UKI, AccessType::UPI] {
            for ds in [DataStructure::SA, DataStructure::BP, DataStructure::HT, DataStructure::RX] {
                out.push(RepConfig::indexed(access, ds, key.clone()));
            }
        }
        out.push(RepConfig::full_scan());
        out
    }
}

impl fmt::Display for RepConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "{}-{}({})", self.access, self.ds, k),
            None => write!(f, "{}-{}", self.access, self.ds),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_roundtrip_and_render() {
        let k: IndexKey = "1_0".parse().unwrap();
        assert_eq!(k.attrs(), &[1, 0]);
        assert_eq!(k.to_string(), "1_0");
        assert!("".parse::<IndexKey>().is_err());
        assert!("0_0".parse::<IndexKey>().is_err());
        assert!(k.validate_for(1).is_err());
    }

    #[test]
    fn encode_examples() {
        let k = IndexKey::new(vec![1, 0]).unwrap();
        let mut expect = 2u64.to_be_bytes().to_vec();
        expect.extend_from_slice(&1u64.to_be_bytes());
        assert_eq!(encode_key(&[1, 2], &k), expect);
        assert_eq!(encode_key(&[0, 0], &k), vec![0u8; 16]);
    }

    #[test]
    fn table_of_combinations() {
        let k = IndexKey::full(2);
        assert_eq!(RepConfig::all_combinations(&k).len(), 13);
        assert!(RepConfig::new(AccessType::CI, DataStructure::RS, None).validate(2).is_err());
        assert!(RepConfig::indexed(AccessType::FS, DataStructure::SA, k.clone()).validate(2).is_err());
        assert!(RepConfig::full_scan().validate(2).is_ok());
        assert!(RepConfig::indexed(AccessType::UPI, DataStructure::SAPP, k).validate(2).is_ok());
    }

    #[test]
    fn serves_prefix_sets() {
        let k: IndexKey = "3_1_2_0".parse().unwrap();
        assert!(k.serves(&[3]));
        assert!(k.serves(&[1, 3]));
        assert!(!k.serves(&[0]));
        assert!(k.serves(&[0, 1, 2, 3]));
        assert_eq!(k.sort_order(5), vec![3, 1, 2, 0, 4]);
    }
}
