//! Bottom-up evaluation: left-deep index-nested-loop plans, semi-naive
//! recursion and the four build-up strategies for recursive relations.

mod config;
mod counters;
mod engine;
mod naive;
mod plan;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::storage::{IndexKey, StorageError};

pub use config::{EvalConfig, OccurrenceRef, Side};
pub use counters::{EdgeCount, EdgeKey, EdgeRow, EdgeTarget, Op, OpCounters, RepCounterRow, RepCounters, Role};
pub use engine::{apply_strategy, run_program, run_program_with, FootprintRow, RunOptions, RunOutput, StrategyCounts, Timings};
pub use naive::naive_eval;
pub use plan::{plan_rule, JoinPlan, Level, LevelAccess, ValueSrc};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Base contains, then new contains, then append to new.
    #[default]
    S1,
    /// New contains first, then base contains.
    S2,
    /// One base contains; append eagerly to base and new.
    S3,
    /// New-only contains; remove base tuples from new afterwards.
    S4,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::S1, Strategy::S2, Strategy::S3, Strategy::S4];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Strategy {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S1" => Ok(Strategy::S1),
            "S2" => Ok(Strategy::S2),
            "S3" => Ok(Strategy::S3),
            "S4" => Ok(Strategy::S4),
            _ => Err(EvalError::InvalidConfig(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("no facts supplied for EDB relation {0}")]
    MissingFacts(String),
    #[error("rule {rule}, atom {atom}: no representation of {relation} can serve the occurrence")]
    MissingRepresentation { rule: usize, atom: usize, relation: String },
    #[error("rule {rule}, atom {atom}: key {key} of {relation} does not serve bound attributes {bound:?}")]
    KeyMismatch { rule: usize, atom: usize, relation: String, key: String, bound: Vec<usize> },
    #[error("rule {rule}, atom {atom}: hash index {relation}({key}) cannot serve a prefix probe")]
    PrefixProbeUnsupported { rule: usize, atom: usize, relation: String, key: IndexKey },
    #[error("facts for {relation} have arity {got}, expected {expected}")]
    ArityMismatch { relation: String, expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Input tuples per relation, stored flat.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Facts {
    tables: BTreeMap<String, FactTable>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactTable {
    pub arity: usize,
    pub data: Vec<u64>,
}

impl FactTable {
    pub fn len(&self) -> usize {
        self.data.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn tuples(&self) -> std::slice::ChunksExact<'_, u64> {
        self.data.chunks_exact(self.arity)
    }
}

impl Facts {
    pub fn new() -> Self {
        Facts::default()
    }

    /// Adds a relation from a flat buffer of `arity`-word tuples.
    pub fn insert(&mut self, name: impl Into<String>, arity: usize, data: Vec<u64>) {
        assert!(arity > 0 && data.len() % arity == 0, "flat buffer must hold whole tuples");
        self.tables.insert(name.into(), FactTable { arity, data });
    }

    pub fn insert_tuples<T: AsRef<[u64]>>(&mut self, name: impl Into<String>, arity: usize, tuples: &[T]) {
        let mut data = Vec::with_capacity(tuples.len() * arity);
        for t in tuples {
            assert_eq!(t.as_ref().len(), arity, "tuple arity");
            data.extend_from_slice(t.as_ref());
        }
        self.insert(name, arity, data);
    }

    pub fn get(&self, name: &str) -> Option<&FactTable> {
        self.tables.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &FactTable)> {
        self.tables.iter()
    }

    pub fn total_tuples(&self) -> usize {
        self.tables.values().map(|t| t.len()).sum()
    }
}

/// Final contents of every IDB relation, sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultSet {
    pub relations: BTreeMap<String, Vec<Vec<u64>>>,
}

impl ResultSet {
    pub fn get(&self, name: &str) -> Option<&[Vec<u64>]> {
        self.relations.get(name).map(|v| v.as_slice())
    }

    pub fn cardinality(&self, name: &str) -> usize {
        self.relations.get(name).map(|v| v.len()).unwrap_or(0)
    }

    pub(crate) fn from_flat(name: &str, mut data: Vec<Vec<u64>>, out: &mut Self) {
        data.sort_unstable();
        data.dedup();
        out.relations.insert(name.to_string(), data);
    }
}
