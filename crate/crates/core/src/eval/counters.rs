//! Operation counters per representation and per plan edge.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Which instance of a relation a representation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Base,
    Delta,
    New,
}

/// Counts of storage operations on one representation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepCounters {
    pub bulk_load: u64,
    pub iter_calls: u64,
    pub iter_returned: u64,
    pub probe_calls: u64,
    pub probe_returned: u64,
    pub contains: u64,
    pub append: u64,
    pub remove: u64,
}

impl RepCounters {
    pub fn add(&mut self, o: &RepCounters) {
        self.bulk_load += o.bulk_load;
        self.iter_calls += o.iter_calls;
        self.iter_returned += o.iter_returned;
        self.probe_calls += o.probe_calls;
        self.probe_returned += o.probe_returned;
        self.contains += o.contains;
        self.append += o.append;
        self.remove += o.remove;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeTarget {
    /// A body atom, by position in the written body.
    Body(usize),
    HeadBase,
    HeadNew,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Iterate,
    Probe,
    Contains,
    Append,
}

/// One operation edge of a rule plan: which plan variant issued it and
/// where it went.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeKey {
    pub rule: usize,
    pub variant: Option<usize>,
    pub target: EdgeTarget,
    pub op: Op,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCount {
    pub calls: u64,
    pub returned: u64,
    /// Times the key sequence at this edge went backwards; only tracked
    /// when order monitoring is on.
    pub descents: u64,
}

impl EdgeCount {
    pub fn add(&mut self, o: &EdgeCount) {
        self.calls += o.calls;
        self.returned += o.returned;
        self.descents += o.descents;
    }
}

/// Identifies a representation instance: relation, role and index in the
/// relation's representation list.
pub type RepId = (String, Role, usize);

/// All counters of one evaluation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounters {
    pub reps: BTreeMap<RepId, RepCounters>,
    pub edges: BTreeMap<EdgeKey, EdgeCount>,
    /// Iteration count per stratum, in evaluation order.
    pub iterations: Vec<u64>,
}

/// Flattened representation counters, one CSV-friendly row per rep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepCounterRow {
    pub relation: String,
    pub role: Role,
    pub rep: usize,
    #[serde(flatten)]
    pub counts: RepCounters,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub rule: usize,
    pub variant: Option<usize>,
    pub target: EdgeTarget,
    pub op: Op,
    #[serde(flatten)]
    pub count: EdgeCount,
}

impl OpCounters {
    pub fn rep(&self, relation: &str, role: Role, rep: usize) -> RepCounters {
        self.reps.get(&(relation.to_string(), role, rep)).copied().unwrap_or_default()
    }

    pub fn rep_mut(&mut self, relation: &str, role: Role, rep: usize) -> &mut RepCounters {
        self.reps.entry((relation.to_string(), role, rep)).or_default()
    }

    /// Sum over every representation of `relation` in `role`.
    pub fn role_total(&self, relation: &str, role: Role) -> RepCounters {
        let mut out = RepCounters::default();
        for ((r, ro, _), c) in &self.reps {
            if r == relation && *ro == role {
                out.add(c);
            }
        }
        out
    }

    pub fn edge(&self, key: &EdgeKey) -> EdgeCount {
        self.edges.get(key).copied().unwrap_or_default()
    }

    /// Sum of an edge over every plan variant of `rule`.
    pub fn edge_total(&self, rule: usize, target: EdgeTarget, op: Op) -> EdgeCount {
        let mut out = EdgeCount::default();
        for (k, c) in &self.edges {
            if k.rule == rule && k.target == target && k.op == op {
                out.add(c);
            }
        }
        out
    }

    pub fn total_iterations(&self) -> u64 {
        self.iterations.iter().sum()
    }

    pub fn rep_rows(&self) -> Vec<RepCounterRow> {
        self.reps
            .iter()
            .map(|((relation, role, rep), c)| RepCounterRow { relation: relation.clone(), role: *role, rep: *rep, counts: *c })
            .collect()
    }

    pub fn edge_rows(&self) -> Vec<EdgeRow> {
        self.edges
            .iter()
            .map(|(k, c)| EdgeRow { rule: k.rule, variant: k.variant, target: k.target, op: k.op, count: *c })
            .collect()
    }

    /// Totals across all representations.
    pub fn grand_total(&self) -> RepCounters {
        let mut out = RepCounters::default();
        for c in self.reps.values() {
            out.add(c);
        }
        out
    }
}
