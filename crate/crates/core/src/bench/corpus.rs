//! The four bundled workloads with their programs and datasets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gen::{gen_andersen, gen_random_graph, GraphSize};
use super::io::parse_facts;
use super::BenchError;
use crate::eval::Facts;
use crate::frontend::{parse_program, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Workload {
    Tc,
    Reachability,
    Sg,
    Andersen,
}

impl Workload {
    pub const ALL: [Workload; 4] = [Workload::Tc, Workload::Reachability, Workload::Sg, Workload::Andersen];

    pub fn name(self) -> &'static str {
        match self {
            Workload::Tc => "tc",
            Workload::Reachability => "reachability",
            Workload::Sg => "sg",
            Workload::Andersen => "andersen",
        }
    }

    pub fn source(self) -> &'static str {
        match self {
            Workload::Tc => include_str!("../../corpus/tc.dl"),
            Workload::Reachability => include_str!("../../corpus/reachability.dl"),
            Workload::Sg => include_str!("../../corpus/sg.dl"),
            Workload::Andersen => include_str!("../../corpus/andersen.dl"),
        }
    }

    pub fn program(self) -> Program {
        parse_program(self.source()).expect("corpus programs parse")
    }

    fn bundled_files(self) -> &'static [(&'static str, usize, &'static str)] {
        match self {
            Workload::Tc => &[("edge", 2, include_str!("../../corpus/data/tc/edge.facts"))],
            Workload::Reachability => &[
                ("edges", 2, include_str!("../../corpus/data/reachability/edges.facts")),
                ("reachable", 1, include_str!("../../corpus/data/reachability/reachable.facts")),
            ],
            Workload::Sg => &[("edge", 2, include_str!("../../corpus/data/sg/edge.facts"))],
            Workload::Andersen => &[
                ("address_of", 2, include_str!("../../corpus/data/andersen/address_of.facts")),
                ("assign", 2, include_str!("../../corpus/data/andersen/assign.facts")),
                ("load", 2, include_str!("../../corpus/data/andersen/load.facts")),
                ("store", 2, include_str!("../../corpus/data/andersen/store.facts")),
            ],
        }
    }

    /// The small dataset checked in next to the program.
    pub fn bundled_facts(self) -> Facts {
        let mut f = Facts::new();
        for &(name, arity, text) in self.bundled_files() {
            let (_, data) = parse_facts(text, Some(arity)).expect("bundled facts parse");
            f.insert(name, arity, data);
        }
        f
    }

    /// Generated inputs for the workload at `scale` (1.0 is the desk-scale
    /// preset; graph sizes grow linearly with it).
    pub fn generate(self, scale: f64, seed: u64) -> Facts {
        let sized = |x: f64| ((x * scale).round() as usize).max(2);
        let mut f = Facts::new();
        match self {
            Workload::Tc => {
                let n = sized(400.0);
                f.insert("edge", 2, gen_random_graph(n, GraphSize::M((n * 4).min(n * (n - 1))), seed));
            }
            Workload::Reachability => {
                let n = sized(48_470.0);
                f.insert("edges", 2, gen_random_graph(n, GraphSize::M((n * 14).min(n * (n - 1))), seed));
                f.insert("reachable", 1, vec![0]);
            }
            Workload::Sg => {
                let n = sized(10_000.0);
                f.insert("edge", 2, gen_random_graph(n, GraphSize::M(n.min(n * (n - 1))), seed));
            }
            Workload::Andersen => {
                let n = sized(20_000.0);
                f = gen_andersen(n, n, seed);
            }
        }
        f
    }
}

impl fmt::Display for Workload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Workload {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Workload::ALL
            .into_iter()
            .find(|w| w.name() == s)
            .ok_or_else(|| BenchError::Usage(format!("unknown workload {s:?}")))
    }
}
