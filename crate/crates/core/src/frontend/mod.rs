//! Datalog programs: syntax tree, parser, dependency graph and strata.

mod depgraph;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use depgraph::{build_dependency_graph, stratify, DependencyGraph, Stratum};
pub use parser::parse_program;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Const(u64),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(relation: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { relation: relation.into(), args }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Attribute positions holding variable `v`.
    pub fn positions_of(&self, v: &str) -> Vec<usize> {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, t)| t.var() == Some(v))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelKind {
    Edb,
    Idb,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decl {
    pub arity: usize,
    pub kind: RelKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub decls: BTreeMap<String, Decl>,
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.decls.get(relation).map(|d| d.arity)
    }

    pub fn is_idb(&self, relation: &str) -> bool {
        matches!(self.decls.get(relation), Some(Decl { kind: RelKind::Idb, .. }))
    }

    pub fn edbs(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter(|(_, d)| d.kind == RelKind::Edb).map(|(n, _)| n.as_str())
    }

    pub fn idbs(&self) -> impl Iterator<Item = &str> {
        self.decls.iter().filter(|(_, d)| d.kind == RelKind::Idb).map(|(n, _)| n.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("line {line}: {msg}")]
    SyntaxError { line: usize, msg: String },
    #[error("line {line}: relation {relation} used with arity {found}, expected {expected}")]
    ArityMismatch { line: usize, relation: String, expected: usize, found: usize },
    #[error("line {line}: head variable {var} does not occur in the body")]
    UnsafeRule { line: usize, var: String },
    #[error("line {line}: EDB relation {relation} used as a rule head")]
    EdbInHead { line: usize, relation: String },
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.head)?;
        for (i, a) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(".")
    }
}

/// Renders declarations then rules; parsing the output yields an equal
/// program.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, d) in &self.decls {
            let kind = match d.kind {
                RelKind::Edb => ".edb",
                RelKind::Idb => ".idb",
            };
            writeln!(f, ".decl {name}/{} {kind}", d.arity)?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
