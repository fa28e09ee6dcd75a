use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::Program;

/// Predicate dependency graph: an edge A -> B means some rule with head B
/// reads A in its body.
#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    pub graph: DiGraph<String, ()>,
    pub nodes: BTreeMap<String, NodeIndex>,
}

impl DependencyGraph {
    pub fn edges(&self) -> BTreeSet<(String, String)> {
        self.graph
            .edge_indices()
            .filter_map(|e| self.graph.edge_endpoints(e))
            .map(|(a, b)| (self.graph[a].clone(), self.graph[b].clone()))
            .collect()
    }
}

pub fn build_dependency_graph(p: &Program) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    let node = |g: &mut DependencyGraph, name: &str| -> NodeIndex {
        if let Some(&n) = g.nodes.get(name) {
            return n;
        }
        let n = g.graph.add_node(name.to_string());
        g.nodes.insert(name.to_string(), n);
        n
    };
    for r in &p.rules {
        let h = node(&mut g, &r.head.relation);
        for a in &r.body {
            let b = node(&mut g, &a.relation);
            if g.graph.find_edge(b, h).is_none() {
                g.graph.add_edge(b, h, ());
            }
        }
    }
    g
}

/// One evaluation unit: a strongly connected set of IDB relations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub relations: BTreeSet<String>,
    /// Rules (by index) whose body reads no relation of this stratum.
    pub seed_rules: Vec<usize>,
    pub recursive_rules: Vec<usize>,
}

impl Stratum {
    pub fn is_recursive(&self) -> bool {
        !self.recursive_rules.is_empty()
    }
}

pub fn stratify(p: &Program) -> Vec<Stratum> {
    let full = build_dependency_graph(p);
    let mut idb: DiGraph<String, ()> = DiGraph::new();
    let mut map = BTreeMap::new();
    for (name, &n) in &full.nodes {
        if p.is_idb(name) {
            map.insert(n, idb.add_node(full.graph[n].clone()));
        }
    }
    for e in full.graph.edge_indices() {
        let (a, b) = full.graph.edge_endpoints(e).expect("edge exists");
        if let (Some(&x), Some(&y)) = (map.get(&a), map.get(&b)) {
            idb.add_edge(x, y, ());
        }
    }
    // Tarjan emits components in reverse topological order.
    let mut sccs = tarjan_scc(&idb);
    sccs.reverse();
    sccs.into_iter()
        .map(|comp| {
            let relations: BTreeSet<String> = comp.iter().map(|&n| idb[n].clone()).collect();
            let mut seed_rules = Vec::new();
            let mut recursive_rules = Vec::new();
            for (i, r) in p.rules.iter().enumerate() {
                if !relations.contains(&r.head.relation) {
                    continue;
                }
                if r.body.iter().any(|a| relations.contains(&a.relation)) {
                    recursive_rules.push(i);
                } else {
                    seed_rules.push(i);
                }
            }
            Stratum { relations, seed_rules, recursive_rules }
        })
        .collect()
}
