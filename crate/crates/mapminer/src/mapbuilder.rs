//! Pseudo-map construction: prune the transition matrix at a threshold
//! and turn the surviving transitions into a directed graph of
//! sub-intentions connected by strategy-labeled, probability-weighted
//! edges.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::strategy_label;

/// A retained transition `source -> target`. The edge is labeled with the
/// strategy of its *target* state: enacting that strategy achieves
/// sub-intention `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub label: String,
}

/// Directed graph of sub-intentions `I0..I(N-1)` after pruning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoMap {
    pub n_nodes: usize,
    pub epsilon: f64,
    pub edges: Vec<MapEdge>,
}

impl PseudoMap {
    /// In-degree per node, counting self-loops.
    pub fn in_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0usize; self.n_nodes];
        for edge in &self.edges {
            degrees[edge.target] += 1;
        }
        degrees
    }
}

/// Start/Stop intention candidates. Self-loops are ignored for the degree
/// computation: a self-transition does not disqualify a source or sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartStopReport {
    /// Nodes with no incoming edge from another node.
    pub start_candidates: BTreeSet<usize>,
    /// Nodes with no outgoing edge to another node.
    pub stop_candidates: BTreeSet<usize>,
    pub selected_start: Option<usize>,
    pub selected_stop: Option<usize>,
    pub start_overridden: bool,
    pub stop_overridden: bool,
    /// Largest outgoing non-self weight per node; near-sink diagnostic
    /// for weak stop candidates.
    pub max_outgoing_weight: Vec<f64>,
}

/// Keep exactly the transitions with weight `>= epsilon`, in row-major
/// order. Zero-weight entries are never edges, also when `epsilon` is 0.
pub fn prune_transitions(trans: &[Vec<f64>], epsilon: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for (i, row) in trans.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w >= epsilon && w > 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    edges
}

/// Assemble the pseudo-map from retained transitions. Edge weights are
/// the matrix entries, not re-normalized.
pub fn build_pseudo_map(
    edges: &[(usize, usize, f64)],
    n_states: usize,
    epsilon: f64,
) -> Result<PseudoMap> {
    for &(i, j, _) in edges {
        if i >= n_states || j >= n_states {
            return Err(Error::domain(format!(
                "edge ({i}, {j}) outside the {n_states}-state map"
            )));
        }
    }
    Ok(PseudoMap {
        n_nodes: n_states,
        epsilon,
        edges: edges
            .iter()
            .map(|&(source, target, weight)| MapEdge {
                source,
                target,
                weight,
                label: strategy_label(target),
            })
            .collect(),
    })
}

/// Compute start/stop candidates and select the defaults (lowest-index
/// candidate), unless explicit overrides are given.
pub fn find_start_stop(
    map: &PseudoMap,
    start_override: Option<usize>,
    stop_override: Option<usize>,
) -> Result<StartStopReport> {
    for (what, value) in [("start", start_override), ("stop", stop_override)] {
        if let Some(node) = value {
            if node >= map.n_nodes {
                return Err(Error::domain(format!(
                    "{what} override {node} outside the {}-node map",
                    map.n_nodes
                )));
            }
        }
    }

    let mut has_incoming = vec![false; map.n_nodes];
    let mut has_outgoing = vec![false; map.n_nodes];
    let mut max_outgoing_weight = vec![0.0f64; map.n_nodes];
    for edge in &map.edges {
        if edge.source == edge.target {
            continue;
        }
        has_incoming[edge.target] = true;
        has_outgoing[edge.source] = true;
        if edge.weight > max_outgoing_weight[edge.source] {
            max_outgoing_weight[edge.source] = edge.weight;
        }
    }
    let start_candidates: BTreeSet<usize> =
        (0..map.n_nodes).filter(|&v| !has_incoming[v]).collect();
    let stop_candidates: BTreeSet<usize> = (0..map.n_nodes).filter(|&v| !has_outgoing[v]).collect();

    Ok(StartStopReport {
        selected_start: start_override.or_else(|| start_candidates.first().copied()),
        selected_stop: stop_override.or_else(|| stop_candidates.first().copied()),
        start_overridden: start_override.is_some(),
        stop_overridden: stop_override.is_some(),
        start_candidates,
        stop_candidates,
        max_outgoing_weight,
    })
}

/// Render the map as Graphviz DOT. Node size grows with in-degree and
/// edge pen width with transition weight; output is byte-deterministic.
pub fn to_dot(map: &PseudoMap, config_hash: Option<&str>) -> String {
    let mut out = String::new();
    out.push_str("digraph pseudo_map {\n");
    if let Some(hash) = config_hash {
        let _ = writeln!(out, "  // config_hash: {hash}");
    }
    out.push_str("  rankdir=LR;\n  node [shape=circle, fixedsize=true];\n");
    let in_degrees = map.in_degrees();
    for node in 0..map.n_nodes {
        let width = 0.5 + 0.15 * in_degrees[node] as f64;
        let _ = writeln!(out, "  I{node} [width={width:.2}];");
    }
    for edge in &map.edges {
        let penwidth = 1.0 + 4.0 * edge.weight;
        let _ = writeln!(
            out,
            "  I{} -> I{} [label=\"{} {:.2}\", penwidth={:.2}, weight={}];",
            edge.source, edge.target, edge.label, edge.weight, penwidth, edge.weight
        );
    }
    out.push_str("}\n");
    out
}

/// Render the map as GraphML with `weight` and `label` edge attributes.
pub fn to_graphml(map: &PseudoMap) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"label\" for=\"edge\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"pseudo_map\" edgedefault=\"directed\">\n");
    for node in 0..map.n_nodes {
        let _ = writeln!(out, "    <node id=\"I{node}\"/>");
    }
    for edge in &map.edges {
        let _ = writeln!(
            out,
            "    <edge source=\"I{}\" target=\"I{}\">\n      <data key=\"weight\">{}</data>\n      <data key=\"label\">{}</data>\n    </edge>",
            edge.source, edge.target, edge.weight, edge.label
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
