//! Overlapping community detection over the pseudo-map: maximal cliques
//! seed an agglomerative merge whose dendrogram is cut at the level of
//! maximal extended modularity (EQ). Surviving communities are the
//! intentions; the coarse-grained intention map is rebuilt from them.
//!
//! Clique communities are defined on undirected simple graphs, so the
//! pseudo-map is viewed undirected with self-loops dropped.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapbuilder::PseudoMap;

/// Undirected simple view of a directed graph: `{u, v}` is an edge iff
/// `u -> v` or `v -> u` exists, self-loops dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct UndirectedView {
    adjacency: Vec<BTreeSet<usize>>,
}

impl UndirectedView {
    pub fn new(n_nodes: usize) -> Self {
        UndirectedView {
            adjacency: vec![BTreeSet::new(); n_nodes],
        }
    }

    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize)]) -> Self {
        let mut view = UndirectedView::new(n_nodes);
        for &(u, v) in edges {
            view.add_edge(u, v);
        }
        view
    }

    pub fn from_pseudo_map(map: &PseudoMap) -> Self {
        let mut view = UndirectedView::new(map.n_nodes);
        for edge in &map.edges {
            view.add_edge(edge.source, edge.target);
        }
        view
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }
}

/// All maximal cliques (Bron-Kerbosch with pivoting), as sorted node
/// lists in lexicographic order. Isolated vertices yield singletons.
pub fn maximal_cliques(g: &UndirectedView) -> Vec<Vec<usize>> {
    let mut cliques = Vec::new();
    let p: BTreeSet<usize> = (0..g.n_nodes()).collect();
    let mut r = Vec::new();
    bron_kerbosch(g, &mut r, p, BTreeSet::new(), &mut cliques);
    for clique in &mut cliques {
        clique.sort_unstable();
    }
    cliques.sort();
    cliques
}

fn bron_kerbosch(
    g: &UndirectedView,
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    // Pivot: the vertex of P union X with the most neighbors in P.
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| g.neighbors(u).intersection(&p).count())
        .expect("P or X non-empty");
    let candidates: Vec<usize> = p.difference(g.neighbors(pivot)).copied().collect();
    for v in candidates {
        let neighbors = g.neighbors(v);
        let next_p = p.intersection(neighbors).copied().collect();
        let next_x = x.intersection(neighbors).copied().collect();
        r.push(v);
        bron_kerbosch(g, r, next_p, next_x, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Extended modularity of a cover with overlaps:
/// `EQ = 1/2m * sum_c sum_{v,w in c} (A_vw - k_v k_w / 2m) / (O_v O_w)`
/// over ordered node pairs including `v = w`. For covers where every
/// `O_v = 1` this is Newman modularity. Defined as 0 when the graph has
/// no edges.
pub fn extended_modularity(communities: &[BTreeSet<usize>], g: &UndirectedView) -> f64 {
    let m = g.n_edges();
    if m == 0 {
        return 0.0;
    }
    let two_m = 2.0 * m as f64;
    let mut memberships = vec![0usize; g.n_nodes()];
    for community in communities {
        for &v in community {
            assert!(v < g.n_nodes(), "cover node {v} outside the graph");
            memberships[v] += 1;
        }
    }
    let mut eq = 0.0;
    for community in communities {
        for &v in community {
            let kv = g.degree(v) as f64;
            for &w in community {
                let a = if g.has_edge(v, w) { 1.0 } else { 0.0 };
                let expected = kv * g.degree(w) as f64 / two_m;
                eq += (a - expected) / (memberships[v] * memberships[w]) as f64;
            }
        }
    }
    eq / two_m
}

/// An overlapping cover of the graph's nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    /// Kept communities in naming order: descending size, ties by
    /// smallest contained node. Community `k` is labeled `C(k+1)`.
    pub communities: Vec<BTreeSet<usize>>,
    /// Membership count `O_v` per node; 0 marks an outlier.
    pub membership: Vec<usize>,
    /// Nodes in no kept community.
    pub outliers: BTreeSet<usize>,
    /// Extended modularity of the kept communities.
    pub eq: f64,
}

impl Cover {
    pub fn community_label(index: usize) -> String {
        format!("C{}", index + 1)
    }

    /// Labels of the communities containing `node`, in naming order.
    pub fn memberships_of(&self, node: usize) -> Vec<String> {
        self.communities
            .iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&node))
            .map(|(i, _)| Cover::community_label(i))
            .collect()
    }
}

fn density(nodes: &BTreeSet<usize>, g: &UndirectedView) -> f64 {
    let size = nodes.len();
    if size < 2 {
        return 0.0;
    }
    let mut edges = 0usize;
    for &v in nodes {
        for &w in nodes {
            if w >= v {
                break;
            }
            if g.has_edge(v, w) {
                edges += 1;
            }
        }
    }
    edges as f64 / (size * (size - 1) / 2) as f64
}

fn union_is_connected(a: &BTreeSet<usize>, b: &BTreeSet<usize>, g: &UndirectedView) -> bool {
    if !a.is_disjoint(b) {
        return true;
    }
    a.iter()
        .any(|&u| g.neighbors(u).iter().any(|w| b.contains(w)))
}

/// Maximal-clique seeded agglomerative clustering with an EQ-optimal cut.
///
/// 1. Maximal cliques of size >= `clique_size_threshold` become the
///    initial communities; every vertex covered by none becomes a
///    singleton community.
/// 2. The pair of communities with maximal similarity (edge density of
///    the induced union; ties by lexicographic pair order) is merged
///    repeatedly. Only pairs whose union induces a connected subgraph
///    are candidates, so every community stays connected; a merged
///    community absorbs communities it contains.
/// 3. The dendrogram is cut at the level maximizing EQ (earliest level
///    on ties, i.e. the most communities).
/// 4. Communities smaller than `complex_size_threshold` are dropped and
///    their exclusive nodes reported as outliers.
pub fn eagle_cluster(
    g: &UndirectedView,
    clique_size_threshold: usize,
    complex_size_threshold: usize,
) -> Cover {
    let n = g.n_nodes();
    let mut communities: Vec<BTreeSet<usize>> = maximal_cliques(g)
        .into_iter()
        .filter(|c| c.len() >= clique_size_threshold)
        .map(|c| c.into_iter().collect())
        .collect();
    let covered: BTreeSet<usize> = communities.iter().flatten().copied().collect();
    for v in 0..n {
        if !covered.contains(&v) {
            communities.push(BTreeSet::from([v]));
        }
    }
    communities.sort();

    let mut levels = vec![communities.clone()];
    while communities.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..communities.len() {
            for j in (i + 1)..communities.len() {
                if !union_is_connected(&communities[i], &communities[j], g) {
                    continue;
                }
                let union: BTreeSet<usize> =
                    communities[i].union(&communities[j]).copied().collect();
                let sim = density(&union, g);
                if best.is_none_or(|(_, _, s)| sim > s) {
                    best = Some((i, j, sim));
                }
            }
        }
        let Some((i, j, _)) = best else {
            break; // Nothing mergeable: the graph is disconnected here.
        };
        let merged: BTreeSet<usize> = communities[i].union(&communities[j]).copied().collect();
        communities.remove(j);
        communities.remove(i);
        communities.retain(|c| !c.is_subset(&merged));
        communities.push(merged);
        communities.sort();
        levels.push(communities.clone());
    }

    let mut best_level = 0;
    let mut best_eq = f64::NEG_INFINITY;
    for (idx, level) in levels.iter().enumerate() {
        let eq = extended_modularity(level, g);
        if eq > best_eq {
            best_eq = eq;
            best_level = idx;
        }
    }

    let mut kept: Vec<BTreeSet<usize>> = levels[best_level]
        .iter()
        .filter(|c| c.len() >= complex_size_threshold)
        .cloned()
        .collect();
    kept.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.first().cmp(&b.first()))
            .then_with(|| a.cmp(b))
    });

    let mut membership = vec![0usize; n];
    for community in &kept {
        for &v in community {
            membership[v] += 1;
        }
    }
    let outliers: BTreeSet<usize> = (0..n).filter(|&v| membership[v] == 0).collect();
    let eq = extended_modularity(&kept, g);
    Cover {
        communities: kept,
        membership,
        outliers,
        eq,
    }
}

/// One intention (community) of the rebuilt map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionNode {
    pub label: String,
    pub members: BTreeSet<usize>,
}

/// Aggregated strategy edge between two intentions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionEdge {
    /// Index into `IntentionMap::intentions`.
    pub source: usize,
    pub target: usize,
    /// Strategy labels of the underlying pseudo-map edges.
    pub strategies: BTreeSet<String>,
    /// Sum of the underlying transition weights.
    pub weight: f64,
    /// True for self-edges that aggregate intra-community transitions.
    pub internal: bool,
}

/// Coarse-grained map: one node per intention plus Start/Stop
/// pseudo-nodes attached to the communities containing the selected
/// start/stop sub-intentions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionMap {
    pub intentions: Vec<IntentionNode>,
    pub edges: Vec<IntentionEdge>,
    pub start_node: Option<usize>,
    pub stop_node: Option<usize>,
    /// Intention indices the Start pseudo-node attaches to.
    pub start_attachments: Vec<usize>,
    /// Intention indices the Stop pseudo-node attaches to.
    pub stop_attachments: Vec<usize>,
}

/// Project the pseudo-map onto a cover. Every pseudo-map edge maps to one
/// aggregated edge per (community containing source, community containing
/// target) pair; edges with an outlier endpoint are dropped.
pub fn build_intention_map(
    pmap: &PseudoMap,
    cover: &Cover,
    start: Option<usize>,
    stop: Option<usize>,
) -> Result<IntentionMap> {
    for community in &cover.communities {
        if let Some(&v) = community.iter().find(|&&v| v >= pmap.n_nodes) {
            return Err(Error::domain(format!(
                "cover node {v} outside the {}-node pseudo-map",
                pmap.n_nodes
            )));
        }
    }
    for (what, value) in [("start", start), ("stop", stop)] {
        if let Some(node) = value {
            if node >= pmap.n_nodes {
                return Err(Error::domain(format!("{what} node {node} outside the map")));
            }
        }
    }

    let intentions: Vec<IntentionNode> = cover
        .communities
        .iter()
        .enumerate()
        .map(|(i, c)| IntentionNode {
            label: Cover::community_label(i),
            members: c.clone(),
        })
        .collect();

    let mut aggregated: BTreeMap<(usize, usize), (BTreeSet<String>, f64)> = BTreeMap::new();
    for edge in &pmap.edges {
        for (ci, community) in cover.communities.iter().enumerate() {
            if !community.contains(&edge.source) {
                continue;
            }
            for (cj, target_community) in cover.communities.iter().enumerate() {
                if !target_community.contains(&edge.target) {
                    continue;
                }
                let entry = aggregated
                    .entry((ci, cj))
                    .or_insert_with(|| (BTreeSet::new(), 0.0));
                entry.0.insert(edge.label.clone());
                entry.1 += edge.weight;
            }
        }
    }
    let edges: Vec<IntentionEdge> = aggregated
        .into_iter()
        .map(|((source, target), (strategies, weight))| IntentionEdge {
            source,
            target,
            strategies,
            weight,
            internal: source == target,
        })
        .collect();

    let attachments = |node: Option<usize>| -> Vec<usize> {
        node.map_or_else(Vec::new, |v| {
            cover
                .communities
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(&v))
                .map(|(i, _)| i)
                .collect()
        })
    };

    Ok(IntentionMap {
        intentions,
        edges,
        start_attachments: attachments(start),
        stop_attachments: attachments(stop),
        start_node: start,
        stop_node: stop,
    })
}
