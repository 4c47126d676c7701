//! Per-node and network-level statistics of the undirected map view.
//!
//! Conventions for disconnected graphs: closeness and the characteristic
//! path length are computed over reachable pairs only, eccentricity is
//! the maximum distance to any reachable node, and isolated nodes score
//! zero everywhere.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::clustering::UndirectedView;
use crate::error::{Error, Result};

/// Per-node statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMetrics {
    pub node: usize,
    /// `2 * triangles(v) / (deg(v) * (deg(v) - 1))`; 0 when deg < 2.
    pub clustering_coefficient: f64,
    /// Reachable-node count over the sum of distances to them; 0 for
    /// isolated nodes.
    pub closeness: f64,
    /// Maximum distance to any reachable node.
    pub eccentricity: usize,
    /// Mean degree of the neighbors; 0 when deg = 0.
    pub neighborhood_connectivity: f64,
}

/// Whole-network statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    /// Maximum finite eccentricity.
    pub diameter: usize,
    /// `2m / (n (n-1))`.
    pub density: f64,
    /// `sum(deg_max - deg_v) / ((n-1)(n-2))`; 0 when the denominator is 0.
    pub degree_centralization: f64,
    /// Mean over all finite pairwise distances; 0 when no pair is connected.
    pub characteristic_path_length: f64,
}

/// Distances from `source`; `usize::MAX` marks unreachable nodes.
fn bfs_distances(g: &UndirectedView, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n_nodes()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Compute all four per-node metrics for every node.
pub fn node_metrics(g: &UndirectedView) -> Vec<NodeMetrics> {
    (0..g.n_nodes())
        .map(|v| {
            let neighbors = g.neighbors(v);
            let degree = neighbors.len();

            let clustering_coefficient = if degree < 2 {
                0.0
            } else {
                let mut links = 0usize;
                for &a in neighbors {
                    for &b in neighbors {
                        if b >= a {
                            break;
                        }
                        if g.has_edge(a, b) {
                            links += 1;
                        }
                    }
                }
                2.0 * links as f64 / (degree * (degree - 1)) as f64
            };

            let dist = bfs_distances(g, v);
            let mut reachable = 0usize;
            let mut dist_sum = 0usize;
            let mut eccentricity = 0usize;
            for (w, &d) in dist.iter().enumerate() {
                if w != v && d != usize::MAX {
                    reachable += 1;
                    dist_sum += d;
                    eccentricity = eccentricity.max(d);
                }
            }
            let closeness = if dist_sum == 0 {
                0.0
            } else {
                reachable as f64 / dist_sum as f64
            };

            let neighborhood_connectivity = if degree == 0 {
                0.0
            } else {
                neighbors.iter().map(|&w| g.degree(w)).sum::<usize>() as f64 / degree as f64
            };

            NodeMetrics {
                node: v,
                clustering_coefficient,
                closeness,
                eccentricity,
                neighborhood_connectivity,
            }
        })
        .collect()
}

/// Compute the network-level metrics. Needs at least two nodes.
pub fn network_metrics(g: &UndirectedView) -> Result<NetworkMetrics> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::domain("network metrics need at least 2 nodes"));
    }
    let m = g.n_edges();
    let density = 2.0 * m as f64 / (n * (n - 1)) as f64;

    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let centralization_denominator = ((n - 1) * (n.saturating_sub(2))) as f64;
    let degree_centralization = if centralization_denominator == 0.0 {
        0.0
    } else {
        degrees
            .iter()
            .map(|&d| (max_degree - d) as f64)
            .sum::<f64>()
            / centralization_denominator
    };

    let mut diameter = 0usize;
    let mut pair_count = 0usize;
    let mut pair_sum = 0usize;
    for v in 0..n {
        let dist = bfs_distances(g, v);
        for (w, &d) in dist.iter().enumerate() {
            if w > v && d != usize::MAX {
                pair_count += 1;
                pair_sum += d;
                diameter = diameter.max(d);
            }
        }
    }
    let characteristic_path_length = if pair_count == 0 {
        0.0
    } else {
        pair_sum as f64 / pair_count as f64
    };

    Ok(NetworkMetrics {
        diameter,
        density,
        degree_centralization,
        characteristic_path_length,
    })
}
