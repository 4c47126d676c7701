//! K-Means initialization for Baum-Welch.
//!
//! Events are clustered into `N` groups and the hard clustering is turned
//! into a smoothed initial HMM: cluster symbol counts become emission
//! rows, consecutive cluster pairs become transition rows, and cluster
//! membership of case-initial events becomes `pi`.
//!
//! One-dimensional clustering on the raw symbol id would impose a
//! meaningless metric on categorical activities, so each event is embedded
//! as its one-hot symbol vector, optionally extended by a small positional
//! coordinate (normalized position in the case). Distances are computed
//! against that embedding without materializing it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hmm::HmmModel;

/// Tuning knobs for [`kmeans_init_with`].
#[derive(Debug, Clone)]
pub struct KMeansOptions {
    /// Weight of the normalized-position coordinate. `None` clusters on
    /// the pure one-hot embedding.
    pub positional_weight: Option<f64>,
    /// Lloyd iteration cap.
    pub max_iterations: usize,
    /// Additive smoothing for the count-to-probability conversion, so no
    /// parameter of the initial model is exactly zero.
    pub smoothing: f64,
    /// Symbol count `M`; inferred as `max symbol + 1` when `None`.
    pub n_symbols: Option<usize>,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            positional_weight: Some(0.1),
            max_iterations: 100,
            smoothing: 1e-3,
            n_symbols: None,
        }
    }
}

/// One event in embedding space: its symbol plus the weighted position.
#[derive(Debug, Clone, Copy)]
struct Point {
    symbol: usize,
    position: f64,
}

/// Cluster centroid over the embedding.
#[derive(Debug, Clone)]
struct Centroid {
    symbol_mean: Vec<f64>,
    symbol_norm2: f64,
    position_mean: f64,
}

impl Centroid {
    fn from_point(point: &Point, m: usize) -> Self {
        let mut symbol_mean = vec![0.0; m];
        symbol_mean[point.symbol] = 1.0;
        Centroid {
            symbol_mean,
            symbol_norm2: 1.0,
            position_mean: point.position,
        }
    }

    /// Squared distance between the one-hot embedding of `point` and this
    /// centroid: `|c|^2 + 1 - 2*c[s] + (q - c_pos)^2`.
    fn distance2(&self, point: &Point) -> f64 {
        let dp = point.position - self.position_mean;
        self.symbol_norm2 + 1.0 - 2.0 * self.symbol_mean[point.symbol] + dp * dp
    }
}

/// K-Means initialization with default options.
pub fn kmeans_init(sequences: &[Vec<usize>], n_states: usize, seed: u64) -> Result<HmmModel> {
    kmeans_init_with(sequences, n_states, seed, &KMeansOptions::default())
}

/// Cluster events and estimate a smoothed initial HMM from the clustering.
/// Deterministic for a fixed seed.
pub fn kmeans_init_with(
    sequences: &[Vec<usize>],
    n_states: usize,
    seed: u64,
    options: &KMeansOptions,
) -> Result<HmmModel> {
    if sequences.is_empty() || sequences.iter().all(Vec::is_empty) {
        return Err(Error::domain("k-means init requires at least one event"));
    }
    if n_states == 0 {
        return Err(Error::domain("n_states must be at least 1"));
    }

    let mut points: Vec<Point> = Vec::new();
    let mut case_spans: Vec<(usize, usize)> = Vec::new();
    let mut max_symbol = 0usize;
    for seq in sequences {
        let start = points.len();
        let denom = (seq.len().saturating_sub(1)).max(1) as f64;
        for (t, &symbol) in seq.iter().enumerate() {
            max_symbol = max_symbol.max(symbol);
            let position = options
                .positional_weight
                .map_or(0.0, |w| w * t as f64 / denom);
            points.push(Point { symbol, position });
        }
        case_spans.push((start, points.len()));
    }
    let m = match options.n_symbols {
        Some(m) if m > max_symbol => m,
        Some(_) => {
            return Err(Error::domain("n_symbols smaller than observed symbols"));
        }
        None => max_symbol + 1,
    };
    if n_states > points.len() {
        return Err(Error::domain(format!(
            "n_states {} exceeds the observation count {}",
            n_states,
            points.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, points.len(), n_states);
    let mut centroids: Vec<Centroid> = chosen
        .iter()
        .map(|idx| Centroid::from_point(&points[idx], m))
        .collect();

    let mut assignment = vec![0usize; points.len()];
    let mut distances = vec![0.0f64; points.len()];
    for _ in 0..options.max_iterations {
        // Assignment step; ties go to the lowest cluster index.
        let mut changed = false;
        for (idx, point) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = centroid.distance2(point);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignment[idx] != best {
                assignment[idx] = best;
                changed = true;
            }
            distances[idx] = best_d;
        }

        // Any empty cluster is reseeded at the point farthest from its
        // current centroid (lowest index on ties).
        let mut sizes = vec![0usize; n_states];
        for &a in &assignment {
            sizes[a] += 1;
        }
        for cluster in 0..n_states {
            if sizes[cluster] > 0 {
                continue;
            }
            let mut far_idx = None;
            let mut far_d = f64::NEG_INFINITY;
            for (idx, &d) in distances.iter().enumerate() {
                if sizes[assignment[idx]] > 1 && d > far_d {
                    far_d = d;
                    far_idx = Some(idx);
                }
            }
            if let Some(idx) = far_idx {
                sizes[assignment[idx]] -= 1;
                assignment[idx] = cluster;
                sizes[cluster] = 1;
                distances[idx] = 0.0;
                changed = true;
            }
        }

        if !changed {
            break;
        }

        // Update step.
        let mut sums: Vec<Vec<f64>> = vec![vec![0.0; m]; n_states];
        let mut pos_sums = vec![0.0f64; n_states];
        for (idx, point) in points.iter().enumerate() {
            let a = assignment[idx];
            sums[a][point.symbol] += 1.0;
            pos_sums[a] += point.position;
        }
        for cluster in 0..n_states {
            let size = sizes[cluster] as f64;
            if size == 0.0 {
                continue;
            }
            let mean: Vec<f64> = sums[cluster].iter().map(|&s| s / size).collect();
            let norm2 = mean.iter().map(|&v| v * v).sum();
            centroids[cluster] = Centroid {
                symbol_mean: mean,
                symbol_norm2: norm2,
                position_mean: pos_sums[cluster] / size,
            };
        }
    }

    // Hard clustering -> smoothed model estimates.
    let alpha = options.smoothing;
    let mut emit_counts = vec![vec![0.0f64; m]; n_states];
    let mut trans_counts = vec![vec![0.0f64; n_states]; n_states];
    let mut initial_counts = vec![0.0f64; n_states];
    for &(start, end) in &case_spans {
        if start == end {
            continue;
        }
        initial_counts[assignment[start]] += 1.0;
        for idx in start..end {
            emit_counts[assignment[idx]][points[idx].symbol] += 1.0;
            if idx + 1 < end {
                trans_counts[assignment[idx]][assignment[idx + 1]] += 1.0;
            }
        }
    }

    let smooth = |counts: &[f64]| -> Vec<f64> {
        let total: f64 = counts.iter().sum::<f64>() + alpha * counts.len() as f64;
        counts.iter().map(|&c| (c + alpha) / total).collect()
    };
    HmmModel::new(
        smooth(&initial_counts),
        trans_counts.iter().map(|row| smooth(row)).collect(),
        emit_counts.iter().map(|row| smooth(row)).collect(),
    )
}
