//! Pipeline configuration: every tunable of the method in one place,
//! persisted alongside each output for provenance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eventlog::ColumnSchema;

/// All pipeline parameters. The fingerprint of this struct is embedded in
/// every artifact so runs can be told apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Hidden state count; `None` applies the `round(M / 3)` heuristic.
    pub n_states: Option<usize>,
    /// Transition pruning threshold.
    pub epsilon: f64,
    pub bw_iterations: usize,
    pub bw_tolerance: f64,
    /// Independent K-Means + Baum-Welch runs; the one with the best final
    /// log-likelihood wins.
    pub bw_restarts: usize,
    /// Additive smoothing of the K-Means count-to-probability step.
    pub kmeans_smoothing: f64,
    pub clique_size_threshold: usize,
    pub complex_size_threshold: usize,
    /// Emission probabilities below this are not listed in the strategy table.
    pub display_threshold: f64,
    pub seed: u64,
    pub schema: ColumnSchema,
    pub start_override: Option<usize>,
    pub stop_override: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n_states: None,
            epsilon: 0.15,
            bw_iterations: 50,
            bw_tolerance: 1e-6,
            bw_restarts: 1,
            kmeans_smoothing: 1e-3,
            clique_size_threshold: 3,
            complex_size_threshold: 2,
            display_threshold: 0.005,
            seed: 42,
            schema: ColumnSchema::default(),
            start_override: None,
            stop_override: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::domain("epsilon must be in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.display_threshold) {
            return Err(Error::domain("display threshold must be in [0, 1)"));
        }
        if self.bw_iterations == 0 {
            return Err(Error::domain("iteration budget must be at least 1"));
        }
        if self.bw_restarts == 0 {
            return Err(Error::domain("restart count must be at least 1"));
        }
        if self.kmeans_smoothing <= 0.0 {
            return Err(Error::domain("k-means smoothing must be positive"));
        }
        if self.clique_size_threshold == 0 || self.complex_size_threshold == 0 {
            return Err(Error::domain("clustering thresholds must be at least 1"));
        }
        if matches!(self.n_states, Some(0)) {
            return Err(Error::domain("n_states must be at least 1"));
        }
        Ok(())
    }

    /// The effective state count for a log with `n_activities` distinct
    /// activities: the explicit flag, or `round(M / 3)`, at least 1.
    pub fn resolved_n_states(&self, n_activities: usize) -> usize {
        self.n_states
            .unwrap_or_else(|| ((n_activities as f64 / 3.0).round() as usize).max(1))
    }

    /// FNV-1a fingerprint of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a(json.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |hash, &b| (hash ^ u64::from(b)).wrapping_mul(PRIME))
}
