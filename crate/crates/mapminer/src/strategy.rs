//! Strategy extraction: each hidden state of a learned model is a user
//! strategy, described by the activity distribution of its emission row.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eventlog::Vocabulary;
use crate::hmm::HmmModel;

/// One activity of a strategy with its exact emission probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyActivity {
    pub activity: String,
    pub probability: f64,
}

/// A hidden state viewed as a strategy: its visible activities in
/// descending probability order plus the learned initial probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    /// Zero-based state index; rendered as `S1..SN`.
    pub id: usize,
    pub label: String,
    /// Learned initial probability of the state.
    pub pi: f64,
    /// Activities with emission probability at or above the display
    /// threshold. Probabilities are kept exact; rounding is presentation.
    pub activities: Vec<StrategyActivity>,
    /// Emission mass below the display threshold, `1 - sum(listed)`.
    pub residual_mass: f64,
}

/// All strategies of a model, one per hidden state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyTable {
    pub display_threshold: f64,
    pub strategies: Vec<Strategy>,
}

/// Human-facing label of state `id`: `S1` for state 0 and so on.
pub fn strategy_label(id: usize) -> String {
    format!("S{}", id + 1)
}

/// Read the strategy table off a model's emission matrix. Activities with
/// emission probability below `display_threshold` are summarized as
/// residual mass instead of being listed.
pub fn extract_strategies(
    model: &HmmModel,
    vocabulary: &Vocabulary,
    display_threshold: f64,
) -> Result<StrategyTable> {
    if vocabulary.len() != model.n_symbols {
        return Err(Error::domain(format!(
            "vocabulary size {} does not match model n_symbols {}",
            vocabulary.len(),
            model.n_symbols
        )));
    }
    let strategies = model
        .emit
        .iter()
        .enumerate()
        .map(|(state, row)| {
            let mut activities: Vec<StrategyActivity> = row
                .iter()
                .enumerate()
                .filter(|&(_, &p)| p >= display_threshold)
                .map(|(symbol, &p)| StrategyActivity {
                    activity: vocabulary
                        .label(symbol)
                        .expect("symbol within vocabulary")
                        .to_string(),
                    probability: p,
                })
                .collect();
            activities.sort_by(|a, b| {
                b.probability
                    .partial_cmp(&a.probability)
                    .unwrap()
                    .then_with(|| a.activity.cmp(&b.activity))
            });
            let listed: f64 = activities.iter().map(|a| a.probability).sum();
            Strategy {
                id: state,
                label: strategy_label(state),
                pi: model.pi[state],
                activities,
                residual_mass: (1.0 - listed).max(0.0),
            }
        })
        .collect();
    Ok(StrategyTable {
        display_threshold,
        strategies,
    })
}
