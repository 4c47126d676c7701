//! Discrete-emission hidden Markov models: evaluation, decoding,
//! unsupervised learning, and sampling.
//!
//! The model is `H = {pi, T, E}`: an initial state vector, a row-stochastic
//! `N x N` transition matrix and a row-stochastic `N x M` emission matrix.
//! Forward/backward use per-timestep scaling so sequences of length 10^4
//! and beyond do not underflow; Viterbi runs in log space.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-stochastic tolerance enforced on construction.
const ROW_SUM_TOL: f64 = 1e-9;
/// Looser tolerance accepted when loading external documents.
const LOAD_ROW_SUM_TOL: f64 = 1e-6;
/// Smoothing floor applied when a state receives zero expected occupancy.
const STARVED_FLOOR: f64 = 1e-12;

/// A discrete-emission HMM with `N` hidden states over `M` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    pub n_states: usize,
    pub n_symbols: usize,
    /// Initial state distribution, length `N`.
    pub pi: Vec<f64>,
    /// Transition matrix: `trans[i][j] = P(state j | state i)`.
    pub trans: Vec<Vec<f64>>,
    /// Emission matrix: `emit[i][k] = P(symbol k | state i)`.
    pub emit: Vec<Vec<f64>>,
}

impl HmmModel {
    /// Build a model from raw parameters, validating shape and stochasticity.
    pub fn new(pi: Vec<f64>, trans: Vec<Vec<f64>>, emit: Vec<Vec<f64>>) -> Result<Self> {
        let n_states = pi.len();
        if n_states == 0 {
            return Err(Error::domain("model must have at least one state"));
        }
        let n_symbols = emit.first().map(Vec::len).unwrap_or(0);
        if n_symbols == 0 {
            return Err(Error::domain("model must have at least one symbol"));
        }
        let model = HmmModel {
            n_states,
            n_symbols,
            pi,
            trans,
            emit,
        };
        model.validate(ROW_SUM_TOL)?;
        Ok(model)
    }

    /// Uniform model: `pi = 1/N`, transition rows `1/N`, emission rows `1/M`.
    pub fn init_uniform(n_states: usize, n_symbols: usize) -> Result<Self> {
        if n_states == 0 || n_symbols == 0 {
            return Err(Error::domain("state and symbol counts must be at least 1"));
        }
        Ok(HmmModel {
            n_states,
            n_symbols,
            pi: vec![1.0 / n_states as f64; n_states],
            trans: vec![vec![1.0 / n_states as f64; n_states]; n_states],
            emit: vec![vec![1.0 / n_symbols as f64; n_symbols]; n_states],
        })
    }

    /// Check shapes, entry ranges, and row sums within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.pi.len() != self.n_states
            || self.trans.len() != self.n_states
            || self.emit.len() != self.n_states
        {
            return Err(Error::validation("parameter shapes do not match n_states"));
        }
        let check_row = |row: &[f64], len: usize, what: &str| -> Result<()> {
            if row.len() != len {
                return Err(Error::validation(format!("{what} has wrong length")));
            }
            let mut sum = 0.0;
            for &v in row {
                if !(0.0..=1.0 + tol).contains(&v) {
                    return Err(Error::validation(format!("{what} entry {v} outside [0,1]")));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > tol {
                return Err(Error::validation(format!(
                    "{what} sums to {sum}, expected 1"
                )));
            }
            Ok(())
        };
        check_row(&self.pi, self.n_states, "pi")?;
        for (i, row) in self.trans.iter().enumerate() {
            check_row(row, self.n_states, &format!("transition row {i}"))?;
        }
        for (i, row) in self.emit.iter().enumerate() {
            check_row(row, self.n_symbols, &format!("emission row {i}"))?;
        }
        Ok(())
    }

    /// Relabel states: new state `i` takes the parameters of old state
    /// `perm[i]`. `perm` must be a permutation of `0..N`.
    pub fn permute_states(&self, perm: &[usize]) -> Result<HmmModel> {
        if perm.len() != self.n_states {
            return Err(Error::domain("permutation length must equal n_states"));
        }
        let mut seen = vec![false; self.n_states];
        for &p in perm {
            if p >= self.n_states || seen[p] {
                return Err(Error::domain("not a permutation of the state set"));
            }
            seen[p] = true;
        }
        Ok(HmmModel {
            n_states: self.n_states,
            n_symbols: self.n_symbols,
            pi: perm.iter().map(|&p| self.pi[p]).collect(),
            trans: perm
                .iter()
                .map(|&p| perm.iter().map(|&q| self.trans[p][q]).collect())
                .collect(),
            emit: perm.iter().map(|&p| self.emit[p].clone()).collect(),
        })
    }
}

fn validate_sequence(model: &HmmModel, sequence: &[usize]) -> Result<()> {
    if sequence.is_empty() {
        return Err(Error::domain("sequence must be non-empty"));
    }
    for (pos, &symbol) in sequence.iter().enumerate() {
        if symbol >= model.n_symbols {
            return Err(Error::domain(format!(
                "symbol {symbol} at position {pos} out of range (M={})",
                model.n_symbols
            )));
        }
    }
    Ok(())
}

/// Scaled forward table.
///
/// Row `t` of `alphas` sums to 1; the true forward variable is
/// `alpha_t(i) = alphas[t][i] * exp(log_scales[t])` where `log_scales[t]`
/// is the cumulative log normalizer up to and including step `t`.
/// `log_likelihood = log_scales[T-1] = log P(sequence | model)`.
#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub log_likelihood: f64,
    pub alphas: Vec<Vec<f64>>,
    pub log_scales: Vec<f64>,
}

/// Scaled backward table.
///
/// The true backward variable is
/// `beta_t(i) = betas[t][i] * exp(log_scales[t])` where `log_scales[t]`
/// accumulates the normalizers of steps `t..T-1`. The last row is all
/// ones with log scale 0.
#[derive(Debug, Clone)]
pub struct BackwardResult {
    pub betas: Vec<Vec<f64>>,
    pub log_scales: Vec<f64>,
}

/// Forward algorithm with per-step scaling.
pub fn forward(model: &HmmModel, sequence: &[usize]) -> Result<ForwardResult> {
    validate_sequence(model, sequence)?;
    let n = model.n_states;
    let len = sequence.len();
    let mut alphas = vec![vec![0.0; n]; len];
    let mut log_scales = vec![0.0; len];

    let mut scale_sum = 0.0;
    for t in 0..len {
        let symbol = sequence[t];
        let mut norm = 0.0;
        if t == 0 {
            for i in 0..n {
                let a = model.pi[i] * model.emit[i][symbol];
                alphas[0][i] = a;
                norm += a;
            }
        } else {
            let (prev_rows, cur_rows) = alphas.split_at_mut(t);
            let prev = &prev_rows[t - 1];
            let cur = &mut cur_rows[0];
            for (j, slot) in cur.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += prev[i] * model.trans[i][j];
                }
                let a = acc * model.emit[j][symbol];
                *slot = a;
                norm += a;
            }
        }
        if norm > 0.0 {
            for a in alphas[t].iter_mut() {
                *a /= norm;
            }
            scale_sum += norm.ln();
        } else {
            // The sequence is impossible under the model from here on.
            scale_sum = f64::NEG_INFINITY;
        }
        log_scales[t] = scale_sum;
    }

    Ok(ForwardResult {
        log_likelihood: log_scales[len - 1],
        alphas,
        log_scales,
    })
}

/// Backward algorithm with per-step scaling.
pub fn backward(model: &HmmModel, sequence: &[usize]) -> Result<BackwardResult> {
    validate_sequence(model, sequence)?;
    let n = model.n_states;
    let len = sequence.len();
    let mut betas = vec![vec![0.0; n]; len];
    let mut log_scales = vec![0.0; len];

    betas[len - 1] = vec![1.0; n];
    for t in (0..len.saturating_sub(1)).rev() {
        let symbol_next = sequence[t + 1];
        let mut norm = 0.0;
        let (cur_rows, next_rows) = betas.split_at_mut(t + 1);
        let next = &next_rows[0];
        let cur = &mut cur_rows[t];
        for (i, slot) in cur.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..n {
                acc += model.trans[i][j] * model.emit[j][symbol_next] * next[j];
            }
            *slot = acc;
            norm += acc;
        }
        if norm > 0.0 {
            for b in cur.iter_mut() {
                *b /= norm;
            }
            log_scales[t] = norm.ln() + log_scales[t + 1];
        } else {
            log_scales[t] = f64::NEG_INFINITY;
        }
    }

    Ok(BackwardResult { betas, log_scales })
}

/// Most likely state path and its log joint probability.
///
/// Ties are broken toward the lowest state index at every backtrack step,
/// including the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiResult {
    pub path: Vec<usize>,
    pub log_probability: f64,
}

/// Viterbi decoding in log space.
pub fn viterbi(model: &HmmModel, sequence: &[usize]) -> Result<ViterbiResult> {
    validate_sequence(model, sequence)?;
    let n = model.n_states;
    let len = sequence.len();

    let log_pi: Vec<f64> = model.pi.iter().map(|&p| p.ln()).collect();
    let log_trans: Vec<Vec<f64>> = model
        .trans
        .iter()
        .map(|row| row.iter().map(|&p| p.ln()).collect())
        .collect();
    let log_emit: Vec<Vec<f64>> = model
        .emit
        .iter()
        .map(|row| row.iter().map(|&p| p.ln()).collect())
        .collect();

    let mut score: Vec<f64> = (0..n)
        .map(|i| log_pi[i] + log_emit[i][sequence[0]])
        .collect();
    let mut backpointers: Vec<Vec<usize>> = Vec::with_capacity(len.saturating_sub(1));

    for &symbol in &sequence[1..] {
        let mut next_score = vec![f64::NEG_INFINITY; n];
        let mut pointers = vec![0usize; n];
        for j in 0..n {
            let mut best = f64::NEG_INFINITY;
            let mut best_prev = 0usize;
            for (i, &s) in score.iter().enumerate() {
                let cand = s + log_trans[i][j];
                if cand > best {
                    best = cand;
                    best_prev = i;
                }
            }
            next_score[j] = best + log_emit[j][symbol];
            pointers[j] = best_prev;
        }
        score = next_score;
        backpointers.push(pointers);
    }

    let mut best_state = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &s) in score.iter().enumerate() {
        if s > best_score {
            best_score = s;
            best_state = i;
        }
    }

    let mut path = vec![best_state; len];
    for t in (1..len).rev() {
        path[t - 1] = backpointers[t - 1][path[t]];
    }

    Ok(ViterbiResult {
        path,
        log_probability: best_score,
    })
}

/// Outcome of a Baum-Welch run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingReport {
    pub iterations_run: usize,
    /// Total log-likelihood of the data under the parameters at the start
    /// of each iteration. Non-decreasing by EM.
    pub log_likelihood_per_iteration: Vec<f64>,
    pub converged_early: bool,
    /// States whose expected occupancy hit zero in some iteration; their
    /// rows were re-normalized with a smoothing floor.
    pub starved_states: BTreeSet<usize>,
}

/// Multi-sequence Baum-Welch. Expected counts are accumulated over all
/// sequences (unweighted) with scaled forward-backward, then `pi`, `T`
/// and `E` are re-normalized. Stops after `max_iterations` or as soon as
/// the total log-likelihood improves by less than `tolerance`.
pub fn baum_welch(
    model: &HmmModel,
    sequences: &[Vec<usize>],
    max_iterations: usize,
    tolerance: f64,
) -> Result<(HmmModel, TrainingReport)> {
    model.validate(ROW_SUM_TOL)?;
    if sequences.is_empty() {
        return Err(Error::domain("training requires at least one sequence"));
    }
    for seq in sequences {
        validate_sequence(model, seq)?;
    }

    let n = model.n_states;
    let m = model.n_symbols;
    let mut current = model.clone();
    let mut curve: Vec<f64> = Vec::with_capacity(max_iterations);
    let mut converged_early = false;
    let mut starved_states = BTreeSet::new();

    for _ in 0..max_iterations {
        let mut pi_acc = vec![0.0; n];
        let mut trans_acc = vec![vec![0.0; n]; n];
        let mut emit_acc = vec![vec![0.0; m]; n];
        let mut total_ll = 0.0;

        for seq in sequences {
            let fwd = forward(&current, seq)?;
            if !fwd.log_likelihood.is_finite() {
                return Err(Error::domain(
                    "a training sequence has zero probability under the model",
                ));
            }
            let bwd = backward(&current, seq)?;
            total_ll += fwd.log_likelihood;
            let len = seq.len();

            let mut gamma = vec![0.0; n];
            for t in 0..len {
                // State posterior at t: scaled alpha*beta, renormalized.
                let mut norm = 0.0;
                for i in 0..n {
                    gamma[i] = fwd.alphas[t][i] * bwd.betas[t][i];
                    norm += gamma[i];
                }
                for g in gamma.iter_mut() {
                    *g /= norm;
                }
                if t == 0 {
                    for i in 0..n {
                        pi_acc[i] += gamma[i];
                    }
                }
                let symbol = seq[t];
                for i in 0..n {
                    emit_acc[i][symbol] += gamma[i];
                }
                if t + 1 < len {
                    let symbol_next = seq[t + 1];
                    // Joint transition posterior, renormalized over (i, j).
                    let mut xi_norm = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            xi_norm += fwd.alphas[t][i]
                                * current.trans[i][j]
                                * current.emit[j][symbol_next]
                                * bwd.betas[t + 1][j];
                        }
                    }
                    for i in 0..n {
                        let a = fwd.alphas[t][i];
                        if a == 0.0 {
                            continue;
                        }
                        for j in 0..n {
                            trans_acc[i][j] += a
                                * current.trans[i][j]
                                * current.emit[j][symbol_next]
                                * bwd.betas[t + 1][j]
                                / xi_norm;
                        }
                    }
                }
            }
        }

        if let Some(&prev) = curve.last() {
            if total_ll - prev < tolerance {
                curve.push(total_ll);
                converged_early = true;
                break;
            }
        }
        curve.push(total_ll);

        let normalize = |row: &[f64], state: usize, starved: &mut BTreeSet<usize>| -> Vec<f64> {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row.iter().map(|&v| v / sum).collect()
            } else {
                starved.insert(state);
                let floored: Vec<f64> = row.iter().map(|&v| v.max(STARVED_FLOOR)).collect();
                let fsum: f64 = floored.iter().sum();
                floored.into_iter().map(|v| v / fsum).collect()
            }
        };

        let pi_sum: f64 = pi_acc.iter().sum();
        current = HmmModel {
            n_states: n,
            n_symbols: m,
            pi: pi_acc.iter().map(|&v| v / pi_sum).collect(),
            trans: (0..n)
                .map(|i| normalize(&trans_acc[i], i, &mut starved_states))
                .collect(),
            emit: (0..n)
                .map(|i| normalize(&emit_acc[i], i, &mut starved_states))
                .collect(),
        };
    }

    let report = TrainingReport {
        iterations_run: curve.len(),
        log_likelihood_per_iteration: curve,
        converged_early,
        starved_states,
    };
    Ok((current, report))
}

/// Case-length distribution used by [`sample`] and the synthetic generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthLaw {
    /// Every case has exactly this many events.
    Fixed(usize),
    /// Length `k >= 1` with probability `(1-p)^(k-1) * p`, truncated at `max`.
    Geometric { p: f64, max: usize },
}

impl LengthLaw {
    fn validate(&self) -> Result<()> {
        match self {
            LengthLaw::Fixed(k) if *k >= 1 => Ok(()),
            LengthLaw::Fixed(_) => Err(Error::domain("fixed case length must be at least 1")),
            LengthLaw::Geometric { p, max } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(Error::domain("geometric p must be in (0, 1]"));
                }
                if *max < 1 {
                    return Err(Error::domain("geometric max must be at least 1"));
                }
                Ok(())
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            LengthLaw::Fixed(k) => *k,
            LengthLaw::Geometric { p, max } => {
                let mut len = 1;
                while len < *max && rng.random::<f64>() >= *p {
                    len += 1;
                }
                len
            }
        }
    }
}

fn sample_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
            cumulative += p;
            if u < cumulative {
                return i;
            }
        }
    }
    last_positive
}

/// Draw `n_cases` observation sequences from the model. Deterministic for
/// a fixed seed.
pub fn sample(
    model: &HmmModel,
    n_cases: usize,
    length_law: &LengthLaw,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    model.validate(ROW_SUM_TOL)?;
    length_law.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(n_cases);
    for _ in 0..n_cases {
        let len = length_law.draw(&mut rng);
        let mut symbols = Vec::with_capacity(len);
        let mut state = sample_categorical(&mut rng, &model.pi);
        for t in 0..len {
            if t > 0 {
                state = sample_categorical(&mut rng, &model.trans[state]);
            }
            symbols.push(sample_categorical(&mut rng, &model.emit[state]));
        }
        cases.push(symbols);
    }
    Ok(cases)
}

/// On-disk model document: the model parameters plus an optional
/// activity vocabulary and the config fingerprint of the producing run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    pub n_states: usize,
    pub n_symbols: usize,
    pub pi: Vec<f64>,
    pub trans: Vec<Vec<f64>>,
    pub emit: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl ModelDocument {
    pub fn from_model(model: &HmmModel) -> Self {
        ModelDocument {
            n_states: model.n_states,
            n_symbols: model.n_symbols,
            pi: model.pi.clone(),
            trans: model.trans.clone(),
            emit: model.emit.clone(),
            vocabulary: None,
            config_hash: None,
        }
    }

    /// Validate and convert into a model. Rows off by more than 1e-6 are
    /// rejected; rows inside (1e-9, 1e-6] are re-normalized.
    pub fn into_model(self) -> Result<HmmModel> {
        if self.pi.len() != self.n_states {
            return Err(Error::validation("pi length does not match n_states"));
        }
        let mut model = HmmModel {
            n_states: self.n_states,
            n_symbols: self.n_symbols,
            pi: self.pi,
            trans: self.trans,
            emit: self.emit,
        };
        model.validate(LOAD_ROW_SUM_TOL)?;
        if model.validate(ROW_SUM_TOL).is_err() {
            let renorm = |row: &mut Vec<f64>| {
                let sum: f64 = row.iter().sum();
                for v in row.iter_mut() {
                    *v /= sum;
                }
            };
            renorm(&mut model.pi);
            model.trans.iter_mut().for_each(renorm);
            model.emit.iter_mut().for_each(renorm);
        }
        if let Some(vocab) = &self.vocabulary {
            if vocab.len() != model.n_symbols {
                return Err(Error::validation(
                    "vocabulary size does not match n_symbols",
                ));
            }
        }
        Ok(model)
    }
}

/// Serialize a model document as pretty JSON with a trailing newline.
pub fn serialize_model(doc: &ModelDocument) -> Result<String> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    Ok(text)
}

/// Parse a model document from JSON. Use [`ModelDocument::into_model`]
/// to validate and obtain the model itself.
pub fn deserialize_model(json: &str) -> Result<ModelDocument> {
    Ok(serde_json::from_str(json)?)
}
