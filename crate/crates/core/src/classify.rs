//! Relevance classifiers and review-quality metrics.
//!
//! Two models share a scoring interface: a multinomial naïve Bayes
//! classifier (additive smoothing, log-posterior-odds scores) and a linear
//! margin model trained by hinge-loss stochastic subgradient descent with L2
//! regularization. Scores rank documents for the active-learning loop;
//! `score > 0` is the relevance decision.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::text::BowMatrix;

/// Multinomial naïve Bayes over term counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbModel {
    pub n_terms: usize,
    pub smoothing: f64,
    pub log_prior_relevant: f64,
    pub log_prior_nonrelevant: f64,
    /// `ln P(term | relevant)` per vocabulary index.
    pub log_likelihood_relevant: Vec<f64>,
    /// `ln P(term | nonrelevant)` per vocabulary index.
    pub log_likelihood_nonrelevant: Vec<f64>,
}

impl NbModel {
    /// Unnormalized class log-joint `ln P(class) + ln P(doc | class)`.
    pub fn log_joint(&self, row: &[(u32, u32)], relevant: bool) -> f64 {
        let (prior, likelihood) = if relevant {
            (self.log_prior_relevant, &self.log_likelihood_relevant)
        } else {
            (self.log_prior_nonrelevant, &self.log_likelihood_nonrelevant)
        };
        prior
            + row
                .iter()
                .map(|&(term, count)| f64::from(count) * likelihood[term as usize])
                .sum::<f64>()
    }
}

/// Trains a multinomial naïve Bayes model. Priors come from the label
/// frequencies; term probabilities use additive smoothing.
pub fn train_nb(bow: &BowMatrix, labels: &[bool], smoothing: f64) -> Result<NbModel> {
    if labels.len() != bow.n_docs() {
        return Err(Error::LengthMismatch {
            left: bow.n_docs(),
            right: labels.len(),
        });
    }
    if !(smoothing > 0.0) {
        return Err(Error::domain("smoothing", "smoothing > 0", smoothing));
    }
    let n_relevant = labels.iter().filter(|&&l| l).count();
    if n_relevant == 0 || n_relevant == labels.len() {
        return Err(Error::SingleClass);
    }
    let v = bow.n_terms;
    let mut counts_rel = vec![0u64; v];
    let mut counts_non = vec![0u64; v];
    let mut total_rel = 0u64;
    let mut total_non = 0u64;
    for (doc, &label) in labels.iter().enumerate() {
        let (counts, total) = if label {
            (&mut counts_rel, &mut total_rel)
        } else {
            (&mut counts_non, &mut total_non)
        };
        for &(term, count) in bow.row(doc) {
            counts[term as usize] += u64::from(count);
            *total += u64::from(count);
        }
    }
    let denom_rel = total_rel as f64 + smoothing * v as f64;
    let denom_non = total_non as f64 + smoothing * v as f64;
    Ok(NbModel {
        n_terms: v,
        smoothing,
        log_prior_relevant: (n_relevant as f64 / labels.len() as f64).ln(),
        log_prior_nonrelevant: ((labels.len() - n_relevant) as f64 / labels.len() as f64).ln(),
        log_likelihood_relevant: counts_rel
            .iter()
            .map(|&c| ((c as f64 + smoothing) / denom_rel).ln())
            .collect(),
        log_likelihood_nonrelevant: counts_non
            .iter()
            .map(|&c| ((c as f64 + smoothing) / denom_non).ln())
            .collect(),
    })
}

/// Hyperparameters for the linear margin model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    pub epochs: usize,
    /// Base learning rate; epoch `t` uses `learning_rate / t`.
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl LinearConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            epochs: 20,
            learning_rate: 0.1,
            l2: 1e-4,
            seed,
        }
    }
}

/// Linear margin model: `score(doc) = weights · counts + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Objective (mean hinge + L2 penalty) after each epoch.
    pub epoch_loss: Vec<f64>,
}

/// Trains the linear model by stochastic subgradient descent on the hinge
/// loss with L2 regularization. Document order is reshuffled each epoch from
/// the configured seed, so training is deterministic.
pub fn train_linear(bow: &BowMatrix, labels: &[bool], config: &LinearConfig) -> Result<LinearModel> {
    if labels.len() != bow.n_docs() {
        return Err(Error::LengthMismatch {
            left: bow.n_docs(),
            right: labels.len(),
        });
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::SingleClass);
    }
    if config.epochs == 0 {
        return Err(Error::domain("epochs", "epochs >= 1", 0.0));
    }
    if !(config.learning_rate > 0.0) {
        return Err(Error::domain("learning_rate", "rate > 0", config.learning_rate));
    }
    if !(config.l2 >= 0.0) {
        return Err(Error::domain("l2", "l2 >= 0", config.l2));
    }

    let v = bow.n_terms;
    // w is stored as scale * values so the per-step L2 shrink stays O(1).
    let mut values = vec![0.0f64; v];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let mut order: Vec<usize> = (0..bow.n_docs()).collect();
    let mut epoch_loss = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let mut rng = SplitMix64::new(derive_seed(config.seed, epoch as u64));
        rng.shuffle(&mut order);
        let rate = config.learning_rate / epoch as f64;
        for &doc in &order {
            let row = bow.row(doc);
            let y = if labels[doc] { 1.0 } else { -1.0 };
            let score = scale
                * row
                    .iter()
                    .map(|&(t, c)| f64::from(c) * values[t as usize])
                    .sum::<f64>()
                + bias;
            if config.l2 > 0.0 {
                scale *= 1.0 - rate * config.l2;
                if scale < 1e-9 {
                    for value in &mut values {
                        *value *= scale;
                    }
                    scale = 1.0;
                }
            }
            if y * score < 1.0 {
                for &(t, c) in row {
                    values[t as usize] += rate * y * f64::from(c) / scale;
                }
                bias += rate * y;
            }
        }
        let weights: Vec<f64> = values.iter().map(|&w| w * scale).collect();
        epoch_loss.push(objective(bow, labels, &weights, bias, config.l2));
    }

    Ok(LinearModel {
        weights: values.iter().map(|&w| w * scale).collect(),
        bias,
        epoch_loss,
    })
}

fn objective(bow: &BowMatrix, labels: &[bool], weights: &[f64], bias: f64, l2: f64) -> f64 {
    let mut hinge = 0.0;
    for (doc, &label) in labels.iter().enumerate() {
        let y = if label { 1.0 } else { -1.0 };
        let score = bow
            .row(doc)
            .iter()
            .map(|&(t, c)| f64::from(c) * weights[t as usize])
            .sum::<f64>()
            + bias;
        hinge += (1.0 - y * score).max(0.0);
    }
    hinge / labels.len() as f64 + l2 * weights.iter().map(|&w| w * w).sum::<f64>()
}

/// Anything that turns a bag-of-words row into a relevance score.
pub trait Scorer {
    fn n_terms(&self) -> usize;
    /// Relevance score; positive means predicted relevant.
    fn score(&self, row: &[(u32, u32)]) -> f64;
}

impl Scorer for NbModel {
    fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// Log-posterior-odds of relevance.
    fn score(&self, row: &[(u32, u32)]) -> f64 {
        self.log_joint(row, true) - self.log_joint(row, false)
    }
}

impl Scorer for LinearModel {
    fn n_terms(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, row: &[(u32, u32)]) -> f64 {
        row.iter()
            .map(|&(t, c)| f64::from(c) * self.weights[t as usize])
            .sum::<f64>()
            + self.bias
    }
}

/// Scores every document; the boolean is the `score > 0` decision.
pub fn predict_scores<S: Scorer>(model: &S, bow: &BowMatrix) -> Result<Vec<(f64, bool)>> {
    if model.n_terms() != bow.n_terms {
        return Err(Error::VocabularyMismatch {
            model: model.n_terms(),
            matrix: bow.n_terms,
        });
    }
    Ok((0..bow.n_docs())
        .map(|doc| {
            let score = model.score(bow.row(doc));
            (score, score > 0.0)
        })
        .collect())
}

/// Indices sorted by descending score; ties broken by ascending document id,
/// making the ranking a total order.
pub fn ranked_indices(scores: &[f64], ids: &[String]) -> Result<Vec<usize>> {
    if scores.len() != ids.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: ids.len(),
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then_with(|| ids[a].cmp(&ids[b]))
    });
    Ok(order)
}

/// Confusion counts with recall and precision. The rate fields are omitted
/// when their denominators are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recall: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<f64>,
}

pub fn evaluate_metrics(predicted: &[bool], actual: &[bool]) -> Result<EvalReport> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    let mut tn = 0u64;
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
    Ok(EvalReport {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        true_negatives: tn,
        recall: ratio(tp, tp + fn_),
        precision: ratio(tp, tp + fp),
    })
}

/// Fraction of all relevant documents in the produced set, where the
/// produced set is every training relevant plus the holdout documents
/// predicted relevant (identified relevants are always produced).
pub fn produced_set_recall(
    training_relevant_ids: &BTreeSet<String>,
    predicted_relevant_holdout_ids: &BTreeSet<String>,
    all_relevant_ids: &BTreeSet<String>,
) -> Result<f64> {
    if all_relevant_ids.is_empty() {
        return Err(Error::EmptyInput("all_relevant_ids"));
    }
    if !training_relevant_ids.is_subset(all_relevant_ids) {
        return Err(Error::InvalidConfig(
            "training relevants must be a subset of all relevants".into(),
        ));
    }
    let produced = training_relevant_ids.len()
        + predicted_relevant_holdout_ids
            .iter()
            .filter(|id| all_relevant_ids.contains(*id) && !training_relevant_ids.contains(*id))
            .count();
    Ok(produced as f64 / all_relevant_ids.len() as f64)
}

/// The whole-set reading: re-score every relevant document (training ones
/// included) and count the hits.
pub fn whole_set_recall(
    predicted_relevant_ids: &BTreeSet<String>,
    all_relevant_ids: &BTreeSet<String>,
) -> Result<f64> {
    if all_relevant_ids.is_empty() {
        return Err(Error::EmptyInput("all_relevant_ids"));
    }
    let hits = predicted_relevant_ids
        .iter()
        .filter(|id| all_relevant_ids.contains(*id))
        .count();
    Ok(hits as f64 / all_relevant_ids.len() as f64)
}

/// Seeded train/holdout split with fixed per-class training counts: a
/// uniform draw without replacement inside each class, no further
/// stratification. Returns ascending index lists.
pub fn split_by_class_counts(
    labels: &[bool],
    relevant_train: usize,
    nonrelevant_train: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let relevant: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let nonrelevant: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if relevant_train > relevant.len() {
        return Err(Error::InvalidConfig(format!(
            "requested {relevant_train} relevant training docs, corpus has {}",
            relevant.len()
        )));
    }
    if nonrelevant_train > nonrelevant.len() {
        return Err(Error::InvalidConfig(format!(
            "requested {nonrelevant_train} nonrelevant training docs, corpus has {}",
            nonrelevant.len()
        )));
    }
    let mut train = Vec::with_capacity(relevant_train + nonrelevant_train);
    let mut holdout = Vec::new();
    for (stream, pool, take) in [
        (0u64, relevant, relevant_train),
        (1u64, nonrelevant, nonrelevant_train),
    ] {
        let mut pool = pool;
        let mut rng = SplitMix64::new(derive_seed(seed, stream));
        rng.shuffle(&mut pool);
        train.extend(&pool[..take]);
        holdout.extend(&pool[take..]);
    }
    train.sort_unstable();
    holdout.sort_unstable();
    Ok((train, holdout))
}
