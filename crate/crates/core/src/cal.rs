//! Continuous-active-learning review simulation.
//!
//! The protocol: label a random seed batch, then repeatedly retrain a
//! classifier on everything labeled so far, rank the unlabeled pool by
//! predicted relevance, and label the top batch. A simulated oracle supplies
//! the true labels. The run stops at the first batch where recall over the
//! whole pool reaches the target, or when the pool is exhausted, or at the
//! batch cap.
//!
//! A random-ordering baseline ([`run_random_order`]) replaces the ranking
//! with uniform random batches under the same stop rule; comparing the
//! order-1 entropy of the two topic sequences measures how much less random
//! the active-learning labeling order is.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::classify::{predict_scores, ranked_indices, train_linear, train_nb, LinearConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::stats::{entropy_rate, EntropyEstimate};
use crate::text::BowMatrix;

const NS_RANDOM_BATCHES: u64 = 0;
const NS_CLASSIFIER: u64 = 1;

/// The document pool a review runs over.
#[derive(Debug, Clone, PartialEq)]
pub struct CalCorpus {
    pub ids: Vec<String>,
    pub bow: BowMatrix,
    /// Oracle label per document.
    pub relevant: Vec<bool>,
    /// Dominant topic per document where known (used for coverage audits
    /// and the topic sequence of relevant documents).
    pub topics: Vec<Option<String>>,
}

impl CalCorpus {
    fn validate(&self) -> Result<()> {
        if self.ids.is_empty() {
            return Err(Error::EmptyInput("corpus"));
        }
        for (name, len) in [
            ("bow rows", self.bow.n_docs()),
            ("relevant flags", self.relevant.len()),
            ("topics", self.topics.len()),
        ] {
            if len != self.ids.len() {
                return Err(Error::InvalidConfig(format!(
                    "{name} length {len} does not match {} documents",
                    self.ids.len()
                )));
            }
        }
        if !self.relevant.iter().any(|&r| r) {
            return Err(Error::InvalidConfig(
                "corpus contains no relevant documents".into(),
            ));
        }
        Ok(())
    }

    pub fn total_relevant(&self) -> usize {
        self.relevant.iter().filter(|&&r| r).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalConfig {
    pub batch_size: usize,
    pub seed_batch_size: usize,
    /// Recall level at which review stops. 0 stops right after the seed
    /// batch.
    pub target_recall: f64,
    pub classifier: ClassifierKind,
    pub seed: u64,
    /// Safety cap on the number of batches (seed batch included).
    pub max_batches: usize,
    pub nb_smoothing: f64,
    /// Hyperparameters for the linear classifier; its seed field is
    /// re-derived per batch from `seed`.
    pub linear: LinearConfig,
}

impl CalConfig {
    pub fn new(target_recall: f64, classifier: ClassifierKind, seed: u64) -> Self {
        Self {
            batch_size: 100,
            seed_batch_size: 100,
            target_recall,
            classifier,
            seed,
            max_batches: 10_000,
            nb_smoothing: 1.0,
            linear: LinearConfig::new(seed),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.seed_batch_size == 0 {
            return Err(Error::InvalidConfig("batch sizes must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.target_recall) {
            return Err(Error::domain("target_recall", "0 <= target <= 1", self.target_recall));
        }
        if self.max_batches == 0 {
            return Err(Error::InvalidConfig("max_batches must be >= 1".into()));
        }
        Ok(())
    }
}

/// Why a review stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    PoolExhausted,
    BatchCapReached,
}

/// One labeled document in review order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDoc {
    pub id: String,
    pub batch: usize,
    pub relevant: bool,
}

/// Full record of one review run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalTrace {
    pub labeled_order: Vec<LabeledDoc>,
    /// Recall over the whole pool after each batch (seed batch first).
    pub recall_after_batch: Vec<f64>,
    /// Index of the last batch (0 is the seed batch).
    pub stop_batch: usize,
    pub final_recall: f64,
    pub stop_reason: StopReason,
    /// Ids of labeled documents whose oracle label was relevant.
    pub identified_set: BTreeSet<String>,
    /// Dominant topics of relevant labeled documents, in labeling order
    /// (documents with unknown topic are skipped).
    pub topic_sequence: Vec<String>,
}

impl CalTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("CalTrace serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::InvalidConfig(format!("trace JSON: {e}")))
    }
}

struct ReviewState<'a> {
    corpus: &'a CalCorpus,
    unlabeled: Vec<bool>,
    labeled: Vec<usize>,
    labeled_relevant: usize,
    total_relevant: usize,
    trace: CalTrace,
}

impl<'a> ReviewState<'a> {
    fn new(corpus: &'a CalCorpus) -> Self {
        Self {
            corpus,
            unlabeled: vec![true; corpus.ids.len()],
            labeled: Vec::new(),
            labeled_relevant: 0,
            total_relevant: corpus.total_relevant(),
            trace: CalTrace {
                labeled_order: Vec::new(),
                recall_after_batch: Vec::new(),
                stop_batch: 0,
                final_recall: 0.0,
                stop_reason: StopReason::TargetReached,
                identified_set: BTreeSet::new(),
                topic_sequence: Vec::new(),
            },
        }
    }

    fn remaining(&self) -> usize {
        self.corpus.ids.len() - self.labeled.len()
    }

    fn label_batch(&mut self, batch: usize, docs: &[usize]) {
        for &doc in docs {
            debug_assert!(self.unlabeled[doc]);
            self.unlabeled[doc] = false;
            self.labeled.push(doc);
            let relevant = self.corpus.relevant[doc];
            if relevant {
                self.labeled_relevant += 1;
                self.trace.identified_set.insert(self.corpus.ids[doc].clone());
                if let Some(topic) = &self.corpus.topics[doc] {
                    self.trace.topic_sequence.push(topic.clone());
                }
            }
            self.trace.labeled_order.push(LabeledDoc {
                id: self.corpus.ids[doc].clone(),
                batch,
                relevant,
            });
        }
        self.trace
            .recall_after_batch
            .push(self.labeled_relevant as f64 / self.total_relevant as f64);
    }

    fn recall(&self) -> f64 {
        self.labeled_relevant as f64 / self.total_relevant as f64
    }

    /// Uniform random draw of up to `size` unlabeled documents.
    fn random_batch(&self, size: usize, rng: &mut SplitMix64) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..self.corpus.ids.len())
            .filter(|&i| self.unlabeled[i])
            .collect();
        let take = size.min(pool.len());
        // Partial Fisher–Yates: fix positions 0..take.
        for i in 0..take {
            let j = i + rng.next_below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(take);
        pool
    }

    fn labeled_single_class(&self) -> bool {
        let mut any_relevant = false;
        let mut any_nonrelevant = false;
        for &doc in &self.labeled {
            if self.corpus.relevant[doc] {
                any_relevant = true;
            } else {
                any_nonrelevant = true;
            }
        }
        !(any_relevant && any_nonrelevant)
    }

    fn finish(mut self, stop_batch: usize, reason: StopReason) -> CalTrace {
        self.trace.stop_batch = stop_batch;
        self.trace.final_recall = self.recall();
        self.trace.stop_reason = reason;
        self.trace
    }
}

enum BatchSelector {
    Classifier(ClassifierKind),
    Random,
}

fn run_protocol(corpus: &CalCorpus, config: &CalConfig, selector: BatchSelector) -> Result<CalTrace> {
    config.validate()?;
    corpus.validate()?;

    let mut random_rng = SplitMix64::new(derive_seed(config.seed, NS_RANDOM_BATCHES));
    let mut state = ReviewState::new(corpus);

    // Seed batch: uniformly random regardless of selector.
    let seed_batch = state.random_batch(config.seed_batch_size, &mut random_rng);
    state.label_batch(0, &seed_batch);

    let mut batch = 0usize;
    loop {
        if state.recall() >= config.target_recall {
            return Ok(state.finish(batch, StopReason::TargetReached));
        }
        if state.remaining() == 0 {
            return Ok(state.finish(batch, StopReason::PoolExhausted));
        }
        if batch + 1 >= config.max_batches {
            return Ok(state.finish(batch, StopReason::BatchCapReached));
        }
        batch += 1;

        let use_random = match selector {
            BatchSelector::Random => true,
            // Degenerate single-class training set: fall back to another
            // random batch instead of failing.
            BatchSelector::Classifier(_) => state.labeled_single_class(),
        };
        let chosen = if use_random {
            state.random_batch(config.batch_size, &mut random_rng)
        } else {
            let labels: Vec<bool> = state
                .labeled
                .iter()
                .map(|&doc| corpus.relevant[doc])
                .collect();
            let train_bow = corpus.bow.select_rows(&state.labeled);
            let scores: Vec<f64> = match selector {
                BatchSelector::Classifier(ClassifierKind::NaiveBayes) => {
                    let model = train_nb(&train_bow, &labels, config.nb_smoothing)?;
                    predict_scores(&model, &corpus.bow)?
                        .into_iter()
                        .map(|(s, _)| s)
                        .collect()
                }
                BatchSelector::Classifier(ClassifierKind::Linear) => {
                    let linear = LinearConfig {
                        seed: derive_seed(derive_seed(config.seed, NS_CLASSIFIER), batch as u64),
                        ..config.linear.clone()
                    };
                    let model = train_linear(&train_bow, &labels, &linear)?;
                    predict_scores(&model, &corpus.bow)?
                        .into_iter()
                        .map(|(s, _)| s)
                        .collect()
                }
                BatchSelector::Random => unreachable!(),
            };
            let ranking = ranked_indices(&scores, &corpus.ids)?;
            ranking
                .into_iter()
                .filter(|&doc| state.unlabeled[doc])
                .take(config.batch_size)
                .collect()
        };
        state.label_batch(batch, &chosen);
    }
}

/// Runs the continuous-active-learning protocol. Deterministic for a fixed
/// `(corpus, config)`.
pub fn run_cal(corpus: &CalCorpus, config: &CalConfig) -> Result<CalTrace> {
    run_protocol(corpus, config, BatchSelector::Classifier(config.classifier))
}

/// Runs the same batch/stop protocol with uniformly random batch selection —
/// the random-review baseline for ordering comparisons.
pub fn run_random_order(corpus: &CalCorpus, config: &CalConfig) -> Result<CalTrace> {
    run_protocol(corpus, config, BatchSelector::Random)
}

/// Splits the topic universe into topics covered by the identified relevant
/// documents and topics missed entirely.
///
/// `doc_topics` must name the dominant topic of every identified document.
pub fn topic_coverage(
    identified_relevant_ids: &BTreeSet<String>,
    doc_topics: &BTreeMap<String, String>,
    all_topics: &BTreeSet<String>,
) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    let mut covered = BTreeSet::new();
    for id in identified_relevant_ids {
        let topic = doc_topics.get(id).ok_or_else(|| {
            Error::InvalidConfig(format!("no dominant topic recorded for document {id:?}"))
        })?;
        covered.insert(topic.clone());
    }
    let missed = all_topics.difference(&covered).cloned().collect();
    Ok((covered, missed))
}

/// Order-1 entropy of the two traces' topic sequences, for judging how much
/// more predictable one labeling order is than the other.
pub fn compare_orderings(
    trace_a: &CalTrace,
    trace_b: &CalTrace,
) -> Result<(EntropyEstimate, EntropyEstimate)> {
    let a = entropy_rate(&trace_a.topic_sequence, 1)?;
    let b = entropy_rate(&trace_b.topic_sequence, 1)?;
    Ok((a, b))
}
