//! Seeded synthetic-data generators.
//!
//! These stand in for unavailable production datasets and double as
//! ground-truth oracles: every generator is a pure function of its spec
//! (seed included) and emits the latent structure it sampled from, so
//! downstream models can be checked for recovery without circularity.
//!
//! Stream discipline: each generator derives one RNG stream per namespace
//! (model parameters, documents, repairs) and one per document inside the
//! document namespace, so generation could be parallelized across documents
//! without changing a single byte of output.

use serde::{Deserialize, Serialize};

use crate::coverage::LabelMatrix;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::text::Document;

const NS_PARAMS: u64 = 0;
const NS_DOCS: u64 = 1;
const NS_REPAIR: u64 = 2;

fn stream(seed: u64, namespace: u64, index: u64) -> SplitMix64 {
    SplitMix64::new(derive_seed(derive_seed(seed, namespace), index))
}

/// Cumulative-sum table for O(log n) categorical draws.
struct Cumulative {
    cumsum: Vec<f64>,
}

impl Cumulative {
    fn new(weights: &[f64]) -> Self {
        let mut cumsum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            debug_assert!(w >= 0.0);
            acc += w;
            cumsum.push(acc);
        }
        assert!(acc > 0.0, "categorical weights sum to zero");
        Self { cumsum }
    }

    fn sample(&self, rng: &mut SplitMix64) -> usize {
        let total = *self.cumsum.last().unwrap();
        let u = rng.next_f64() * total;
        self.cumsum.partition_point(|&c| c <= u).min(self.cumsum.len() - 1)
    }
}

fn zipf_weights(n: usize, exponent: f64) -> Vec<f64> {
    (1..=n).map(|r| (r as f64).powf(-exponent)).collect()
}

/// Zero-padded identifier with a width that fits `count` values.
fn padded_id(prefix: &str, index: usize, count: usize) -> String {
    let width = count.max(1).to_string().len();
    format!("{prefix}{index:0width$}")
}

// ---------------------------------------------------------------------------
// Zipf-distributed multi-label topic matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipfLabelSpec {
    pub n_docs: usize,
    pub n_topics: usize,
    /// Zipf exponent `s`; design prevalences are proportional to `rank^-s`.
    pub exponent: f64,
    /// Target mean number of labels per document, in `[1, n_topics]`.
    pub mean_labels_per_doc: f64,
    pub seed: u64,
}

/// A generated label matrix plus generation diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedLabels {
    pub matrix: LabelMatrix,
    /// Topics that the sampler produced zero occurrences of and that were
    /// repaired by forcing a single occurrence.
    pub forced_topics: Vec<String>,
    /// The solved per-design-rank inclusion probabilities.
    pub design_prevalence: Vec<f64>,
}

/// Expected labels per document for inclusion probabilities `p`, accounting
/// for the guaranteed-one-label repair of all-miss documents.
fn expected_mean_labels(p: &[f64]) -> f64 {
    let sum: f64 = p.iter().sum();
    let none: f64 = p.iter().map(|&x| 1.0 - x).product();
    sum + none
}

/// Generates a multi-label matrix whose per-topic prevalences follow a Zipf
/// profile and whose mean labels per document hits the requested target.
///
/// Each document includes topic `r` independently with probability `p_r =
/// min(1, λ·r^-s)`; documents that end up with no labels are assigned a
/// single topic drawn in proportion to the same probabilities, so the repair
/// preserves the Zipf profile. λ is solved by bisection so that the expected
/// mean labels per document — repair included — equals the target. Any topic
/// that still has zero occurrences is forced into one randomly chosen
/// document and flagged.
pub fn generate_zipf_labels(spec: &ZipfLabelSpec) -> Result<GeneratedLabels> {
    if spec.n_topics == 0 {
        return Err(Error::domain("n_topics", "n_topics >= 1", 0.0));
    }
    if spec.n_docs < spec.n_topics {
        return Err(Error::InfeasibleSpec(format!(
            "{} topics cannot each occur among {} documents",
            spec.n_topics, spec.n_docs
        )));
    }
    if !(spec.exponent > 0.0) {
        return Err(Error::domain("exponent", "s > 0", spec.exponent));
    }
    let k = spec.n_topics;
    let mean = spec.mean_labels_per_doc;
    if !(1.0..=k as f64).contains(&mean) {
        return Err(Error::InfeasibleSpec(format!(
            "mean_labels_per_doc must be in [1, {k}], got {mean}"
        )));
    }

    let weights = zipf_weights(k, spec.exponent);
    // Bisect the scale λ: expected_mean_labels(min(1, λ·w)) is nondecreasing
    // in λ, rising from 1 at λ = 0 to k at λ = 1/w_min.
    let p: Vec<f64> = if mean == 1.0 {
        vec![0.0; k]
    } else {
        let mut lo = 0.0f64;
        let mut hi = 1.0 / weights[k - 1];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let candidate: Vec<f64> = weights.iter().map(|&w| (mid * w).min(1.0)).collect();
            if expected_mean_labels(&candidate) < mean {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        weights.iter().map(|&w| (hi * w).min(1.0)).collect()
    };

    let repair_weights = if p.iter().sum::<f64>() > 0.0 { &p } else { &weights };
    let repair_table = Cumulative::new(repair_weights);

    let mut docs: Vec<Vec<String>> = Vec::with_capacity(spec.n_docs);
    for d in 0..spec.n_docs {
        let mut rng = stream(spec.seed, NS_DOCS, d as u64);
        let mut labels: Vec<String> = Vec::new();
        for (r, &p_r) in p.iter().enumerate() {
            if p_r > 0.0 && rng.next_f64() < p_r {
                labels.push(padded_id("t", r + 1, k));
            }
        }
        if labels.is_empty() {
            let r = repair_table.sample(&mut rng);
            labels.push(padded_id("t", r + 1, k));
        }
        docs.push(labels);
    }

    // Force one occurrence of any topic the sampler never produced.
    let mut forced_topics = Vec::new();
    for r in 0..k {
        let id = padded_id("t", r + 1, k);
        if !docs.iter().any(|doc| doc.contains(&id)) {
            let mut rng = stream(spec.seed, NS_REPAIR, r as u64);
            let doc = rng.next_below(spec.n_docs as u64) as usize;
            docs[doc].push(id.clone());
            forced_topics.push(id);
        }
    }
    if !forced_topics.is_empty() {
        log::warn!(
            "zipf labels: forced one occurrence for {} zero-count topics: {:?}",
            forced_topics.len(),
            forced_topics
        );
    }

    Ok(GeneratedLabels {
        matrix: LabelMatrix::new(docs)?,
        forced_topics,
        design_prevalence: p,
    })
}

// ---------------------------------------------------------------------------
// Generative topic-model corpora
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaCorpusSpec {
    pub n_topics: usize,
    pub vocab_size: usize,
    pub n_docs: usize,
    pub doc_len_mean: f64,
    /// 0 gives Poisson lengths; larger values gamma-mix the rate
    /// (variance grows to `mean² · dispersion`).
    pub doc_len_dispersion: f64,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    /// When set, each topic places 95% of its mass on a topic-exclusive
    /// vocabulary block, giving a cleanly separable fixture.
    pub disjoint_core: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LdaCorpus {
    pub documents: Vec<Document>,
    /// Most frequent sampled topic of each document (ties to the lower
    /// index).
    pub true_dominant: Vec<u32>,
    /// The topic-word distributions the corpus was sampled from.
    pub true_topic_word: Vec<Vec<f64>>,
}

fn validate_lda_spec(spec: &LdaCorpusSpec) -> Result<()> {
    if spec.n_topics == 0 {
        return Err(Error::domain("n_topics", "K >= 1", 0.0));
    }
    if spec.vocab_size < spec.n_topics {
        return Err(Error::InfeasibleSpec(format!(
            "vocab_size {} is smaller than n_topics {}",
            spec.vocab_size, spec.n_topics
        )));
    }
    if spec.n_docs == 0 {
        return Err(Error::domain("n_docs", "D >= 1", 0.0));
    }
    if !(spec.doc_len_mean >= 1.0) {
        return Err(Error::domain("doc_len_mean", "mean >= 1", spec.doc_len_mean));
    }
    if !(spec.doc_len_dispersion >= 0.0) {
        return Err(Error::domain(
            "doc_len_dispersion",
            "dispersion >= 0",
            spec.doc_len_dispersion,
        ));
    }
    if !(spec.alpha > 0.0) {
        return Err(Error::domain("alpha", "alpha > 0", spec.alpha));
    }
    if !(spec.beta > 0.0) {
        return Err(Error::domain("beta", "beta > 0", spec.beta));
    }
    Ok(())
}

fn sample_doc_len(rng: &mut SplitMix64, mean: f64, dispersion: f64) -> usize {
    let rate = if dispersion > 0.0 {
        let shape = 1.0 / dispersion;
        rng.next_gamma(shape) * mean / shape
    } else {
        mean
    };
    (rng.next_poisson(rate.min(1e5)) as usize).max(1)
}

/// Samples a corpus from the standard generative topic-model process: a
/// document-topic mixture per document, then a topic and a word per token.
pub fn generate_lda_corpus(spec: &LdaCorpusSpec) -> Result<LdaCorpus> {
    validate_lda_spec(spec)?;
    let k = spec.n_topics;
    let v = spec.vocab_size;

    let mut params_rng = stream(spec.seed, NS_PARAMS, 0);
    let topic_word: Vec<Vec<f64>> = if spec.disjoint_core {
        // Partition the vocabulary into K blocks; 95% of each topic's mass
        // is uniform over its own block, the rest uniform elsewhere.
        let base = v / k;
        let remainder = v % k;
        let block_of = |topic: usize| -> (usize, usize) {
            let start = topic * base + topic.min(remainder);
            let len = base + usize::from(topic < remainder);
            (start, len)
        };
        (0..k)
            .map(|topic| {
                let (start, len) = block_of(topic);
                let outside = v - len;
                (0..v)
                    .map(|w| {
                        if w >= start && w < start + len {
                            0.95 / len as f64
                        } else {
                            0.05 / outside.max(1) as f64
                        }
                    })
                    .collect()
            })
            .collect()
    } else {
        (0..k)
            .map(|_| params_rng.next_dirichlet_symmetric(spec.beta, v))
            .collect()
    };
    let word_tables: Vec<Cumulative> = topic_word.iter().map(|row| Cumulative::new(row)).collect();

    let mut documents = Vec::with_capacity(spec.n_docs);
    let mut true_dominant = Vec::with_capacity(spec.n_docs);
    for d in 0..spec.n_docs {
        let mut rng = stream(spec.seed, NS_DOCS, d as u64);
        let theta = rng.next_dirichlet_symmetric(spec.alpha, k);
        let topic_table = Cumulative::new(&theta);
        let len = sample_doc_len(&mut rng, spec.doc_len_mean, spec.doc_len_dispersion);
        let mut words = Vec::with_capacity(len);
        let mut topic_counts = vec![0u32; k];
        for _ in 0..len {
            let z = topic_table.sample(&mut rng);
            topic_counts[z] += 1;
            let w = word_tables[z].sample(&mut rng);
            words.push(padded_id("w", w, v));
        }
        let dominant = topic_counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(i, _)| i as u32)
            .unwrap();
        true_dominant.push(dominant);
        let mut doc = Document::new(padded_id("d", d, spec.n_docs), words.join(" "));
        doc.topics = Some(vec![padded_id("t", dominant as usize + 1, k)]);
        documents.push(doc);
    }

    Ok(LdaCorpus {
        documents,
        true_dominant,
        true_topic_word: topic_word,
    })
}

// ---------------------------------------------------------------------------
// Labeled relevance corpora
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceCorpusSpec {
    pub n_relevant: usize,
    pub n_nonrelevant: usize,
    /// Topic structure of the relevant class: Zipf over this many topics.
    pub n_topics: usize,
    pub zipf_exponent: f64,
    /// Fraction of non-relevant token mass drawn from the relevant class's
    /// own word distribution. 0 makes the classes fully separable; 1 makes
    /// their word distributions identical.
    pub vocab_overlap: f64,
    pub doc_len_mean: f64,
    pub seed: u64,
}

impl RelevanceCorpusSpec {
    /// Paper-scale defaults: 1,676 relevant vs 2,000 non-relevant short
    /// documents over 20 Zipf-distributed topics.
    pub fn new(seed: u64) -> Self {
        Self {
            n_relevant: 1676,
            n_nonrelevant: 2000,
            n_topics: 20,
            zipf_exponent: 1.0,
            vocab_overlap: 0.5,
            doc_len_mean: 25.0,
            seed,
        }
    }
}

const TOPIC_CORE_WORDS: usize = 20;
const COMMON_WORDS: usize = 200;
const BACKGROUND_WORDS: usize = 300;
/// Token mass a relevant document spends on its topic's exclusive words.
const TOPIC_CORE_MASS: f64 = 0.5;

/// Samples a labeled relevance corpus.
///
/// Relevant documents draw a topic from a Zipf prevalence profile, then mix
/// topic-exclusive core words with a shared common vocabulary. Non-relevant
/// documents mix the relevant class's marginal word distribution (with
/// probability `vocab_overlap`) with a background-exclusive vocabulary.
pub fn generate_relevance_corpus(spec: &RelevanceCorpusSpec) -> Result<Vec<Document>> {
    if spec.n_relevant == 0 || spec.n_nonrelevant == 0 {
        return Err(Error::InfeasibleSpec(
            "both classes need at least one document".into(),
        ));
    }
    if spec.n_topics == 0 {
        return Err(Error::domain("n_topics", "K >= 1", 0.0));
    }
    if !(spec.zipf_exponent > 0.0) {
        return Err(Error::domain("zipf_exponent", "s > 0", spec.zipf_exponent));
    }
    if !(0.0..=1.0).contains(&spec.vocab_overlap) {
        return Err(Error::domain("vocab_overlap", "0 <= overlap <= 1", spec.vocab_overlap));
    }
    if !(spec.doc_len_mean >= 3.0) {
        return Err(Error::domain("doc_len_mean", "mean >= 3", spec.doc_len_mean));
    }

    let k = spec.n_topics;
    let topic_table = Cumulative::new(&zipf_weights(k, spec.zipf_exponent));
    // Mildly skewed within-block word frequencies.
    let common_table = Cumulative::new(&zipf_weights(COMMON_WORDS, 1.0));
    let background_table = Cumulative::new(&zipf_weights(BACKGROUND_WORDS, 1.0));

    let core_word = |topic: usize, w: usize| format!("t{:02}x{:02}", topic + 1, w);
    let n_total = spec.n_relevant + spec.n_nonrelevant;

    // One relevant token: topic core with probability TOPIC_CORE_MASS, else
    // a common word. Used directly by relevant docs and, scaled by the
    // overlap, by non-relevant ones.
    fn relevant_token(
        rng: &mut SplitMix64,
        topic: usize,
        common_table: &Cumulative,
        core_word: &impl Fn(usize, usize) -> String,
    ) -> String {
        if rng.next_f64() < TOPIC_CORE_MASS {
            core_word(topic, rng.next_below(TOPIC_CORE_WORDS as u64) as usize)
        } else {
            padded_id("com", common_table.sample(rng), COMMON_WORDS)
        }
    }

    let mut documents = Vec::with_capacity(n_total);
    for d in 0..n_total {
        let mut rng = stream(spec.seed, NS_DOCS, d as u64);
        let relevant = d < spec.n_relevant;
        let len = sample_doc_len(&mut rng, spec.doc_len_mean, 0.0).max(3);
        let mut words = Vec::with_capacity(len);
        let mut doc = Document::new(padded_id("d", d, n_total), String::new());
        if relevant {
            let topic = topic_table.sample(&mut rng);
            for _ in 0..len {
                words.push(relevant_token(&mut rng, topic, &common_table, &core_word));
            }
            doc.relevant = Some(true);
            doc.topics = Some(vec![padded_id("t", topic + 1, k)]);
        } else {
            for _ in 0..len {
                if rng.next_f64() < spec.vocab_overlap {
                    let topic = topic_table.sample(&mut rng);
                    words.push(relevant_token(&mut rng, topic, &common_table, &core_word));
                } else {
                    words.push(padded_id("bg", background_table.sample(&mut rng), BACKGROUND_WORDS));
                }
            }
            doc.relevant = Some(false);
        }
        doc.text = words.join(" ");
        documents.push(doc);
    }
    Ok(documents)
}
