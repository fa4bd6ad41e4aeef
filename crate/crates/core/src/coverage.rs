//! Generalized coupon-collector simulation over multi-label document/topic
//! data.
//!
//! A [`LabelMatrix`] records which topics each document carries. Each
//! simulated "case" is one uniform shuffle of the documents; scanning the
//! shuffled order, the position at which the last outstanding topic first
//! appears is the cover time of that shuffle. Shuffles are independent and
//! seeded per index, so a run is reproducible regardless of how many worker
//! threads execute it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, SplitMix64};
use crate::stats::nearest_rank;

/// Documents-by-topics label assignments.
///
/// Topics are held in a canonical order: descending document count, ties
/// broken by identifier. Index 0 is therefore always the most prevalent
/// topic and the last index the rarest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMatrix {
    topics: Vec<String>,
    /// Per-document sorted topic indices (at least one per document).
    labels: Vec<Vec<u32>>,
    /// Number of documents carrying each topic.
    counts: Vec<u64>,
}

impl LabelMatrix {
    /// Builds a matrix from per-document topic-identifier sets. The topic
    /// universe is the union of all labels.
    pub fn new(docs: Vec<Vec<String>>) -> Result<Self> {
        let mut universe: Vec<String> = docs.iter().flatten().cloned().collect();
        universe.sort_unstable();
        universe.dedup();
        Self::with_topic_universe(universe, docs)
    }

    /// Builds a matrix against an explicit topic universe. Fails if any
    /// topic in the universe occurs in no document (its cover time would be
    /// undefined), if a document has no labels, or if a document references
    /// an unknown topic.
    pub fn with_topic_universe(topics: Vec<String>, docs: Vec<Vec<String>>) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyInput("label matrix documents"));
        }
        if topics.is_empty() {
            return Err(Error::EmptyInput("label matrix topics"));
        }
        let index: BTreeMap<&str, u32> = topics
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i as u32))
            .collect();
        if index.len() != topics.len() {
            return Err(Error::InvalidLabelMatrix("duplicate topic identifier".into()));
        }
        let mut counts = vec![0u64; topics.len()];
        let mut labels = Vec::with_capacity(docs.len());
        for (doc_idx, doc) in docs.iter().enumerate() {
            let mut row: Vec<u32> = Vec::with_capacity(doc.len());
            for topic in doc {
                let &i = index.get(topic.as_str()).ok_or_else(|| {
                    Error::InvalidLabelMatrix(format!("document {doc_idx} has unknown topic {topic:?}"))
                })?;
                row.push(i);
            }
            row.sort_unstable();
            row.dedup();
            if row.is_empty() {
                return Err(Error::InvalidLabelMatrix(format!(
                    "document {doc_idx} carries no topics"
                )));
            }
            for &i in &row {
                counts[i as usize] += 1;
            }
            labels.push(row);
        }
        if let Some(zero) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidLabelMatrix(format!(
                "topic {:?} occurs in no document; cover time undefined",
                topics[zero]
            )));
        }
        // Canonical order: count descending, identifier ascending.
        let mut order: Vec<u32> = (0..topics.len() as u32).collect();
        order.sort_by(|&a, &b| {
            counts[b as usize]
                .cmp(&counts[a as usize])
                .then_with(|| topics[a as usize].cmp(&topics[b as usize]))
        });
        let mut rank_of = vec![0u32; topics.len()];
        for (rank, &old) in order.iter().enumerate() {
            rank_of[old as usize] = rank as u32;
        }
        let topics: Vec<String> = order.iter().map(|&old| topics[old as usize].clone()).collect();
        let counts: Vec<u64> = order.iter().map(|&old| counts[old as usize]).collect();
        let labels: Vec<Vec<u32>> = labels
            .into_iter()
            .map(|row| {
                let mut row: Vec<u32> = row.into_iter().map(|old| rank_of[old as usize]).collect();
                row.sort_unstable();
                row
            })
            .collect();
        Ok(Self {
            topics,
            labels,
            counts,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.labels.len()
    }

    pub fn n_topics(&self) -> usize {
        self.topics.len()
    }

    pub fn topics(&self) -> &[String] {
        &self.topics
    }

    pub fn topic_id(&self, index: u32) -> &str {
        &self.topics[index as usize]
    }

    /// Topic indices of one document, sorted ascending.
    pub fn doc_labels(&self, doc: usize) -> &[u32] {
        &self.labels[doc]
    }

    /// Number of documents carrying the topic.
    pub fn topic_count(&self, index: u32) -> u64 {
        self.counts[index as usize]
    }

    /// Fraction of documents carrying the topic.
    pub fn prevalence(&self, index: u32) -> f64 {
        self.counts[index as usize] as f64 / self.n_docs() as f64
    }

    /// All prevalences in canonical (nonincreasing) order.
    pub fn prevalences(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n_docs() as f64)
            .collect()
    }

    pub fn mean_labels_per_doc(&self) -> f64 {
        self.labels.iter().map(Vec::len).sum::<usize>() as f64 / self.n_docs() as f64
    }

    /// Index of the rarest topic (ties resolved toward the later canonical
    /// position, i.e. the lexicographically larger identifier).
    pub fn rarest_topic(&self) -> u32 {
        self.n_topics() as u32 - 1
    }
}

/// Outcome of scanning one shuffled ordering until full topic coverage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRun {
    pub shuffle_index: u64,
    /// 1-based position at which each topic (canonical order) first appears.
    pub first_encounter: Vec<u64>,
    /// Position at which the last outstanding topic appeared.
    pub cover_time: u64,
    /// Canonical index of that topic. When one document completes several
    /// outstanding topics at once, the lowest canonical index is recorded.
    pub terminal_topic: u32,
}

/// Runs `shuffles` independent shuffle-and-scan passes.
///
/// Shuffle `i` permutes the documents with a Fisher–Yates pass driven by
/// `SplitMix64::new(derive_seed(master_seed, i))` and scans the permuted
/// order until every topic has been seen. The scan realizes the permutation
/// lazily, so a pass touches only as many documents as its cover time.
///
/// Results depend only on `(labels, shuffles, master_seed)`; shuffles are
/// distributed over the current rayon thread pool and collected in index
/// order.
pub fn run_shuffles(labels: &LabelMatrix, shuffles: u64, master_seed: u64) -> Result<Vec<CoverageRun>> {
    if shuffles == 0 {
        return Err(Error::domain("shuffles", "shuffles >= 1", 0.0));
    }
    // Zero-occurrence topics are unrepresentable in LabelMatrix, but cheap
    // to re-assert before a long simulation.
    if let Some(zero) = labels.counts.iter().position(|&c| c == 0) {
        return Err(Error::InvalidLabelMatrix(format!(
            "topic {:?} occurs in no document",
            labels.topics[zero]
        )));
    }
    let n_docs = labels.n_docs() as u64;
    let runs: Vec<CoverageRun> = (0..shuffles)
        .into_par_iter()
        .map_init(
            || (Vec::<u32>::new(), Vec::<bool>::new()),
            |(order, seen), shuffle_index| {
                order.clear();
                order.extend(0..labels.n_docs() as u32);
                seen.clear();
                seen.resize(labels.n_topics(), false);
                let mut rng = SplitMix64::new(derive_seed(master_seed, shuffle_index));
                let mut first_encounter = vec![0u64; labels.n_topics()];
                let mut outstanding = labels.n_topics();
                let mut cover_time = 0u64;
                let mut terminal_topic = 0u32;
                for t in 0..labels.n_docs() {
                    let j = t + rng.next_below(n_docs - t as u64) as usize;
                    order.swap(t, j);
                    let doc = order[t] as usize;
                    let position = t as u64 + 1;
                    for &topic in labels.doc_labels(doc) {
                        if !seen[topic as usize] {
                            seen[topic as usize] = true;
                            first_encounter[topic as usize] = position;
                            outstanding -= 1;
                            if outstanding == 0 {
                                cover_time = position;
                                terminal_topic = topic;
                            }
                        }
                    }
                    if outstanding == 0 {
                        break;
                    }
                }
                // The doc that completed coverage may have introduced several
                // topics; keep the lowest canonical index among them.
                for (idx, &pos) in first_encounter.iter().enumerate() {
                    if pos == cover_time {
                        terminal_topic = idx as u32;
                        break;
                    }
                }
                CoverageRun {
                    shuffle_index,
                    first_encounter,
                    cover_time,
                    terminal_topic,
                }
            },
        )
        .collect();
    Ok(runs)
}

/// One row of the percentile/recall table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileRow {
    pub percentile: f64,
    pub documents: u64,
    pub recall_level: f64,
}

/// Nearest-rank percentiles of the cover times, with the corresponding
/// recall level `documents / n_docs`.
pub fn coverage_percentiles(
    runs: &[CoverageRun],
    n_docs: u64,
    percentiles: &[f64],
) -> Result<Vec<PercentileRow>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("coverage runs"));
    }
    for &p in percentiles {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::domain("percentile", "0 < p <= 1", p));
        }
    }
    let mut covers: Vec<u64> = runs.iter().map(|r| r.cover_time).collect();
    covers.sort_unstable();
    Ok(percentiles
        .iter()
        .map(|&p| {
            let documents = covers[nearest_rank(covers.len(), p) - 1];
            PercentileRow {
                percentile: p,
                documents,
                recall_level: documents as f64 / n_docs as f64,
            }
        })
        .collect())
}

/// One row of the terminal-topic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalRow {
    pub topic: String,
    /// Number of shuffles completed by this topic.
    pub n: u64,
    /// Prevalence of the topic in the label matrix.
    pub p: f64,
    /// Expected first-encounter position under independent sampling, `1/p`.
    pub predict: f64,
    /// Mean cover time over the shuffles this topic completed.
    pub mean_max: f64,
}

/// Groups runs by terminal topic, sorted by times-terminal descending
/// (ties by canonical topic order).
pub fn terminal_topic_stats(runs: &[CoverageRun], labels: &LabelMatrix) -> Result<Vec<TerminalRow>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("coverage runs"));
    }
    let mut count = vec![0u64; labels.n_topics()];
    let mut cover_sum = vec![0u64; labels.n_topics()];
    for run in runs {
        count[run.terminal_topic as usize] += 1;
        cover_sum[run.terminal_topic as usize] += run.cover_time;
    }
    let mut rows: Vec<TerminalRow> = (0..labels.n_topics() as u32)
        .filter(|&i| count[i as usize] > 0)
        .map(|i| {
            let p = labels.prevalence(i);
            TerminalRow {
                topic: labels.topic_id(i).to_string(),
                n: count[i as usize],
                p,
                predict: 1.0 / p,
                mean_max: cover_sum[i as usize] as f64 / count[i as usize] as f64,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.n.cmp(&a.n).then_with(|| a.topic.cmp(&b.topic)));
    Ok(rows)
}

/// Expected number of documents scanned until a topic of prevalence `p` is
/// first encountered, under independent sampling: `1/p`.
pub fn expected_first_encounter(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain("p", "0 < p <= 1", p));
    }
    Ok(1.0 / p)
}

/// Expected cover time for `k` equiprobable single-label topics under
/// independent sampling: `k * H_k`.
pub fn expected_cover_equal(k: u64) -> f64 {
    let harmonic: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
    k as f64 * harmonic
}

/// Step curve of distinct topics seen by each scan position, emitted at the
/// positions where the count increases. The final point is
/// `(cover_time, n_topics)`.
pub fn cumulative_coverage_curve(run: &CoverageRun, labels: &LabelMatrix) -> Vec<(u64, u64)> {
    let mut positions: Vec<u64> = run.first_encounter.clone();
    positions.sort_unstable();
    let mut curve: Vec<(u64, u64)> = Vec::new();
    for (i, &pos) in positions.iter().enumerate() {
        let seen = (i + 1) as u64;
        match curve.last_mut() {
            Some(last) if last.0 == pos => last.1 = seen,
            _ => curve.push((pos, seen)),
        }
    }
    debug_assert_eq!(curve.last().map(|&(p, _)| p), Some(run.cover_time));
    debug_assert_eq!(
        curve.last().map(|&(_, s)| s),
        Some(labels.n_topics() as u64)
    );
    curve
}

/// Histogram bin over cover times, inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub start: u64,
    pub end: u64,
    pub count: u64,
}

/// Equal-width integer binning of cover times into at most `max_bins` bins
/// spanning `[min, max]`.
pub fn cover_time_histogram(runs: &[CoverageRun], max_bins: u64) -> Result<Vec<HistogramBin>> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("coverage runs"));
    }
    if max_bins == 0 {
        return Err(Error::domain("max_bins", "max_bins >= 1", 0.0));
    }
    let min = runs.iter().map(|r| r.cover_time).min().unwrap();
    let max = runs.iter().map(|r| r.cover_time).max().unwrap();
    let span = max - min + 1;
    let width = span.div_ceil(max_bins);
    let n_bins = span.div_ceil(width);
    let mut bins: Vec<HistogramBin> = (0..n_bins)
        .map(|i| HistogramBin {
            start: min + i * width,
            end: (min + (i + 1) * width - 1).min(max),
            count: 0,
        })
        .collect();
    for run in runs {
        bins[((run.cover_time - min) / width) as usize].count += 1;
    }
    Ok(bins)
}

/// Aggregate view of a batch of shuffles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub shuffles: u64,
    pub percentile_rows: Vec<PercentileRow>,
    pub terminal_rows: Vec<TerminalRow>,
    pub mean_cover: f64,
    pub max_cover: u64,
    pub histogram: Vec<HistogramBin>,
}

/// Builds the full summary. `mean_cover` is accumulated in shuffle-index
/// order so the value is identical however the runs were computed.
pub fn summarize(
    runs: &[CoverageRun],
    labels: &LabelMatrix,
    percentiles: &[f64],
    histogram_bins: u64,
) -> Result<CoverageSummary> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("coverage runs"));
    }
    let percentile_rows = coverage_percentiles(runs, labels.n_docs() as u64, percentiles)?;
    let terminal_rows = terminal_topic_stats(runs, labels)?;
    let histogram = cover_time_histogram(runs, histogram_bins)?;
    let mean_cover = runs.iter().map(|r| r.cover_time as f64).sum::<f64>() / runs.len() as f64;
    let max_cover = runs.iter().map(|r| r.cover_time).max().unwrap();
    Ok(CoverageSummary {
        shuffles: runs.len() as u64,
        percentile_rows,
        terminal_rows,
        mean_cover,
        max_cover,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_label_matrix(topic_counts: &[(&str, usize)]) -> LabelMatrix {
        let mut docs = Vec::new();
        for &(topic, count) in topic_counts {
            for _ in 0..count {
                docs.push(vec![topic.to_string()]);
            }
        }
        LabelMatrix::new(docs).unwrap()
    }

    /// Interleaved equiprobable single-label corpus.
    fn balanced_matrix(k: usize, docs_per_topic: usize) -> LabelMatrix {
        let docs: Vec<Vec<String>> = (0..k * docs_per_topic)
            .map(|i| vec![format!("t{:02}", i % k)])
            .collect();
        LabelMatrix::new(docs).unwrap()
    }

    #[test]
    fn matrix_orders_topics_by_count_descending() {
        let m = single_label_matrix(&[("rare", 1), ("mid", 3), ("common", 6)]);
        assert_eq!(m.topics(), ["common", "mid", "rare"]);
        assert_eq!(m.topic_count(0), 6);
        assert_eq!(m.rarest_topic(), 2);
        let prevs = m.prevalences();
        assert!(prevs.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn matrix_rejects_bad_inputs() {
        assert!(LabelMatrix::new(vec![]).is_err());
        assert!(LabelMatrix::new(vec![vec!["a".into()], vec![]]).is_err());
        assert!(LabelMatrix::with_topic_universe(
            vec!["a".into(), "ghost".into()],
            vec![vec!["a".into()]],
        )
        .is_err());
        assert!(LabelMatrix::with_topic_universe(
            vec!["a".into(), "a".into()],
            vec![vec!["a".into()]],
        )
        .is_err());
    }

    #[test]
    fn single_topic_covers_at_position_one() {
        let m = single_label_matrix(&[("only", 10)]);
        let runs = run_shuffles(&m, 10, 123).unwrap();
        for run in &runs {
            assert_eq!(run.cover_time, 1);
            assert_eq!(run.terminal_topic, 0);
            assert_eq!(run.first_encounter, vec![1]);
        }
    }

    #[test]
    fn two_equiprobable_topics_match_the_analytic_mean() {
        // Classical expectation k*H_k = 3 for k = 2; the population is large
        // enough that drawing without replacement is indistinguishable.
        let m = balanced_matrix(2, 1000);
        let runs = run_shuffles(&m, 20_000, 7).unwrap();
        let mean = runs.iter().map(|r| r.cover_time as f64).sum::<f64>() / runs.len() as f64;
        let expected = expected_cover_equal(2);
        assert!((mean - expected).abs() / expected < 0.02, "mean = {mean}");
    }

    /// Exhaustive oracle: enumerate every distinct arrangement of a small
    /// single-label corpus (they are equiprobable under document shuffling)
    /// and compute the exact terminal-topic distribution and mean cover
    /// time, then check the simulation against it.
    #[test]
    fn simulation_matches_exhaustive_enumeration() {
        // Topics 0, 1, 2 with 4, 2, 1 documents (canonical order).
        let m = single_label_matrix(&[("a", 4), ("b", 2), ("c", 1)]);
        let mut pool = vec![0u8; 0];
        pool.extend(std::iter::repeat(0).take(4));
        pool.extend(std::iter::repeat(1).take(2));
        pool.extend(std::iter::repeat(2).take(1));

        let mut terminal_counts = [0u64; 3];
        let mut cover_total = 0u64;
        let mut arrangements = 0u64;
        enumerate_multiset(&mut pool, 0, &mut |arrangement| {
            let mut first = [0usize; 3];
            for (pos, &sym) in arrangement.iter().enumerate() {
                if first[sym as usize] == 0 {
                    first[sym as usize] = pos + 1;
                }
            }
            let cover = *first.iter().max().unwrap();
            let terminal = first.iter().position(|&f| f == cover).unwrap();
            terminal_counts[terminal] += 1;
            cover_total += cover as u64;
            arrangements += 1;
        });
        assert_eq!(arrangements, 105); // 7! / (4! 2! 1!)
        let exact_mean = cover_total as f64 / arrangements as f64;
        let exact_p: Vec<f64> = terminal_counts
            .iter()
            .map(|&c| c as f64 / arrangements as f64)
            .collect();

        let shuffles = 50_000u64;
        let runs = run_shuffles(&m, shuffles, 2024).unwrap();
        let mean = runs.iter().map(|r| r.cover_time as f64).sum::<f64>() / shuffles as f64;
        let cover_var = runs
            .iter()
            .map(|r| (r.cover_time as f64 - mean).powi(2))
            .sum::<f64>()
            / shuffles as f64;
        let se = (cover_var / shuffles as f64).sqrt();
        assert!(
            (mean - exact_mean).abs() < 4.0 * se + 1e-9,
            "mean {mean} vs exact {exact_mean}"
        );
        let stats = terminal_topic_stats(&runs, &m).unwrap();
        for row in &stats {
            let idx = m.topics().iter().position(|t| *t == row.topic).unwrap();
            let freq = row.n as f64 / shuffles as f64;
            let sigma = (exact_p[idx] * (1.0 - exact_p[idx]) / shuffles as f64).sqrt();
            assert!(
                (freq - exact_p[idx]).abs() < 4.0 * sigma,
                "topic {} freq {freq} vs exact {}",
                row.topic,
                exact_p[idx]
            );
        }
        // Rarest topic dominates the terminal distribution.
        let modal = &stats[0];
        assert_eq!(modal.topic, "c");
        assert!(exact_p[2] > exact_p[1] && exact_p[1] > exact_p[0]);
    }

    fn enumerate_multiset(pool: &mut Vec<u8>, from: usize, visit: &mut impl FnMut(&[u8])) {
        if from == pool.len() {
            visit(pool);
            return;
        }
        let mut used = Vec::new();
        for i in from..pool.len() {
            if used.contains(&pool[i]) {
                continue;
            }
            used.push(pool[i]);
            pool.swap(from, i);
            enumerate_multiset(pool, from + 1, visit);
            pool.swap(from, i);
        }
    }

    #[test]
    fn cover_time_is_exactly_the_max_first_encounter() {
        let mut rng = SplitMix64::new(404);
        for case in 0..20u64 {
            let k = 1 + rng.next_below(6) as usize;
            let n = k + rng.next_below(80) as usize;
            let docs: Vec<Vec<String>> = (0..n)
                .map(|i| {
                    let mut labels = vec![format!("t{:02}", i % k)];
                    if rng.next_bool(0.4) {
                        labels.push(format!("t{:02}", rng.next_below(k as u64)));
                    }
                    labels
                })
                .collect();
            let m = LabelMatrix::new(docs).unwrap();
            let runs = run_shuffles(&m, 50, 1000 + case).unwrap();
            for run in &runs {
                assert_eq!(run.cover_time, *run.first_encounter.iter().max().unwrap());
                assert!(run.first_encounter.iter().all(|&x| x >= 1 && x <= n as u64));
                assert_eq!(
                    run.first_encounter[run.terminal_topic as usize],
                    run.cover_time
                );
            }
        }
    }

    #[test]
    fn mean_cover_dominates_every_topic_mean_first_encounter() {
        let m = single_label_matrix(&[("a", 30), ("b", 10), ("c", 4)]);
        let runs = run_shuffles(&m, 2_000, 55).unwrap();
        let n = runs.len() as f64;
        let mean_cover = runs.iter().map(|r| r.cover_time as f64).sum::<f64>() / n;
        for topic in 0..m.n_topics() {
            let mean_first =
                runs.iter().map(|r| r.first_encounter[topic] as f64).sum::<f64>() / n;
            assert!(mean_cover >= mean_first);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_pool_independent() {
        let m = balanced_matrix(5, 40);
        let a = run_shuffles(&m, 200, 99).unwrap();
        let b = run_shuffles(&m, 200, 99).unwrap();
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let quad = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let c = single.install(|| run_shuffles(&m, 200, 99)).unwrap();
        let d = quad.install(|| run_shuffles(&m, 200, 99)).unwrap();
        assert_eq!(a, c);
        assert_eq!(a, d);
        let other_seed = run_shuffles(&m, 200, 100).unwrap();
        assert_ne!(a, other_seed);
    }

    #[test]
    fn percentiles_on_a_known_sequence() {
        let runs: Vec<CoverageRun> = (1..=100)
            .map(|i| CoverageRun {
                shuffle_index: i,
                first_encounter: vec![i],
                cover_time: i,
                terminal_topic: 0,
            })
            .collect();
        let rows = coverage_percentiles(&runs, 100, &[0.5]).unwrap();
        assert_eq!(rows[0].documents, 50);
        assert_eq!(rows[0].recall_level, 0.5);

        let one = vec![CoverageRun {
            shuffle_index: 0,
            first_encounter: vec![7],
            cover_time: 7,
            terminal_topic: 0,
        }];
        for p in [0.01, 0.5, 1.0] {
            assert_eq!(coverage_percentiles(&one, 10, &[p]).unwrap()[0].documents, 7);
        }
        assert!(coverage_percentiles(&[], 10, &[0.5]).is_err());
        assert!(coverage_percentiles(&one, 10, &[0.0]).is_err());
    }

    #[test]
    fn percentile_rows_are_monotone() {
        let m = balanced_matrix(6, 25);
        let runs = run_shuffles(&m, 500, 3).unwrap();
        let ps: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
        let rows = coverage_percentiles(&runs, m.n_docs() as u64, &ps).unwrap();
        assert!(rows.windows(2).all(|w| w[0].documents <= w[1].documents));
    }

    #[test]
    fn terminal_stats_count_and_sort() {
        let m = single_label_matrix(&[("a", 3), ("b", 2)]);
        let mk = |i, terminal, cover| CoverageRun {
            shuffle_index: i,
            first_encounter: vec![1, cover],
            cover_time: cover,
            terminal_topic: terminal,
        };
        let runs = vec![mk(0, 0, 4), mk(1, 0, 2), mk(2, 1, 5)];
        let rows = terminal_topic_stats(&runs, &m).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].topic, "a");
        assert_eq!(rows[0].n, 2);
        assert_eq!(rows[0].mean_max, 3.0);
        assert_eq!(rows[1].n, 1);
        assert_eq!(rows.iter().map(|r| r.n).sum::<u64>(), runs.len() as u64);
        assert!((rows[0].predict - 1.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn all_runs_terminal_on_same_topic_gives_single_row() {
        let m = single_label_matrix(&[("a", 2), ("b", 2)]);
        let runs: Vec<CoverageRun> = (0..5)
            .map(|i| CoverageRun {
                shuffle_index: i,
                first_encounter: vec![1, 2],
                cover_time: 2,
                terminal_topic: 1,
            })
            .collect();
        let rows = terminal_topic_stats(&runs, &m).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n, 5);
    }

    #[test]
    fn expected_first_encounter_values() {
        assert_eq!(expected_first_encounter(1.0).unwrap(), 1.0);
        assert_eq!(expected_first_encounter(0.5).unwrap(), 2.0);
        let predicted = expected_first_encounter(1.42007e-6).unwrap();
        assert!((predicted - 704_180.24).abs() / 704_180.24 < 1e-4, "{predicted}");
        assert!(expected_first_encounter(0.0).is_err());
    }

    #[test]
    fn expected_cover_equal_values() {
        assert_eq!(expected_cover_equal(1), 1.0);
        assert!((expected_cover_equal(2) - 3.0).abs() < 1e-12);
        assert!((expected_cover_equal(10) - 29.28968).abs() < 1e-5);
    }

    #[test]
    fn cumulative_curve_construction() {
        let m = single_label_matrix(&[("a", 2), ("b", 1)]);
        let run = CoverageRun {
            shuffle_index: 0,
            first_encounter: vec![1, 3],
            cover_time: 3,
            terminal_topic: 1,
        };
        assert_eq!(cumulative_coverage_curve(&run, &m), vec![(1, 1), (3, 2)]);

        let single = single_label_matrix(&[("only", 3)]);
        let run1 = &run_shuffles(&single, 1, 5).unwrap()[0];
        assert_eq!(cumulative_coverage_curve(run1, &single), vec![(1, 1)]);
    }

    #[test]
    fn curve_ends_at_full_topic_count() {
        let m = balanced_matrix(7, 12);
        for run in run_shuffles(&m, 40, 11).unwrap() {
            let curve = cumulative_coverage_curve(&run, &m);
            assert_eq!(curve.last().unwrap().1, m.n_topics() as u64);
            assert!(curve.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        }
    }

    #[test]
    fn histogram_covers_all_runs() {
        let m = balanced_matrix(4, 50);
        let runs = run_shuffles(&m, 300, 21).unwrap();
        let bins = cover_time_histogram(&runs, 20).unwrap();
        assert_eq!(bins.iter().map(|b| b.count).sum::<u64>(), 300);
        assert!(bins.len() <= 20);
        assert!(bins.windows(2).all(|w| w[1].start == w[0].end + 1));
    }

    #[test]
    fn summary_is_consistent() {
        let m = balanced_matrix(3, 30);
        let runs = run_shuffles(&m, 250, 8).unwrap();
        let summary = summarize(&runs, &m, &[0.1, 0.5, 0.9], 30).unwrap();
        assert_eq!(summary.shuffles, 250);
        assert_eq!(
            summary.terminal_rows.iter().map(|r| r.n).sum::<u64>(),
            summary.shuffles
        );
        assert_eq!(
            summary.max_cover,
            runs.iter().map(|r| r.cover_time).max().unwrap()
        );
    }
}
