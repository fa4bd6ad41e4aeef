//! `cal`: continuous-active-learning simulation with topic-coverage and
//! ordering-entropy audits.

use anyhow::Result;
use clap::{Parser, ValueEnum};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use topicrisk::cal::{
    compare_orderings, run_cal, run_random_order, topic_coverage, CalConfig, CalCorpus,
    CalTrace, ClassifierKind,
};
use topicrisk::rng::derive_seed;
use topicrisk::text::{build_vocab, vectorize, VocabOptions};

use crate::config::{require, resolve, usage_error};
use crate::formats::read_corpus;
use crate::report::{json_f64, CsvDir, RunReport};
use crate::Ctx;

/// Stream index separating the baseline's randomness from the CAL run's.
const NS_BASELINE: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Classifier {
    Nb,
    Linear,
}

#[derive(Parser, Debug)]
pub struct Args {
    /// Corpus JSONL; every document must carry a `relevant` flag. Topic
    /// audits need `topics` on the relevant documents.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,

    /// Stop once recall over the whole pool reaches this level.
    #[arg(long)]
    target_recall: Option<f64>,

    #[arg(long)]
    batch_size: Option<usize>,

    #[arg(long)]
    seed_batch: Option<usize>,

    #[arg(long, value_enum)]
    classifier: Option<Classifier>,

    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    max_batches: Option<usize>,

    /// Where to save the full labeling trace JSON.
    #[arg(long, value_name = "FILE")]
    trace_out: Option<PathBuf>,

    /// Report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Directory for the per-batch recall trajectory CSV.
    #[arg(long, value_name = "DIR")]
    csv_dir: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "corpus",
        "target_recall",
        "batch_size",
        "seed_batch",
        "classifier",
        "seed",
        "max_batches",
        "trace_out",
        "out",
        "csv_dir",
    ])?;

    let corpus_path = require(args.corpus, cfg.string("corpus")?.map(PathBuf::from), "corpus")?;
    let target_recall = require(args.target_recall, cfg.f64("target_recall")?, "target-recall")?;
    let seed = require(args.seed, cfg.u64("seed")?, "seed")?;
    let classifier = match (args.classifier, cfg.string("classifier")?) {
        (Some(c), _) => c,
        (None, Some(s)) => match s.as_str() {
            "nb" => Classifier::Nb,
            "linear" => Classifier::Linear,
            other => return usage_error(format!("config classifier must be nb or linear, got {other:?}")),
        },
        (None, None) => Classifier::Linear,
    };
    let kind = match classifier {
        Classifier::Nb => ClassifierKind::NaiveBayes,
        Classifier::Linear => ClassifierKind::Linear,
    };
    let defaults = CalConfig::new(target_recall, kind, seed);
    let cal_config = CalConfig {
        batch_size: resolve(args.batch_size, cfg.usize("batch_size")?, defaults.batch_size),
        seed_batch_size: resolve(args.seed_batch, cfg.usize("seed_batch")?, defaults.seed_batch_size),
        max_batches: resolve(args.max_batches, cfg.usize("max_batches")?, defaults.max_batches),
        ..defaults
    };
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let trace_out = args.trace_out.or(cfg.string("trace_out")?.map(PathBuf::from));
    let csv_dir = args.csv_dir.or(cfg.string("csv_dir")?.map(PathBuf::from));

    let docs = read_corpus(&corpus_path)?;
    let relevant: Vec<bool> = docs
        .iter()
        .map(|d| {
            d.relevant.ok_or_else(|| {
                anyhow::anyhow!("document {:?} has no relevant flag; cal needs oracle labels", d.id)
            })
        })
        .collect::<Result<_>>()?;
    let vocab = build_vocab(&docs, &VocabOptions::default())?;
    let bow = vectorize(&docs, &vocab);
    let corpus = CalCorpus {
        ids: docs.iter().map(|d| d.id.clone()).collect(),
        bow,
        relevant: relevant.clone(),
        topics: docs
            .iter()
            .map(|d| d.topics.as_ref().and_then(|t| t.first().cloned()))
            .collect(),
    };

    let trace = run_cal(&corpus, &cal_config)?;
    let baseline_config = CalConfig {
        seed: derive_seed(seed, NS_BASELINE),
        ..cal_config.clone()
    };
    let baseline = run_random_order(&corpus, &baseline_config)?;
    if let Some(path) = &trace_out {
        std::fs::write(path, trace.to_json() + "\n")?;
    }

    // Topic audits run only when every relevant document carries a topic.
    let topics_known = docs
        .iter()
        .zip(&relevant)
        .filter(|&(_, &r)| r)
        .all(|(d, _)| d.topics.as_ref().is_some_and(|t| !t.is_empty()));
    let coverage = if topics_known {
        let doc_topics: BTreeMap<String, String> = docs
            .iter()
            .filter(|d| d.topics.as_ref().is_some_and(|t| !t.is_empty()))
            .map(|d| (d.id.clone(), d.topics.as_ref().unwrap()[0].clone()))
            .collect();
        let all_topics: BTreeSet<String> = docs
            .iter()
            .zip(&relevant)
            .filter(|&(_, &r)| r)
            .map(|(d, _)| d.topics.as_ref().unwrap()[0].clone())
            .collect();
        let (covered, missed) = topic_coverage(&trace.identified_set, &doc_topics, &all_topics)?;
        Some(json!({
            "all_topics": all_topics.len(),
            "covered": covered.len(),
            "missed_topics": missed,
        }))
    } else {
        None
    };
    let entropy = if trace.topic_sequence.len() >= 2 && baseline.topic_sequence.len() >= 2 {
        let (cal_entropy, random_entropy) = compare_orderings(&trace, &baseline)?;
        Some(json!({
            "cal": cal_entropy,
            "random_order": random_entropy,
        }))
    } else {
        None
    };

    if let Some(dir) = &csv_dir {
        let csv = CsvDir::new(dir)?;
        csv.write(
            "recall_trajectory.csv",
            &["batch", "labeled", "relevant_labeled", "recall"],
            &trajectory_rows(&trace),
        )?;
    }

    let config = json!({
        "corpus": corpus_path,
        "cal": cal_config,
    });
    let outputs = json!({
        "trace_out": trace_out,
        "batches": trace.recall_after_batch.len(),
        "stop_batch": trace.stop_batch,
        "stop_reason": trace.stop_reason,
        "labeled": trace.labeled_order.len(),
        "identified_relevant": trace.identified_set.len(),
        "final_recall": trace.final_recall,
        "recall_after_batch": trace.recall_after_batch,
        "topic_coverage": coverage,
        "ordering_entropy": entropy,
        "baseline": {
            "labeled": baseline.labeled_order.len(),
            "final_recall": baseline.final_recall,
            "stop_reason": baseline.stop_reason,
        },
    });
    RunReport::new(ctx.argv.clone(), "cal", config, Some(seed), outputs, ctx.started)
        .emit(out.as_deref())
}

fn trajectory_rows(trace: &CalTrace) -> Vec<Vec<String>> {
    let n_batches = trace.recall_after_batch.len();
    let mut labeled = vec![0u64; n_batches];
    let mut relevant = vec![0u64; n_batches];
    for doc in &trace.labeled_order {
        labeled[doc.batch] += 1;
        if doc.relevant {
            relevant[doc.batch] += 1;
        }
    }
    let mut labeled_cum = 0u64;
    let mut relevant_cum = 0u64;
    (0..n_batches)
        .map(|batch| {
            labeled_cum += labeled[batch];
            relevant_cum += relevant[batch];
            vec![
                batch.to_string(),
                labeled_cum.to_string(),
                relevant_cum.to_string(),
                json_f64(trace.recall_after_batch[batch]),
            ]
        })
        .collect()
}
