//! `lda`: fit a topic model, inspect top words, export dominant topics, and
//! fit a power law to the dominant-topic counts.

use anyhow::Result;
use clap::Parser;
use serde_json::json;
use std::path::PathBuf;

use topicrisk::lda::{dominant_topic, fit_lda, top_words, LdaConfig};
use topicrisk::stats::fit_power_law;
use topicrisk::text::{build_vocab, vectorize, VocabOptions};

use crate::config::{require, resolve};
use crate::formats::read_corpus;
use crate::report::{json_f64, CsvDir, RunReport};
use crate::Ctx;

#[derive(Parser, Debug)]
pub struct Args {
    /// Corpus JSONL.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,

    /// Number of topics K.
    #[arg(long)]
    topics: Option<usize>,

    /// Document-topic prior (default 1/K).
    #[arg(long)]
    alpha: Option<f64>,

    /// Topic-word prior.
    #[arg(long)]
    beta: Option<f64>,

    #[arg(long)]
    iterations: Option<usize>,

    #[arg(long)]
    burn_in: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Keep only terms occurring in at least this many documents.
    #[arg(long)]
    min_doc_freq: Option<usize>,

    /// Top words listed per topic.
    #[arg(long)]
    top_n: Option<usize>,

    /// Where to save the fitted model JSON.
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,

    /// Report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Directory for CSV sidecars (dominant topics, top words,
    /// rank/frequency of dominant-topic counts).
    #[arg(long, value_name = "DIR")]
    csv_dir: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "corpus",
        "topics",
        "alpha",
        "beta",
        "iterations",
        "burn_in",
        "seed",
        "min_doc_freq",
        "top_n",
        "model_out",
        "out",
        "csv_dir",
    ])?;

    let corpus_path = require(args.corpus, cfg.string("corpus")?.map(PathBuf::from), "corpus")?;
    let n_topics = require(args.topics, cfg.usize("topics")?, "topics")?;
    let seed = require(args.seed, cfg.u64("seed")?, "seed")?;
    let defaults = LdaConfig::new(n_topics, seed);
    let lda_config = LdaConfig {
        alpha: resolve(args.alpha, cfg.f64("alpha")?, defaults.alpha),
        beta: resolve(args.beta, cfg.f64("beta")?, defaults.beta),
        iterations: resolve(args.iterations, cfg.usize("iterations")?, defaults.iterations),
        burn_in: resolve(args.burn_in, cfg.usize("burn_in")?, defaults.burn_in),
        ..defaults
    };
    let min_doc_freq = resolve(args.min_doc_freq, cfg.usize("min_doc_freq")?, 1);
    let top_n = resolve(args.top_n, cfg.usize("top_n")?, 15);
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let model_out = args.model_out.or(cfg.string("model_out")?.map(PathBuf::from));
    let csv_dir = args.csv_dir.or(cfg.string("csv_dir")?.map(PathBuf::from));

    let docs = read_corpus(&corpus_path)?;
    let vocab = build_vocab(
        &docs,
        &VocabOptions {
            min_doc_freq,
            ..Default::default()
        },
    )?;
    let bow = vectorize(&docs, &vocab);
    let model = fit_lda(&bow, &vocab, &lda_config)?;
    if let Some(path) = &model_out {
        std::fs::write(path, model.to_json() + "\n")?;
    }

    let dominant = dominant_topic(&model);
    let dominant_rows: Vec<(String, u32)> = model
        .doc_indices
        .iter()
        .zip(&dominant)
        .map(|(&doc, &topic)| (docs[doc as usize].id.clone(), topic))
        .collect();
    let mut topic_counts = vec![0u64; n_topics];
    for &topic in &dominant {
        topic_counts[topic as usize] += 1;
    }
    let mut sorted_counts: Vec<u64> = topic_counts.clone();
    sorted_counts.sort_unstable_by(|a, b| b.cmp(a));
    let rank_counts: Vec<(u64, f64)> = sorted_counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(i, &c)| (i as u64 + 1, c as f64))
        .collect();
    let power_law = if rank_counts.len() >= 3 {
        Some(fit_power_law(&rank_counts)?)
    } else {
        None
    };

    let top: Vec<serde_json::Value> = (0..n_topics)
        .map(|topic| {
            let words = top_words(&model, topic, top_n)?;
            Ok(json!({
                "topic": topic,
                "documents": topic_counts[topic],
                "words": words,
            }))
        })
        .collect::<Result<_>>()?;

    if let Some(dir) = &csv_dir {
        let csv = CsvDir::new(dir)?;
        csv.write(
            "dominant_topics.csv",
            &["doc_id", "topic"],
            &dominant_rows
                .iter()
                .map(|(id, topic)| vec![id.clone(), topic.to_string()])
                .collect::<Vec<_>>(),
        )?;
        let mut top_rows = Vec::new();
        for entry in &top {
            let topic = entry["topic"].as_u64().unwrap();
            for (rank, word) in entry["words"].as_array().unwrap().iter().enumerate() {
                top_rows.push(vec![
                    topic.to_string(),
                    (rank + 1).to_string(),
                    word[0].as_str().unwrap().to_string(),
                    json_f64(word[1].as_f64().unwrap()),
                ]);
            }
        }
        csv.write("top_words.csv", &["topic", "rank", "term", "probability"], &top_rows)?;
        csv.write(
            "rank_frequency.csv",
            &["rank", "documents", "fitted"],
            &rank_counts
                .iter()
                .map(|&(rank, count)| {
                    let fitted = power_law
                        .as_ref()
                        .map(|f| json_f64(f.predict(rank as f64)))
                        .unwrap_or_default();
                    vec![rank.to_string(), json_f64(count), fitted]
                })
                .collect::<Vec<_>>(),
        )?;
    }

    let config = json!({
        "corpus": corpus_path,
        "lda": lda_config,
        "min_doc_freq": min_doc_freq,
        "top_n": top_n,
    });
    let outputs = json!({
        "model_out": model_out,
        "n_docs_fitted": model.doc_indices.len(),
        "n_docs_excluded": bow.n_docs() - model.doc_indices.len(),
        "vocabulary_size": vocab.len(),
        "topics": top,
        "dominant_topics": dominant_rows.iter().map(|(id, t)| json!([id, t])).collect::<Vec<_>>(),
        "dominant_rank_frequency": rank_counts
            .iter()
            .map(|&(rank, count)| {
                json!({
                    "rank": rank,
                    "documents": count,
                    "fitted": power_law.as_ref().map(|f| f.predict(rank as f64)),
                })
            })
            .collect::<Vec<_>>(),
        "power_law": power_law,
        "log_likelihood_first": model.log_likelihood.first(),
        "log_likelihood_last": model.log_likelihood.last(),
    });
    RunReport::new(ctx.argv.clone(), "lda", config, Some(seed), outputs, ctx.started)
        .emit(out.as_deref())
}
