//! `simulate`: shuffle-based cover-time estimation over a label matrix.

use anyhow::Result;
use clap::Parser;
use serde_json::json;
use std::path::PathBuf;

use topicrisk::coverage::{
    cumulative_coverage_curve, expected_first_encounter, run_shuffles, summarize, CoverageSummary,
    LabelMatrix,
};
use topicrisk::synth::{generate_zipf_labels, ZipfLabelSpec};

use crate::config::{require, resolve, usage_error};
use crate::formats::read_label_csv;
use crate::report::{json_f64, CsvDir, RunReport};
use crate::Ctx;

pub const DEFAULT_PERCENTILES: &str = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95";
/// Default Zipf exponent for the generated 64-topic matrix; at 200k
/// documents and 1.37 mean labels it puts the rarest topic near 20
/// occurrences, keeping the rare-topic regime meaningful at desk scale.
pub const DEFAULT_EXPONENT: f64 = 2.2;

#[derive(Parser, Debug)]
pub struct Args {
    /// Label matrix CSV (`doc_id,topic_id`). Mutually exclusive with the
    /// --zipf-* generator flags.
    #[arg(long, value_name = "FILE")]
    labels: Option<PathBuf>,

    /// Generate a Zipf label matrix with this many topics.
    #[arg(long, conflicts_with = "labels")]
    zipf_topics: Option<usize>,

    /// Documents in the generated matrix.
    #[arg(long, conflicts_with = "labels")]
    docs: Option<usize>,

    /// Mean labels per document of the generated matrix.
    #[arg(long, conflicts_with = "labels")]
    mean_labels: Option<f64>,

    /// Zipf exponent of the generated matrix.
    #[arg(long, conflicts_with = "labels")]
    exponent: Option<f64>,

    /// Number of shuffles.
    #[arg(long)]
    shuffles: Option<u64>,

    /// Master seed (mandatory; results are a pure function of it).
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated percentiles in (0, 1].
    #[arg(long)]
    percentiles: Option<String>,

    /// Number of cover-time histogram bins.
    #[arg(long)]
    hist_bins: Option<u64>,

    /// Shuffle index whose cumulative coverage curve is emitted.
    #[arg(long)]
    curve_shuffle: Option<u64>,

    /// Report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Directory for CSV sidecars (percentile table, terminal topics,
    /// histogram, curve, rank/frequency table).
    #[arg(long, value_name = "DIR")]
    csv_dir: Option<PathBuf>,
}

pub fn parse_percentiles(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let value: f64 = match part.parse() {
            Ok(v) => v,
            Err(_) => return usage_error(format!("bad percentile {part:?}")),
        };
        if !(value > 0.0 && value <= 1.0) {
            return usage_error(format!("percentile {value} outside (0, 1]"));
        }
        out.push(value);
    }
    if out.is_empty() {
        return usage_error("empty percentile list");
    }
    Ok(out)
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "labels",
        "zipf_topics",
        "docs",
        "mean_labels",
        "exponent",
        "shuffles",
        "seed",
        "percentiles",
        "hist_bins",
        "curve_shuffle",
        "out",
        "csv_dir",
    ])?;

    let shuffles = require(args.shuffles, cfg.u64("shuffles")?, "shuffles")?;
    let seed = require(args.seed, cfg.u64("seed")?, "seed")?;
    let percentiles = parse_percentiles(&resolve(
        args.percentiles,
        cfg.string("percentiles")?,
        DEFAULT_PERCENTILES.to_string(),
    ))?;
    let hist_bins = resolve(args.hist_bins, cfg.u64("hist_bins")?, 50);
    let curve_shuffle = resolve(args.curve_shuffle, cfg.u64("curve_shuffle")?, 0);
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let csv_dir = args.csv_dir.or(cfg.string("csv_dir")?.map(PathBuf::from));
    let labels_path = args.labels.or(cfg.string("labels")?.map(PathBuf::from));

    let (matrix, source, forced_topics) = match labels_path {
        Some(path) => (read_label_csv(&path)?, json!({"labels": path}), Vec::new()),
        None => {
            let spec = ZipfLabelSpec {
                n_docs: require(args.docs, cfg.usize("docs")?, "docs")?,
                n_topics: require(args.zipf_topics, cfg.usize("zipf_topics")?, "zipf-topics")?,
                exponent: resolve(args.exponent, cfg.f64("exponent")?, DEFAULT_EXPONENT),
                mean_labels_per_doc: require(args.mean_labels, cfg.f64("mean_labels")?, "mean-labels")?,
                seed,
            };
            let generated = generate_zipf_labels(&spec)?;
            (generated.matrix, json!({"zipf": spec}), generated.forced_topics)
        }
    };

    if curve_shuffle >= shuffles {
        return usage_error(format!(
            "--curve-shuffle {curve_shuffle} out of range (only {shuffles} shuffles)"
        ));
    }

    let runs = run_shuffles(&matrix, shuffles, seed)?;
    let summary = summarize(&runs, &matrix, &percentiles, hist_bins)?;
    let curve = cumulative_coverage_curve(&runs[curve_shuffle as usize], &matrix);

    let rank_frequency: Vec<serde_json::Value> = (0..matrix.n_topics() as u32)
        .map(|i| {
            json!({
                "rank": i + 1,
                "topic": matrix.topic_id(i),
                "documents": matrix.topic_count(i),
                "prevalence": matrix.prevalence(i),
            })
        })
        .collect();
    let rarest = matrix.rarest_topic();
    let rarest_prevalence = matrix.prevalence(rarest);

    let config = json!({
        "source": source,
        "shuffles": shuffles,
        "seed": seed,
        "percentiles": percentiles,
        "hist_bins": hist_bins,
        "curve_shuffle": curve_shuffle,
    });
    let outputs = json!({
        "label_matrix": {
            "n_docs": matrix.n_docs(),
            "n_topics": matrix.n_topics(),
            "mean_labels_per_doc": matrix.mean_labels_per_doc(),
            "forced_topics": forced_topics,
            "rank_frequency": rank_frequency,
        },
        "coverage": summary,
        "cumulative_curve": curve,
        "rarest_topic": {
            "topic": matrix.topic_id(rarest),
            "prevalence": rarest_prevalence,
            "predicted_first_encounter": expected_first_encounter(rarest_prevalence)?,
        },
    });

    if let Some(dir) = &csv_dir {
        write_sidecars(&CsvDir::new(dir)?, &matrix, &summary, &curve)?;
    }
    RunReport::new(ctx.argv.clone(), "simulate", config, Some(seed), outputs, ctx.started)
        .emit(out.as_deref())
}

fn write_sidecars(
    csv: &CsvDir,
    matrix: &LabelMatrix,
    summary: &CoverageSummary,
    curve: &[(u64, u64)],
) -> Result<()> {
    csv.write(
        "percentiles.csv",
        &["percentile", "documents", "recall_level"],
        &summary
            .percentile_rows
            .iter()
            .map(|r| {
                vec![
                    json_f64(r.percentile),
                    r.documents.to_string(),
                    json_f64(r.recall_level),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    csv.write(
        "terminal_topics.csv",
        &["topic", "n", "p", "predict", "mean_max"],
        &summary
            .terminal_rows
            .iter()
            .map(|r| {
                vec![
                    r.topic.clone(),
                    r.n.to_string(),
                    json_f64(r.p),
                    json_f64(r.predict),
                    json_f64(r.mean_max),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    csv.write(
        "histogram.csv",
        &["bin_start", "bin_end", "count"],
        &summary
            .histogram
            .iter()
            .map(|b| vec![b.start.to_string(), b.end.to_string(), b.count.to_string()])
            .collect::<Vec<_>>(),
    )?;
    csv.write(
        "cumulative_curve.csv",
        &["position", "topics_seen"],
        &curve
            .iter()
            .map(|&(pos, seen)| vec![pos.to_string(), seen.to_string()])
            .collect::<Vec<_>>(),
    )?;
    csv.write(
        "rank_frequency.csv",
        &["rank", "topic", "documents", "prevalence"],
        &(0..matrix.n_topics() as u32)
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    matrix.topic_id(i).to_string(),
                    matrix.topic_count(i).to_string(),
                    json_f64(matrix.prevalence(i)),
                ]
            })
            .collect::<Vec<_>>(),
    )?;
    Ok(())
}
