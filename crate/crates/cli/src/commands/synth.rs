//! `synth`: synthetic corpus and label-matrix generation.

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

use topicrisk::synth::{
    generate_lda_corpus, generate_relevance_corpus, generate_zipf_labels, LdaCorpusSpec,
    RelevanceCorpusSpec, ZipfLabelSpec,
};

use crate::config::{require, resolve};
use crate::formats::{sequential_doc_ids, write_corpus, write_label_csv};
use crate::report::RunReport;
use crate::Ctx;

#[derive(Subcommand, Debug)]
pub enum Kind {
    /// Zipf-distributed multi-label topic matrix (label CSV).
    ZipfLabels(ZipfArgs),
    /// Corpus sampled from a generative topic model (JSONL).
    LdaCorpus(LdaArgs),
    /// Labeled relevance corpus with Zipf topic structure (JSONL).
    Relevance(RelevanceArgs),
}

#[derive(Parser, Debug)]
pub struct ZipfArgs {
    #[arg(long)]
    docs: Option<usize>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    mean_labels: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Label CSV destination.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional JSON run report.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct LdaArgs {
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    vocab: Option<usize>,
    #[arg(long)]
    docs: Option<usize>,
    #[arg(long)]
    doc_len_mean: Option<f64>,
    #[arg(long)]
    doc_len_dispersion: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Give each topic a topic-exclusive vocabulary block (separable
    /// fixture).
    #[arg(long)]
    disjoint_core: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Corpus JSONL destination.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Where to write the generative ground truth (true dominant topics and
    /// topic-word matrix).
    #[arg(long, value_name = "FILE")]
    truth_out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Parser, Debug)]
pub struct RelevanceArgs {
    #[arg(long)]
    relevant: Option<usize>,
    #[arg(long)]
    nonrelevant: Option<usize>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    exponent: Option<f64>,
    /// Vocabulary overlap between the classes, 0 (separable) to 1
    /// (identical distributions).
    #[arg(long)]
    overlap: Option<f64>,
    #[arg(long)]
    doc_len_mean: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Corpus JSONL destination.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

pub fn run(kind: Kind, ctx: &Ctx) -> Result<()> {
    match kind {
        Kind::ZipfLabels(args) => run_zipf(args, ctx),
        Kind::LdaCorpus(args) => run_lda(args, ctx),
        Kind::Relevance(args) => run_relevance(args, ctx),
    }
}

fn run_zipf(args: ZipfArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&["docs", "topics", "exponent", "mean_labels", "seed", "out", "report"])?;
    let spec = ZipfLabelSpec {
        n_docs: resolve(args.docs, cfg.usize("docs")?, 200_000),
        n_topics: resolve(args.topics, cfg.usize("topics")?, 64),
        exponent: resolve(args.exponent, cfg.f64("exponent")?, super::simulate::DEFAULT_EXPONENT),
        mean_labels_per_doc: resolve(args.mean_labels, cfg.f64("mean_labels")?, 1.37),
        seed: require(args.seed, cfg.u64("seed")?, "seed")?,
    };
    let out = require(args.out, cfg.string("out")?.map(PathBuf::from), "out")?;

    let generated = generate_zipf_labels(&spec)?;
    let ids = sequential_doc_ids(generated.matrix.n_docs());
    write_label_csv(&out, &generated.matrix, &ids)?;

    let outputs = json!({
        "labels_csv": out,
        "n_docs": generated.matrix.n_docs(),
        "n_topics": generated.matrix.n_topics(),
        "mean_labels_per_doc": generated.matrix.mean_labels_per_doc(),
        "forced_topics": generated.forced_topics,
        "rarest_prevalence": generated.matrix.prevalence(generated.matrix.rarest_topic()),
    });
    emit_report(ctx, "synth", &spec, spec.seed, outputs, args.report)
}

fn run_lda(args: LdaArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "topics",
        "vocab",
        "docs",
        "doc_len_mean",
        "doc_len_dispersion",
        "alpha",
        "beta",
        "disjoint_core",
        "seed",
        "out",
        "truth_out",
        "report",
    ])?;
    let spec = LdaCorpusSpec {
        n_topics: resolve(args.topics, cfg.usize("topics")?, 100),
        vocab_size: resolve(args.vocab, cfg.usize("vocab")?, 2_000),
        n_docs: resolve(args.docs, cfg.usize("docs")?, 1_676),
        doc_len_mean: resolve(args.doc_len_mean, cfg.f64("doc_len_mean")?, 25.0),
        doc_len_dispersion: resolve(args.doc_len_dispersion, cfg.f64("doc_len_dispersion")?, 0.3),
        alpha: resolve(args.alpha, cfg.f64("alpha")?, 0.1),
        beta: resolve(args.beta, cfg.f64("beta")?, 0.05),
        seed: require(args.seed, cfg.u64("seed")?, "seed")?,
        disjoint_core: args.disjoint_core || cfg.bool("disjoint_core")?.unwrap_or(false),
    };
    let out = require(args.out, cfg.string("out")?.map(PathBuf::from), "out")?;
    let truth_out = args.truth_out.or(cfg.string("truth_out")?.map(PathBuf::from));

    let corpus = generate_lda_corpus(&spec)?;
    write_corpus(&out, &corpus.documents)?;
    if let Some(path) = &truth_out {
        let truth = json!({
            "true_dominant": corpus.true_dominant,
            "true_topic_word": corpus.true_topic_word,
        });
        std::fs::write(path, serde_json::to_string_pretty(&truth)? + "\n")?;
    }

    let outputs = json!({
        "corpus_jsonl": out,
        "truth_out": truth_out,
        "n_docs": corpus.documents.len(),
        "n_topics": spec.n_topics,
    });
    emit_report(ctx, "synth", &spec, spec.seed, outputs, args.report)
}

fn run_relevance(args: RelevanceArgs, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "relevant",
        "nonrelevant",
        "topics",
        "exponent",
        "overlap",
        "doc_len_mean",
        "seed",
        "out",
        "report",
    ])?;
    let defaults = RelevanceCorpusSpec::new(0);
    let spec = RelevanceCorpusSpec {
        n_relevant: resolve(args.relevant, cfg.usize("relevant")?, defaults.n_relevant),
        n_nonrelevant: resolve(args.nonrelevant, cfg.usize("nonrelevant")?, defaults.n_nonrelevant),
        n_topics: resolve(args.topics, cfg.usize("topics")?, defaults.n_topics),
        zipf_exponent: resolve(args.exponent, cfg.f64("exponent")?, defaults.zipf_exponent),
        vocab_overlap: resolve(args.overlap, cfg.f64("overlap")?, defaults.vocab_overlap),
        doc_len_mean: resolve(args.doc_len_mean, cfg.f64("doc_len_mean")?, defaults.doc_len_mean),
        seed: require(args.seed, cfg.u64("seed")?, "seed")?,
    };
    let out = require(args.out, cfg.string("out")?.map(PathBuf::from), "out")?;

    let documents = generate_relevance_corpus(&spec)?;
    write_corpus(&out, &documents)?;

    let outputs = json!({
        "corpus_jsonl": out,
        "relevant": documents.iter().filter(|d| d.relevant == Some(true)).count(),
        "nonrelevant": documents.iter().filter(|d| d.relevant == Some(false)).count(),
        "topics": spec.n_topics,
    });
    emit_report(ctx, "synth", &spec, spec.seed, outputs, args.report)
}

fn emit_report<S: serde::Serialize>(
    ctx: &Ctx,
    subcommand: &str,
    spec: &S,
    seed: u64,
    outputs: serde_json::Value,
    report: Option<PathBuf>,
) -> Result<()> {
    let report_path = match report {
        Some(p) => Some(p),
        None => ctx.file_config.string("report")?.map(PathBuf::from),
    };
    if let Some(path) = report_path {
        RunReport::new(
            ctx.argv.clone(),
            subcommand,
            serde_json::to_value(spec)?,
            Some(seed),
            outputs,
            ctx.started,
        )
        .emit(Some(&path))?;
    }
    Ok(())
}
