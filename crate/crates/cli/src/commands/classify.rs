//! `classify`: train a relevance classifier, evaluate the holdout, and
//! compute produced-set recall both ways.

use anyhow::Result;
use clap::{Parser, ValueEnum};
use serde_json::json;
use std::collections::BTreeSet;
use std::path::PathBuf;

use topicrisk::classify::{
    evaluate_metrics, predict_scores, produced_set_recall, split_by_class_counts, train_linear,
    train_nb, whole_set_recall, LinearConfig,
};
use topicrisk::text::{build_vocab, vectorize, VocabOptions};

use crate::config::{require, resolve, usage_error};
use crate::formats::read_corpus;
use crate::report::RunReport;
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Nb,
    Linear,
}

#[derive(Parser, Debug)]
pub struct Args {
    /// Corpus JSONL; every document must carry a `relevant` flag.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,

    /// Classifier family.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,

    /// Relevant documents drawn into the training split.
    #[arg(long)]
    train_relevant: Option<usize>,

    /// Non-relevant documents drawn into the training split.
    #[arg(long)]
    train_nonrelevant: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// Additive smoothing for the naive Bayes model.
    #[arg(long)]
    smoothing: Option<f64>,

    /// Epochs for the linear model.
    #[arg(long)]
    epochs: Option<usize>,

    /// Base learning rate for the linear model.
    #[arg(long)]
    learning_rate: Option<f64>,

    /// L2 penalty for the linear model.
    #[arg(long)]
    l2: Option<f64>,

    /// Where to save the trained model JSON.
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,

    /// Report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&[
        "corpus",
        "model",
        "train_relevant",
        "train_nonrelevant",
        "seed",
        "smoothing",
        "epochs",
        "learning_rate",
        "l2",
        "model_out",
        "out",
    ])?;

    let corpus_path = require(args.corpus, cfg.string("corpus")?.map(PathBuf::from), "corpus")?;
    let model_kind = match (args.model, cfg.string("model")?) {
        (Some(m), _) => m,
        (None, Some(s)) => match s.as_str() {
            "nb" => ModelKind::Nb,
            "linear" => ModelKind::Linear,
            other => return usage_error(format!("config model must be nb or linear, got {other:?}")),
        },
        (None, None) => ModelKind::Nb,
    };
    let train_relevant = resolve(args.train_relevant, cfg.usize("train_relevant")?, 1_257);
    let train_nonrelevant = resolve(args.train_nonrelevant, cfg.usize("train_nonrelevant")?, 1_500);
    let seed = require(args.seed, cfg.u64("seed")?, "seed")?;
    let smoothing = resolve(args.smoothing, cfg.f64("smoothing")?, 1.0);
    let linear_defaults = LinearConfig::new(seed);
    let linear_config = LinearConfig {
        epochs: resolve(args.epochs, cfg.usize("epochs")?, linear_defaults.epochs),
        learning_rate: resolve(
            args.learning_rate,
            cfg.f64("learning_rate")?,
            linear_defaults.learning_rate,
        ),
        l2: resolve(args.l2, cfg.f64("l2")?, linear_defaults.l2),
        seed,
    };
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));
    let model_out = args.model_out.or(cfg.string("model_out")?.map(PathBuf::from));

    let docs = read_corpus(&corpus_path)?;
    let labels: Vec<bool> = docs
        .iter()
        .map(|d| {
            d.relevant.ok_or_else(|| {
                anyhow::anyhow!("document {:?} has no relevant flag; classify needs oracle labels", d.id)
            })
        })
        .collect::<Result<_>>()?;
    let vocab = build_vocab(&docs, &VocabOptions::default())?;
    let bow = vectorize(&docs, &vocab);

    let (train, holdout) = split_by_class_counts(&labels, train_relevant, train_nonrelevant, seed)?;
    let train_labels: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
    let train_bow = bow.select_rows(&train);

    enum Fitted {
        Nb(topicrisk::classify::NbModel),
        Linear(topicrisk::classify::LinearModel),
    }
    let fitted = match model_kind {
        ModelKind::Nb => Fitted::Nb(train_nb(&train_bow, &train_labels, smoothing)?),
        ModelKind::Linear => Fitted::Linear(train_linear(&train_bow, &train_labels, &linear_config)?),
    };
    let (model_json, all_predictions) = match &fitted {
        Fitted::Nb(m) => (serde_json::to_value(m)?, predict_scores(m, &bow)?),
        Fitted::Linear(m) => (serde_json::to_value(m)?, predict_scores(m, &bow)?),
    };
    if let Some(path) = &model_out {
        std::fs::write(path, serde_json::to_string_pretty(&model_json)? + "\n")?;
    }

    let holdout_predicted: Vec<bool> = holdout.iter().map(|&i| all_predictions[i].1).collect();
    let holdout_actual: Vec<bool> = holdout.iter().map(|&i| labels[i]).collect();
    let eval = evaluate_metrics(&holdout_predicted, &holdout_actual)?;

    let all_relevant: BTreeSet<String> = docs
        .iter()
        .zip(&labels)
        .filter(|&(_, &l)| l)
        .map(|(d, _)| d.id.clone())
        .collect();
    let training_relevant: BTreeSet<String> = train
        .iter()
        .filter(|&&i| labels[i])
        .map(|&i| docs[i].id.clone())
        .collect();
    let predicted_holdout: BTreeSet<String> = holdout
        .iter()
        .filter(|&&i| all_predictions[i].1)
        .map(|&i| docs[i].id.clone())
        .collect();
    let predicted_all: BTreeSet<String> = (0..docs.len())
        .filter(|&i| all_predictions[i].1)
        .map(|i| docs[i].id.clone())
        .collect();

    let produced = produced_set_recall(&training_relevant, &predicted_holdout, &all_relevant)?;
    let rescored = whole_set_recall(&predicted_all, &all_relevant)?;
    let produced_count = training_relevant.len()
        + predicted_holdout.intersection(&all_relevant).count()
        - predicted_holdout
            .intersection(&training_relevant)
            .count();
    let missed_count = all_relevant.len() - produced_count;

    let config = json!({
        "corpus": corpus_path,
        "model": match model_kind { ModelKind::Nb => "nb", ModelKind::Linear => "linear" },
        "train_relevant": train_relevant,
        "train_nonrelevant": train_nonrelevant,
        "seed": seed,
        "smoothing": smoothing,
        "linear": linear_config,
    });
    let outputs = json!({
        "model_out": model_out,
        "train_size": train.len(),
        "holdout_size": holdout.len(),
        "holdout_eval": eval,
        "produced_set_recall": produced,
        "missed_relevant_count": missed_count,
        "whole_set_rescored_recall": rescored,
        "all_relevant_count": all_relevant.len(),
    });
    RunReport::new(ctx.argv.clone(), "classify", config, Some(seed), outputs, ctx.started)
        .emit(out.as_deref())
}
