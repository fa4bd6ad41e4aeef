//! `risk`: the closed-form scenario computation.

use anyhow::Result;
use clap::Parser;
use serde_json::json;
use std::path::PathBuf;

use topicrisk::fomo;

use crate::config::{require, usage_error};
use crate::report::RunReport;
use crate::Ctx;

#[derive(Parser, Debug)]
pub struct Args {
    /// Confidence level c, in (0, 1).
    #[arg(long)]
    confidence: Option<f64>,

    /// Number of identified responsive documents.
    #[arg(long)]
    identified: Option<u64>,

    /// Recall level of the identified set; the missed-set size is derived.
    #[arg(long, conflicts_with = "missed")]
    recall: Option<f64>,

    /// Missed-set size given directly instead of via recall.
    #[arg(long)]
    missed: Option<f64>,

    /// Report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    let cfg = &ctx.file_config;
    cfg.check_keys(&["confidence", "identified", "recall", "missed", "out"])?;

    let confidence = require(args.confidence, cfg.f64("confidence")?, "confidence")?;
    let identified = require(args.identified, cfg.u64("identified")?, "identified")?;
    let recall = args.recall.or(cfg.f64("recall")?);
    let missed = args.missed.or(cfg.f64("missed")?);
    let out = args.out.or(cfg.string("out")?.map(PathBuf::from));

    let estimate = match (recall, missed) {
        (Some(recall), None) => fomo::fomo_risk(confidence, identified, recall)?,
        (None, Some(missed)) => {
            let prevalence = fomo::max_missed_prevalence(confidence, identified)?;
            let found = fomo::found_in_missed(prevalence, missed)?;
            fomo::FomoEstimate {
                inputs: fomo::FomoInputs {
                    confidence_level: confidence,
                    identified_count: identified,
                    missed_count: missed,
                },
                max_missed_prevalence: prevalence,
                found_confidence: found,
                fomo_risk: (1.0 - confidence) * found,
            }
        }
        _ => return usage_error("exactly one of --recall or --missed is required"),
    };

    let config = json!({
        "confidence": confidence,
        "identified": identified,
        "recall": recall,
        "missed": missed,
    });
    let outputs = json!({
        "estimate": estimate,
        "documents_per_missed_topic": 1.0 / estimate.max_missed_prevalence,
    });
    RunReport::new(ctx.argv.clone(), "risk", config, None, outputs, ctx.started)
        .emit(out.as_deref())
}
