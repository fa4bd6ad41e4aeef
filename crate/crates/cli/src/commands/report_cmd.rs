//! `report`: merge previously written run reports into one document.

use anyhow::{Context, Result};
use clap::Parser;
use serde_json::json;
use std::path::PathBuf;

use crate::config::usage_error;
use crate::report::RunReport;
use crate::Ctx;

#[derive(Parser, Debug)]
pub struct Args {
    /// Report files to merge, in order.
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,

    /// Merged report path (stdout when omitted).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<()> {
    ctx.file_config.check_keys(&["out"])?;
    if args.inputs.is_empty() {
        return usage_error("--inputs needs at least one report file");
    }
    let mut merged = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("read report {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("{} is not valid JSON", path.display()))?;
        merged.push(json!({
            "path": path,
            "report": value,
        }));
    }
    let out = args.out.or(ctx.file_config.string("out")?.map(PathBuf::from));
    let config = json!({ "inputs": args.inputs });
    RunReport::new(
        ctx.argv.clone(),
        "report",
        config,
        None,
        json!({ "reports": merged }),
        ctx.started,
    )
    .emit(out.as_deref())
}
