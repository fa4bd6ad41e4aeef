//! Run reports and CSV sidecars.
//!
//! Every subcommand emits one JSON report with a stable key order; re-running
//! the same command with the same master seed yields byte-identical JSON
//! except for the `duration_seconds` field. CSV sidecars repeat numbers from
//! the report byte-for-byte (floats are formatted by the JSON serializer in
//! both places).

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Serialize)]
pub struct RunReport {
    /// The argv the tool was invoked with.
    pub command: Vec<String>,
    pub subcommand: String,
    /// Fully resolved configuration after merging flags, the config file,
    /// and built-in defaults.
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    pub outputs: serde_json::Value,
    pub tool_version: String,
    pub duration_seconds: f64,
}

impl RunReport {
    pub fn new(
        command: Vec<String>,
        subcommand: &str,
        config: serde_json::Value,
        master_seed: Option<u64>,
        outputs: serde_json::Value,
        started: Instant,
    ) -> Self {
        Self {
            command,
            subcommand: subcommand.to_string(),
            config,
            master_seed,
            outputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: started.elapsed().as_secs_f64(),
        }
    }

    /// Writes the report to the path, or to stdout when no path is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        match out {
            Some(path) => {
                let mut file = File::create(path)
                    .with_context(|| format!("create report {}", path.display()))?;
                file.write_all(json.as_bytes())?;
                file.write_all(b"\n")?;
            }
            None => println!("{json}"),
        }
        Ok(())
    }
}

/// Formats a float exactly as the JSON report does.
pub fn json_f64(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

/// A CSV sidecar writer rooted at `--csv-dir`.
pub struct CsvDir {
    dir: PathBuf,
}

impl CsvDir {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("create csv dir {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let file =
            File::create(&path).with_context(|| format!("create {}", path.display()))?;
        let mut writer = BufWriter::new(file);
        writeln!(writer, "{}", header.join(","))?;
        for row in rows {
            writeln!(writer, "{}", row.join(","))?;
        }
        writer.flush()?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_matches_the_json_report() {
        // The CSV emitters must produce the same bytes the report does.
        for x in [0.5271, 2.9957e-5, 704180.24, 1.0, 0.0] {
            let report = serde_json::json!({ "x": x });
            let embedded = serde_json::to_string(&report).unwrap();
            assert!(embedded.contains(&json_f64(x)), "{embedded} vs {}", json_f64(x));
        }
    }
}
