//! JSON run report.

use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{io_err, Result};
use crate::experiment::ExperimentOutput;

#[derive(Serialize)]
struct Report<'a> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    output: &'a ExperimentOutput,
    failed_runs: usize,
}

pub fn report_json(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<String> {
    let report = Report {
        config: cfg,
        output: out,
        failed_runs: out.failures().count(),
    };
    Ok(serde_json::to_string_pretty(&report)?)
}

pub fn write_report(cfg: &ExperimentConfig, out: &ExperimentOutput, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, report_json(cfg, out)? + "\n").map_err(io_err(path))
}
