//! Writes every output file of an experiment into its output directory.

use std::fs::File;
use std::path::PathBuf;

use crate::boxplot::{emit_boxplot_data, Statistic};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{io_err, Result};
use crate::experiment::ExperimentOutput;
use crate::report::write_report;
use crate::tables::{emit_table, TableKind};

/// Always `report.json`; `table1.csv` and `table2.csv` for the
/// non-orthogonal spectra; `boxplot_<statistic>.csv` for Monte Carlo runs.
/// Returns the paths written, in a fixed order.
pub fn write_artifacts(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let report = dir.join("report.json");
    write_report(cfg, out, &report)?;
    written.push(report);

    match cfg.experiment {
        ExperimentKind::Nonorthogonal => {
            for (kind, name) in [
                (TableKind::Correlation, "table1.csv"),
                (TableKind::Variance, "table2.csv"),
            ] {
                let path = dir.join(name);
                match emit_table(out, kind, &path) {
                    Ok(_) => written.push(path),
                    Err(e) => log::warn!("{name} not written: {e}"),
                }
            }
        }
        ExperimentKind::Montecarlo => {
            for st in Statistic::ALL {
                let path = dir.join(format!("boxplot_{}.csv", st.name()));
                let file = File::create(&path).map_err(io_err(&path))?;
                emit_boxplot_data(&out.records, st, file)?;
                written.push(path);
            }
        }
        ExperimentKind::Orthogonal | ExperimentKind::File => {}
    }
    Ok(written)
}
