//! Experiment runner for the `sparsepca` library: generated and file-based
//! experiments, comparison tables, box-plot data and JSON reports.

pub mod artifacts;
pub mod boxplot;
pub mod config;
pub mod error;
pub mod experiment;
pub mod matrix_io;
pub mod report;
pub mod tables;

pub use artifacts::write_artifacts;
pub use boxplot::{emit_boxplot_data, Statistic};
pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutput, RunRecord, TruthRecord};
pub use matrix_io::{load_matrix_csv, save_matrix_csv};
pub use tables::{build_table, emit_table, Table, TableKind};
