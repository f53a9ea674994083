//! Experiment runner: generate or load data, calibrate or take each method's
//! knob, fit, and score the model in every requested mode.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparsepca::diagnostics::{macl, macs};
use sparsepca::simgen::{gen_montecarlo, gen_nonorthogonal_spectra, gen_orthogonal_spectra};
use sparsepca::{
    calibrate_sparsity, fit_method, stats_report, Deflation, FactorModel, Matrix, Method, ScoreMode, SimulatedDataset,
    SparsityKnob, StatsReport,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::matrix_io::load_matrix_csv;

/// Outcome of one method on one dataset, in one score mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub deflation: Deflation,
    pub score_mode: ScoreMode,
    pub seed: u64,
    pub knob: Option<SparsityKnob>,
    pub target_nnz: Option<usize>,
    pub nnz: Option<usize>,
    pub stats: Option<StatsReport>,
    /// Set when the fit or the statistics failed.
    pub error: Option<String>,
    /// Not serialized, so that reports of identical runs are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

/// Correlation statistics of the generating factors for one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub seed: u64,
    pub macs: f64,
    pub macl: f64,
    pub nnz: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutput {
    /// Ordered by seed, then method in config order, then score mode.
    pub records: Vec<RunRecord>,
    /// One per generated dataset; empty for file experiments.
    pub truth: Vec<TruthRecord>,
}

impl ExperimentOutput {
    pub fn failures(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| !r.succeeded())
    }
}

struct Dataset {
    seed: u64,
    x: Matrix,
    components: usize,
    target_nnz: Option<usize>,
    truth: Option<TruthRecord>,
}

fn column_centered(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    out
}

fn from_generated(d: SimulatedDataset, seed: u64, cfg: &ExperimentConfig) -> Result<Dataset> {
    let truth = TruthRecord {
        seed,
        macs: macs(&d.t_true)?,
        macl: macl(&d.p_true)?,
        nnz: d.nnz_true,
    };
    Ok(Dataset {
        seed,
        components: cfg.components.unwrap_or(d.n_components()),
        target_nnz: Some(cfg.target_nnz.unwrap_or(d.nnz_true)),
        x: d.x,
        truth: Some(truth),
    })
}

fn datasets(cfg: &ExperimentConfig) -> Result<Vec<Dataset>> {
    let seeds: Vec<u64> = (0..cfg.repetitions() as u64)
        .map(|r| cfg.seed.wrapping_add(r))
        .collect();
    let mut out: Vec<Dataset> = match cfg.experiment {
        ExperimentKind::Orthogonal => seeds
            .iter()
            .map(|&s| from_generated(gen_orthogonal_spectra(), s, cfg))
            .collect::<Result<_>>()?,
        ExperimentKind::Nonorthogonal => seeds
            .iter()
            .map(|&s| from_generated(gen_nonorthogonal_spectra(), s, cfg))
            .collect::<Result<_>>()?,
        ExperimentKind::Montecarlo => seeds
            .par_iter()
            .map(|&s| from_generated(gen_montecarlo(s), s, cfg))
            .collect::<Result<_>>()?,
        ExperimentKind::File => {
            // validated: data is present
            let x = load_matrix_csv(cfg.data.as_ref().expect("validated config"))?;
            let components = cfg.components.unwrap_or(1);
            seeds
                .iter()
                .map(|&seed| Dataset {
                    seed,
                    x: x.clone(),
                    components,
                    target_nnz: cfg.target_nnz,
                    truth: None,
                })
                .collect()
        }
    };
    if cfg.center {
        for d in &mut out {
            d.x = column_centered(&d.x);
        }
    }
    Ok(out)
}

fn fit(method: Method, d: &Dataset, cfg: &ExperimentConfig) -> sparsepca::Result<(FactorModel, SparsityKnob)> {
    if let Some(&knob) = cfg.metaparameters.get(&method) {
        return Ok((fit_method(method, &d.x, d.components, knob)?, knob));
    }
    match d.target_nnz {
        Some(target) => {
            let c = calibrate_sparsity(method, &d.x, target, d.components)?;
            Ok((c.model, c.knob))
        }
        None => Ok((
            fit_method(method, &d.x, d.components, SparsityKnob::None)?,
            SparsityKnob::None,
        )),
    }
}

fn run_one(method: Method, d: &Dataset, cfg: &ExperimentConfig) -> Vec<RunRecord> {
    let start = Instant::now();
    let fitted = fit(method, d, cfg);
    let fit_time = start.elapsed();
    cfg.score_modes
        .iter()
        .map(|&mode| {
            let mut rec = RunRecord {
                method,
                deflation: method.deflation(),
                score_mode: mode,
                seed: d.seed,
                knob: None,
                target_nnz: d.target_nnz,
                nnz: None,
                stats: None,
                error: None,
                wall_time: fit_time,
            };
            let outcome = fitted.as_ref().map_err(Clone::clone).and_then(|(model, knob)| {
                rec.knob = Some(*knob);
                rec.nnz = Some(model.nnz());
                stats_report(&d.x, &model.in_mode(&d.x, mode)?)
            });
            match outcome {
                Ok(stats) => rec.stats = Some(stats),
                Err(e) => {
                    log::warn!("{method} seed {}: {e}", d.seed);
                    rec.error = Some(e.to_string());
                }
            }
            rec
        })
        .collect()
}

/// Runs every (dataset, method) pair in parallel and returns the records in
/// a fixed order. Method failures are recorded, never fatal.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let data = datasets(cfg)?;
    let jobs: Vec<(&Dataset, Method)> = data
        .iter()
        .flat_map(|d| cfg.methods.iter().map(move |&m| (d, m)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|(d, m)| run_one(*m, d, cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let truth = data.iter().filter_map(|d| d.truth).collect();
    Ok(ExperimentOutput { records, truth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering_zeroes_column_means() {
        let x = Matrix::from_row_slice(2, 2, &[1.0, 5.0, 3.0, 9.0]);
        let c = column_centered(&x);
        assert_eq!(c, Matrix::from_row_slice(2, 2, &[-1.0, -2.0, 1.0, 2.0]));
    }

    #[test]
    fn overrides_skip_calibration() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Nonorthogonal);
        cfg.methods = vec![Method::PmdPd];
        cfg.metaparameters.insert(Method::PmdPd, SparsityKnob::C2(1.0));
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        for r in &out.records {
            assert_eq!(r.knob, Some(SparsityKnob::C2(1.0)));
            assert_eq!(r.nnz, Some(3));
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Nonorthogonal);
        cfg.methods = vec![Method::Spca, Method::Pca];
        cfg.metaparameters.insert(Method::Spca, SparsityKnob::Lambda1(1e6));
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 4);
        assert_eq!(out.failures().count(), 2);
        assert!(out.records[2].succeeded());
    }
}
