//! Group-wise PCA.
//!
//! Variables are grouped by thresholding a correlation map; each group yields
//! a candidate loading (the leading right singular vector of the data
//! restricted to that group) and the candidate capturing the most variance is
//! kept. The working matrix is then deflated and the groups are rebuilt from
//! it before the next component.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deflation::{mackey_deflate, projection_deflate, MackeyState};
use crate::error::{shape_err, Error, Result};
use crate::model::{Deflation, FactorModel, Method, ScoreMode};
use crate::numerics::{ensure_finite, svd, Matrix, Vector};

/// How column similarity is measured when building the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// Cosine of the raw columns (no centering), consistent with fitting
    /// uncentered data.
    #[default]
    Uncentered,
    /// Pearson correlation of mean-centered columns.
    Pearson,
}

/// Symmetric variable-by-variable similarity map with entries in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct CorrelationMap {
    pub values: Matrix,
    /// Columns with zero norm (after centering, for Pearson). Their
    /// off-diagonal entries are zero.
    pub degenerate_columns: Vec<usize>,
}

pub fn correlation_map(x: &Matrix, kind: MapKind) -> Result<CorrelationMap> {
    ensure_finite(x, "correlation map input")?;
    let mut z = x.clone();
    if kind == MapKind::Pearson {
        for mut col in z.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
        }
    }
    let m = z.ncols();
    let scale = x.abs().max();
    let mut degenerate = Vec::new();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        let n = col.norm();
        // exact zeros and rounding leftovers of deflated columns
        if n <= 1e-13 * scale || n == 0.0 {
            col.fill(0.0);
            degenerate.push(j);
        } else {
            col /= n;
        }
    }
    let mut values = z.transpose() * &z;
    for i in 0..m {
        for j in 0..i {
            let v = (0.5 * (values[(i, j)] + values[(j, i)])).clamp(-1.0, 1.0);
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
        values[(i, i)] = 1.0;
    }
    if !degenerate.is_empty() {
        log::debug!("correlation map: {} zero-norm columns", degenerate.len());
    }
    Ok(CorrelationMap {
        values,
        degenerate_columns: degenerate,
    })
}

/// Ordered set of column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableGroup {
    pub indices: Vec<usize>,
    /// Variable whose row of the map produced this group.
    pub seed: usize,
}

/// One group per seed variable `i`: `{ j : |m_ij| >= gamma }`. Repeated
/// groups are dropped, keeping the first seed that produced them.
pub fn find_groups(map: &CorrelationMap, gamma: f64) -> Result<Vec<VariableGroup>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidInput(format!(
            "group threshold must lie in (0, 1), got {gamma}"
        )));
    }
    let m = map.values.nrows();
    let mut groups: Vec<VariableGroup> = Vec::new();
    for i in 0..m {
        let indices: Vec<usize> = (0..m).filter(|&j| map.values[(i, j)].abs() >= gamma).collect();
        if !groups.iter().any(|g| g.indices == indices) {
            groups.push(VariableGroup { indices, seed: i });
        }
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpcaConfig {
    pub gamma: f64,
    pub deflation: Deflation,
    pub map: MapKind,
}

impl GpcaConfig {
    pub const DEFAULT_GAMMA: f64 = 0.7;

    pub fn new(gamma: f64, deflation: Deflation) -> Self {
        Self {
            gamma,
            deflation,
            map: MapKind::default(),
        }
    }

    pub fn method(&self) -> Result<Method> {
        match self.deflation {
            Deflation::Projection => Ok(Method::GpcaPd),
            Deflation::Mackey => Ok(Method::GpcaM),
            Deflation::Orthogonalized => Ok(Method::GpcaO),
            Deflation::None => Err(Error::InvalidInput(
                "GPCA needs projection, mackey or orthogonalized deflation".into(),
            )),
        }
    }
}

/// Squared leading singular value of the column-submatrix `x[:, idx]`.
pub fn group_variance(x: &Matrix, idx: &[usize]) -> f64 {
    let sub = x.select_columns(idx);
    let gram = if sub.ncols() <= sub.nrows() {
        sub.transpose() * &sub
    } else {
        &sub * sub.transpose()
    };
    SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Candidate loading for a group: leading right singular vector of the
/// submatrix, embedded into the full variable space.
pub fn group_candidate(x: &Matrix, group: &VariableGroup) -> Result<Vector> {
    let sub = x.select_columns(&group.indices);
    let v = svd(&sub)?.v.column(0).into_owned();
    let mut p = Vector::zeros(x.ncols());
    for (k, &j) in group.indices.iter().enumerate() {
        p[j] = v[k];
    }
    Ok(p)
}

/// One round of candidate evaluation: index of the winning group and the
/// variance of every group, in group order.
pub fn select_group(x: &Matrix, groups: &[VariableGroup]) -> (Option<usize>, Vec<f64>) {
    let variances: Vec<f64> = groups.par_iter().map(|g| group_variance(x, &g.indices)).collect();
    let mut best: Option<usize> = None;
    for (i, &v) in variances.iter().enumerate() {
        match best {
            // a later group must beat the incumbent by more than rounding
            Some(b) if v <= variances[b] * (1.0 + 1e-12) => {}
            _ if v > 0.0 => best = Some(i),
            _ => {}
        }
    }
    (best, variances)
}

/// Fraction of the input energy below which no group is considered to
/// capture variance.
const EXHAUSTED_REL: f64 = 1e-24;

pub fn fit_gpca(x: &Matrix, a: usize, cfg: &GpcaConfig) -> Result<FactorModel> {
    let method = cfg.method()?;
    ensure_finite(x, "GPCA input")?;
    let max = x.nrows().min(x.ncols());
    if a == 0 || a > max {
        return Err(shape_err(format!("component count {a} outside 1..={max}")));
    }
    let (n, m) = x.shape();
    let energy = x.norm_squared();
    let mut current = x.clone();
    let mut loadings = Matrix::zeros(m, a);
    let mut scores = Matrix::zeros(n, a);
    let mut mackey = MackeyState::new(m);

    for comp in 0..a {
        let map = correlation_map(&current, cfg.map)?;
        let groups = find_groups(&map, cfg.gamma)?;
        let (best, variances) = select_group(&current, &groups);
        let best = match best {
            Some(b) if variances[b] > EXHAUSTED_REL * energy => b,
            _ => return Err(Error::RankExhausted { component: comp }),
        };
        let p = group_candidate(&current, &groups[best])?;
        let t = &current * &p;
        scores.set_column(comp, &t);
        loadings.set_column(comp, &p);

        current = match cfg.deflation {
            Deflation::Projection => projection_deflate(&current, &p)?,
            Deflation::Mackey => {
                let step = mackey_deflate(&current, &mackey, &p)?;
                if step.degenerate {
                    log::warn!("GPCA-M component {comp}: loading already spanned, deflation skipped");
                }
                mackey = step.state;
                step.x
            }
            Deflation::Orthogonalized => {
                let u = t.normalize();
                let ut_x = u.transpose() * &current;
                &current - &u * ut_x
            }
            Deflation::None => unreachable!("rejected by cfg.method()"),
        };
    }

    let aux_loadings = (cfg.deflation == Deflation::Mackey).then_some(mackey.collected);
    Ok(FactorModel {
        scores,
        loadings,
        aux_loadings,
        method,
        deflation: cfg.deflation,
        score_mode: ScoreMode::Naive,
    })
}
