//! Scores, residuals and variance accounting for (possibly) non-orthogonal
//! loadings.
//!
//! With orthonormal loadings the usual `T = X P` scores are the least-squares
//! scores and `trace(T^T T)` is the captured variance. Neither holds once the
//! loadings are correlated: the least-squares scores become
//! `X P (P^T P)^+`, and the only accounting that always closes is
//! `trace(P T^T T P^T) + trace(E^T E) = trace(X^T X)`, which requires
//! `E P = 0` or `T^T E = 0`. The statistics here measure how far a model is
//! from that identity under the three common ways of computing captured
//! variance.

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::model::{FactorModel, ScoreMode};
use crate::numerics::{normalize_columns, pinv, sum_of_squares, Matrix};
use crate::spca::qr_variance;

fn check_xp(x: &Matrix, p: &Matrix) -> Result<()> {
    if x.ncols() != p.nrows() {
        return Err(shape_err(format!(
            "data has {} columns but loadings have {} rows",
            x.ncols(),
            p.nrows()
        )));
    }
    Ok(())
}

fn check_xtp(x: &Matrix, t: &Matrix, p: &Matrix) -> Result<()> {
    check_xp(x, p)?;
    if t.nrows() != x.nrows() || t.ncols() != p.ncols() {
        return Err(shape_err(format!(
            "scores are {}x{}, expected {}x{}",
            t.nrows(),
            t.ncols(),
            x.nrows(),
            p.ncols()
        )));
    }
    Ok(())
}

/// `T = X P`.
pub fn naive_scores(x: &Matrix, p: &Matrix) -> Result<Matrix> {
    check_xp(x, p)?;
    Ok(x * p)
}

/// Least-squares scores `T = X P (P^T P)^+`.
pub fn corrected_scores(x: &Matrix, p: &Matrix) -> Result<Matrix> {
    check_xp(x, p)?;
    let gram = p.transpose() * p;
    Ok(x * p * pinv(&gram)?)
}

/// `E = X - T P^T`.
pub fn residuals(x: &Matrix, t: &Matrix, p: &Matrix) -> Result<Matrix> {
    check_xtp(x, t, p)?;
    Ok(x - t * p.transpose())
}

fn mean_abs_lower(gram: &Matrix) -> f64 {
    let a = gram.ncols();
    let mut acc = 0.0;
    let mut count = 0usize;
    for i in 0..a {
        for j in 0..i {
            acc += gram[(i, j)].abs();
            count += 1;
        }
    }
    (acc / count as f64).min(1.0)
}

fn unit_columns(m: &Matrix) -> Result<Matrix> {
    if m.ncols() < 2 {
        return Err(shape_err(format!(
            "mean pairwise correlation needs at least 2 columns, got {}",
            m.ncols()
        )));
    }
    let (n, zero) = normalize_columns(m);
    match zero.first() {
        Some(&component) => Err(Error::DegenerateComponent { component }),
        None => Ok(n),
    }
}

/// Mean absolute correlation of the scores: mean of `|cos(t_i, t_j)|` over
/// all column pairs, without centering.
pub fn macs(t: &Matrix) -> Result<f64> {
    let n = unit_columns(t)?;
    Ok(mean_abs_lower(&(n.transpose() * &n)))
}

/// Mean absolute correlation of the loadings: mean absolute off-diagonal
/// entry of `P^T P` after normalizing each column.
pub fn macl(p: &Matrix) -> Result<f64> {
    let n = unit_columns(p)?;
    Ok(mean_abs_lower(&(n.transpose() * &n)))
}

fn total(x: &Matrix) -> Result<f64> {
    let ss = sum_of_squares(x);
    if ss == 0.0 {
        return Err(Error::InvalidInput("data matrix is identically zero".into()));
    }
    Ok(ss)
}

/// `trace(E^T E) / trace(X^T X)` with `E = X - T P^T`.
pub fn rss(x: &Matrix, t: &Matrix, p: &Matrix) -> Result<f64> {
    let e = residuals(x, t, p)?;
    Ok(sum_of_squares(&e) / total(x)?)
}

fn check_residual(x: &Matrix, e: &Matrix) -> Result<()> {
    if x.shape() != e.shape() {
        return Err(shape_err(format!(
            "residuals are {:?}, data is {:?}",
            e.shape(),
            x.shape()
        )));
    }
    Ok(())
}

/// `(QSS(T) + trace(E^T E)) / trace(X^T X)` where QSS is the sum of squared
/// diagonal entries of `R` in `T = QR`.
pub fn tot_qr(t: &Matrix, e: &Matrix, x: &Matrix) -> Result<f64> {
    check_residual(x, e)?;
    if t.nrows() != x.nrows() {
        return Err(shape_err("scores and data row counts differ"));
    }
    Ok((qr_variance(t)? + sum_of_squares(e)) / total(x)?)
}

/// `(trace(T^T T) + trace(E^T E)) / trace(X^T X)`.
pub fn tot_t(t: &Matrix, e: &Matrix, x: &Matrix) -> Result<f64> {
    check_residual(x, e)?;
    if t.nrows() != x.nrows() {
        return Err(shape_err("scores and data row counts differ"));
    }
    Ok((sum_of_squares(t) + sum_of_squares(e)) / total(x)?)
}

/// `(trace(P T^T T P^T) + trace(E^T E)) / trace(X^T X)`.
pub fn tot_pt(t: &Matrix, p: &Matrix, e: &Matrix, x: &Matrix) -> Result<f64> {
    check_residual(x, e)?;
    check_xtp(x, t, p)?;
    let reconstructed = t * p.transpose();
    Ok((sum_of_squares(&reconstructed) + sum_of_squares(e)) / total(x)?)
}

/// Correlation and variance statistics for one model in one score mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub macs: f64,
    pub macl: f64,
    pub rss: f64,
    pub tot_qr: f64,
    pub tot_t: f64,
    pub tot_pt: f64,
    pub score_mode: ScoreMode,
}

/// Statistics of `model` against its training data `x`, using the scores the
/// model currently carries.
pub fn stats_report(x: &Matrix, model: &FactorModel) -> Result<StatsReport> {
    let t = &model.scores;
    let p = &model.loadings;
    let e = residuals(x, t, p)?;
    let ss = total(x)?;
    Ok(StatsReport {
        macs: macs(t)?,
        macl: macl(p)?,
        rss: sum_of_squares(&e) / ss,
        tot_qr: tot_qr(t, &e, x)?,
        tot_t: tot_t(t, &e, x)?,
        tot_pt: tot_pt(t, p, &e, x)?,
        score_mode: model.score_mode,
    })
}

/// Diagnostics of the split `||X||^2 = ||T P^T||^2 + ||E||^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitCheck {
    /// `| ||X||^2 - ||T P^T||^2 - ||E||^2 |`.
    pub defect: f64,
    /// `trace(P T^T E)`; the defect equals twice its magnitude.
    pub cross_trace: f64,
    /// `||E P||_F`.
    pub ep_norm: f64,
    /// `||T^T E||_F`.
    pub te_norm: f64,
}

impl SplitCheck {
    /// True when either orthogonality branch holds within `tol`.
    pub fn has_orthogonal_branch(&self, tol: f64) -> bool {
        self.ep_norm <= tol || self.te_norm <= tol
    }
}

pub fn variance_split_check(x: &Matrix, t: &Matrix, p: &Matrix, e: &Matrix) -> Result<SplitCheck> {
    check_xtp(x, t, p)?;
    check_residual(x, e)?;
    let fitted = t * p.transpose();
    let defect = (sum_of_squares(x) - sum_of_squares(&fitted) - sum_of_squares(e)).abs();
    let cross_trace = (p * t.transpose() * e).trace();
    Ok(SplitCheck {
        defect,
        cross_trace,
        ep_norm: (e * p).norm(),
        te_norm: (t.transpose() * e).norm(),
    })
}
