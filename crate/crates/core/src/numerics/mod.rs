//! Dense linear-algebra primitives with fixed sign and ordering conventions.
//!
//! Everything downstream (model fitting, diagnostics, golden tables) relies on
//! these routines being deterministic: the SVD is a one-sided Jacobi sweep with
//! a canonical sign per singular pair, the QR keeps a nonnegative diagonal, and
//! the Gaussian stream is a seeded ChaCha generator fed through Box–Muller.

mod qr;
mod rng;
mod svd;
pub(crate) mod threshold;

pub use qr::{qr, QrResult};
pub use rng::GaussianStream;
pub use svd::{pinv, svd, SvdResult, PINV_RELATIVE_CUTOFF};
pub use threshold::{l1_budget_threshold, soft_threshold};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense real matrix; rows are observations, columns are variables.
pub type Matrix = DMatrix<f64>;
/// Dense real column vector.
pub type Vector = DVector<f64>;

pub(crate) fn ensure_finite(x: &Matrix, what: &str) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} has non-finite entries")));
    }
    Ok(())
}

/// Squared Frobenius norm, i.e. `trace(X^T X)`.
pub fn sum_of_squares(x: &Matrix) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `I - v v^T` for a unit vector `v`.
pub fn complement_projector(v: &Vector) -> Matrix {
    let n = v.len();
    Matrix::identity(n, n) - v * v.transpose()
}

/// Number of entries with magnitude strictly above `tol`.
pub fn count_nonzero(x: &Matrix, tol: f64) -> usize {
    x.iter().filter(|v| v.abs() > tol).count()
}

/// Returns `x` with each column scaled to unit L2 norm. Zero columns are left
/// untouched and reported by index.
pub fn normalize_columns(x: &Matrix) -> (Matrix, Vec<usize>) {
    let mut out = x.clone();
    let mut zero = Vec::new();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let n = col.norm();
        if n > 0.0 {
            col /= n;
        } else {
            zero.push(j);
        }
    }
    (out, zero)
}

/// Largest principal angle (radians) between the column spaces of `a` and `b`.
/// Both inputs must have orthonormal columns.
pub fn max_principal_angle(a: &Matrix, b: &Matrix) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "principal angles need equal row counts, got {} and {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let m = a.transpose() * b;
    let s = svd(&m)?;
    let smallest = s.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(smallest.clamp(-1.0, 1.0).acos())
}
