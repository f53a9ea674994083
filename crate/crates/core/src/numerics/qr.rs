use super::{ensure_finite, Matrix};
use crate::error::{Error, Result};

/// Thin QR factorization `T = Qf Rf` with a nonnegative diagonal on `Rf`.
#[derive(Debug, Clone)]
pub struct QrResult {
    pub q: Matrix,
    pub r: Matrix,
}

/// Householder QR (nalgebra), post-processed so `diag(Rf) >= 0`.
pub fn qr(t: &Matrix) -> Result<QrResult> {
    ensure_finite(t, "qr input")?;
    if t.nrows() < t.ncols() {
        return Err(Error::Shape(format!(
            "qr needs rows >= cols, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let decomposition = t.clone().qr();
    let mut q = decomposition.q();
    let mut r = decomposition.r();
    for i in 0..r.nrows() {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
        for j in 0..i {
            r[(i, j)] = 0.0;
        }
    }
    Ok(QrResult { q, r })
}
