use super::{ensure_finite, Matrix, Vector};
use crate::error::Result;

/// Relative cutoff below which singular values are treated as zero by [`pinv`].
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-12;

const MAX_SWEEPS: usize = 80;
const ROTATION_EPS: f64 = 1e-15;

/// Thin singular value decomposition `X = U diag(S) V^T`.
///
/// `singular_values` is sorted descending. In every column of `v` the entry of
/// largest magnitude is positive (first index wins on exact ties) and the
/// matching column of `u` is flipped with it.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub singular_values: Vector,
    pub v: Matrix,
}

impl SvdResult {
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for (j, mut col) in us.column_iter_mut().enumerate() {
            col *= self.singular_values[j];
        }
        us * self.v.transpose()
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Works on the orientation with at least as many rows as columns, so the
/// rotation count scales with `min(N, M)^2`.
pub fn svd(x: &Matrix) -> Result<SvdResult> {
    ensure_finite(x, "svd input")?;
    if x.nrows() >= x.ncols() {
        let (u, s, v) = jacobi_tall(x.clone());
        Ok(canonicalize(u, s, v))
    } else {
        let (u, s, v) = jacobi_tall(x.transpose());
        Ok(canonicalize(v, s, u))
    }
}

/// Returns `(U, S, V)` for a tall matrix `a` (rows >= cols), unsorted.
fn jacobi_tall(mut a: Matrix) -> (Matrix, Vec<f64>, Matrix) {
    let m = a.nrows();
    let n = a.ncols();
    let mut v = Matrix::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = a.column(p);
                    let cq = a.column(q);
                    (cp.norm_squared(), cq.norm_squared(), cp.dot(&cq))
                };
                if gamma == 0.0 || gamma.abs() <= ROTATION_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut a, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let floor = f64::EPSILON * smax * (m.max(n) as f64);

    let mut u = Matrix::zeros(m, n);
    let mut missing = Vec::new();
    for j in 0..n {
        if sigma[j] > floor && sigma[j] > 0.0 {
            u.set_column(j, &(a.column(j) / sigma[j]));
        } else {
            missing.push(j);
        }
    }
    complete_basis(&mut u, &missing);
    (u, sigma, v)
}

fn rotate_columns(x: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = x.nrows();
    let data = x.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * rows);
    let cp = &mut lo[p * rows..(p + 1) * rows];
    let cq = &mut hi[..rows];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq;
        *xp = c * a - s * b;
        *xq = s * a + c * b;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every other
/// column, drawing candidates from the standard basis.
fn complete_basis(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0usize;
    for &j in missing {
        while candidate < m {
            let mut w = Vector::zeros(m);
            w[candidate] = 1.0;
            candidate += 1;
            // two Gram-Schmidt passes
            for _ in 0..2 {
                for &k in &filled {
                    let proj = u.column(k).dot(&w);
                    w -= u.column(k) * proj;
                }
            }
            let norm = w.norm();
            if norm > 1e-8 {
                u.set_column(j, &(w / norm));
                filled.push(j);
                break;
            }
        }
    }
}

fn canonicalize(u: Matrix, sigma: Vec<f64>, v: Matrix) -> SvdResult {
    let r = sigma.len();
    let mut order: Vec<usize> = (0..r).collect();
    // stable: equal values keep their original column order
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());

    let mut u_out = Matrix::zeros(u.nrows(), r);
    let mut v_out = Matrix::zeros(v.nrows(), r);
    let mut s_out = Vector::zeros(r);
    for (dst, &src) in order.iter().enumerate() {
        let vc = v.column(src);
        let mut lead = 0;
        for i in 1..vc.len() {
            if vc[i].abs() > vc[lead].abs() {
                lead = i;
            }
        }
        let sign = if vc[lead] < 0.0 { -1.0 } else { 1.0 };
        v_out.set_column(dst, &(vc * sign));
        u_out.set_column(dst, &(u.column(src) * sign));
        s_out[dst] = sigma[src];
    }
    SvdResult {
        u: u_out,
        singular_values: s_out,
        v: v_out,
    }
}

/// Moore–Penrose pseudoinverse via [`svd`], truncating singular values below
/// `PINV_RELATIVE_CUTOFF * max(S)`.
pub fn pinv(g: &Matrix) -> Result<Matrix> {
    let s = svd(g)?;
    let smax = s.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = PINV_RELATIVE_CUTOFF * smax;
    let mut v_scaled = s.v.clone();
    for (j, mut col) in v_scaled.column_iter_mut().enumerate() {
        let sj = s.singular_values[j];
        if sj > cutoff && sj > 0.0 {
            col /= sj;
        } else {
            col.fill(0.0);
        }
    }
    Ok(v_scaled * s.u.transpose())
}
