//! Elastic-net sparse PCA: the simultaneous alternating scheme and a
//! one-component-at-a-time variant with projection deflation.
//!
//! Both alternate between a sparse weight update (`P`) and an orthonormal
//! auxiliary update (`Q`). The weight update is the closed-form minimizer of
//!
//! ```text
//! J(P, Q) = -2 tr(Q^T X^T X P) + (1 + lambda2) ||P||_F^2 + sum_a lambda1_a ||p_a||_1
//! ```
//!
//! namely `p_a = S(X^T X q_a, lambda1_a / 2) / (1 + lambda2)`, and the auxiliary
//! update is the Procrustes solution `Q = U V^T` from `svd(X^T X P)`. Each
//! half-step minimizes `J` exactly, so `J` never increases.

use crate::deflation::projection_deflate;
use crate::error::{shape_err, Error, Result};
use crate::model::{Deflation, FactorModel, Method, ScoreMode};
use crate::numerics::threshold::shrink;
use crate::numerics::{qr, svd, Matrix, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct SpcaConfig {
    /// Ridge weight.
    pub lambda2: f64,
    /// Lasso weight per component.
    pub lambda1: Vec<f64>,
    pub max_iter: usize,
    /// Relative Frobenius change of `P` that ends the iteration.
    pub tol: f64,
    /// Recompute `Q` for the normalized `P` after the last iteration. When
    /// false the last in-loop `Q` is returned.
    pub refresh_aux: bool,
    /// Nonzeros to keep per component. When set, `lambda1` is ignored and
    /// each weight update uses the smallest lasso weight that leaves at most
    /// `k_a` nonzero entries in `p_a`, i.e. twice the `(k_a + 1)`-th largest
    /// magnitude of `X^T X q_a`.
    pub cardinality: Option<Vec<usize>>,
}

impl SpcaConfig {
    pub const DEFAULT_LAMBDA2: f64 = 1e-6;
    pub const DEFAULT_MAX_ITER: usize = 300;
    pub const DEFAULT_TOL: f64 = 1e-6;

    /// Same lasso weight for every component.
    pub fn shared(components: usize, lambda1: f64) -> Self {
        Self {
            lambda2: Self::DEFAULT_LAMBDA2,
            lambda1: vec![lambda1; components],
            max_iter: Self::DEFAULT_MAX_ITER,
            tol: Self::DEFAULT_TOL,
            refresh_aux: true,
            cardinality: None,
        }
    }

    /// `k` nonzeros per component for every component.
    pub fn cardinality(components: usize, k: usize) -> Self {
        Self {
            cardinality: Some(vec![k; components]),
            ..Self::shared(components, 0.0)
        }
    }

    /// Lasso weight of `component` for the update driven by `gq = X^T X q`.
    fn weight(&self, component: usize, gq: &Vector) -> f64 {
        match &self.cardinality {
            Some(k) => 2.0 * kth_magnitude(gq, k[component]),
            None => self.lambda1[component],
        }
    }

    fn validate(&self, components: usize) -> Result<()> {
        if self.lambda1.len() != components {
            return Err(Error::InvalidInput(format!(
                "{} lasso weights for {components} components",
                self.lambda1.len()
            )));
        }
        if !(self.lambda2 >= 0.0) || self.lambda1.iter().any(|l| !(*l >= 0.0)) {
            return Err(Error::InvalidInput("penalty weights must be nonnegative".into()));
        }
        if let Some(k) = &self.cardinality {
            if k.len() != components || k.contains(&0) {
                return Err(Error::InvalidInput(format!(
                    "cardinality needs {components} entries, each at least 1"
                )));
            }
        }
        if !(self.tol >= 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidInput("tol must be >= 0 and max_iter >= 1".into()));
        }
        Ok(())
    }
}

fn check_components(x: &Matrix, a: usize) -> Result<()> {
    let max = x.nrows().min(x.ncols());
    if a == 0 || a > max {
        return Err(shape_err(format!("component count {a} outside 1..={max}")));
    }
    Ok(())
}

/// Smallest shared lasso weight that zeroes at least one component on the
/// first weight update from the SVD warm start. Used as the upper end of the
/// calibration bracket.
pub fn lambda1_ceiling(x: &Matrix, a: usize) -> Result<f64> {
    check_components(x, a)?;
    let s = svd(x)?;
    let gram = x.transpose() * x;
    let mut ceiling = f64::INFINITY;
    for j in 0..a {
        ceiling = ceiling.min(2.0 * (&gram * s.v.column(j)).amax());
    }
    Ok(ceiling)
}

/// The `(k + 1)`-th largest magnitude in `v`, or 0 when `k >= len`.
fn kth_magnitude(v: &Vector, k: usize) -> f64 {
    if k >= v.len() {
        return 0.0;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.select_nth_unstable_by(k, |a, b| b.total_cmp(a));
    mags[k]
}

fn weight_update(gq: &Vector, lambda1: f64, lambda2: f64) -> Vector {
    let half = 0.5 * lambda1;
    let scale = 1.0 / (1.0 + lambda2);
    gq.map(|v| shrink(v, half) * scale)
}

fn procrustes(gp: &Matrix) -> Result<Matrix> {
    let s = svd(gp)?;
    Ok(&s.u * s.v.transpose())
}

/// Value of the alternating objective `J(P, Q)`.
pub fn spca_objective(gram: &Matrix, p: &Matrix, q: &Matrix, cfg: &SpcaConfig) -> f64 {
    let cross = (q.transpose() * gram * p).trace();
    let ridge = (1.0 + cfg.lambda2) * p.norm_squared();
    let lasso: f64 = p.column_iter().zip(&cfg.lambda1).map(|(c, l)| l * c.lp_norm(1)).sum();
    -2.0 * cross + ridge + lasso
}

/// Per-iteration record of the simultaneous scheme.
#[derive(Debug, Clone, Default)]
pub struct SpcaTrace {
    /// `J` after every half-step (weight update, then auxiliary update),
    /// using the lasso weights of that iteration. Non-increasing for fixed
    /// weights; under a cardinality constraint the weights move and so may `J`.
    pub objective: Vec<f64>,
    /// `max |Q^T Q - I|` after every auxiliary update.
    pub aux_orthonormality: Vec<f64>,
    pub iterations: usize,
}

/// Simultaneous sparse PCA. Returns loadings normalized to unit length, the
/// auxiliary `Q`, and naive scores `X P`.
pub fn fit_spca_simultaneous(x: &Matrix, a: usize, cfg: &SpcaConfig) -> Result<FactorModel> {
    fit_spca_simultaneous_traced(x, a, cfg).map(|(m, _)| m)
}

pub fn fit_spca_simultaneous_traced(x: &Matrix, a: usize, cfg: &SpcaConfig) -> Result<(FactorModel, SpcaTrace)> {
    check_components(x, a)?;
    cfg.validate(a)?;
    let gram = x.transpose() * x;
    let m = x.ncols();
    let mut q = svd(x)?.v.columns(0, a).into_owned();
    let mut p = Matrix::zeros(m, a);
    let mut weights = cfg.clone();
    let mut trace = SpcaTrace::default();

    for iter in 0..cfg.max_iter {
        let gq = &gram * &q;
        let mut next = Matrix::zeros(m, a);
        for j in 0..a {
            let gq_j = gq.column(j).into_owned();
            weights.lambda1[j] = cfg.weight(j, &gq_j);
            let col = weight_update(&gq_j, weights.lambda1[j], cfg.lambda2);
            if col.iter().all(|&v| v == 0.0) {
                return Err(Error::DegenerateComponent { component: j });
            }
            next.set_column(j, &col);
        }
        let change = if iter == 0 {
            f64::INFINITY
        } else {
            (&next - &p).norm() / p.norm()
        };
        p = next;
        trace.objective.push(spca_objective(&gram, &p, &q, &weights));

        q = procrustes(&(&gram * &p))?;
        trace.objective.push(spca_objective(&gram, &p, &q, &weights));
        trace
            .aux_orthonormality
            .push((q.transpose() * &q - Matrix::identity(a, a)).abs().max());
        trace.iterations = iter + 1;
        if change < cfg.tol {
            break;
        }
    }

    for mut col in p.column_iter_mut() {
        let n = col.norm();
        col /= n;
    }
    if cfg.refresh_aux {
        q = procrustes(&(&gram * &p))?;
    }
    let scores = x * &p;
    Ok((
        FactorModel {
            scores,
            loadings: p,
            aux_loadings: Some(q),
            method: Method::Spca,
            deflation: Deflation::None,
            score_mode: ScoreMode::Naive,
        },
        trace,
    ))
}

/// Sequential sparse PCA: rank-one alternating scheme per component on the
/// current residual matrix, followed by projection deflation with the
/// normalized loading. Only the loadings come out of the loop, so the scores
/// are `X P` on the input, as for the simultaneous scheme.
pub fn fit_spca_sequential(x: &Matrix, a: usize, cfg: &SpcaConfig) -> Result<FactorModel> {
    check_components(x, a)?;
    cfg.validate(a)?;
    let m = x.ncols();
    let mut current = x.clone();
    let mut loadings = Matrix::zeros(m, a);
    let mut aux = Matrix::zeros(m, a);

    for comp in 0..a {
        let gram = current.transpose() * &current;
        let mut q = svd(&current)?.v.column(0).into_owned();
        let mut p = Vector::zeros(m);
        for iter in 0..cfg.max_iter {
            let gq = &gram * &q;
            let next = weight_update(&gq, cfg.weight(comp, &gq), cfg.lambda2);
            if next.iter().all(|&v| v == 0.0) {
                return Err(Error::DegenerateComponent { component: comp });
            }
            let change = if iter == 0 {
                f64::INFINITY
            } else {
                (&next - &p).norm() / p.norm()
            };
            p = next;
            let gp = &gram * &p;
            let norm = gp.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateComponent { component: comp });
            }
            q = gp / norm;
            if change < cfg.tol {
                break;
            }
        }
        let p = p.normalize();
        if cfg.refresh_aux {
            let gp = &gram * &p;
            let norm = gp.norm();
            if norm == 0.0 {
                return Err(Error::DegenerateComponent { component: comp });
            }
            q = gp / norm;
        }
        loadings.set_column(comp, &p);
        aux.set_column(comp, &q);
        current = projection_deflate(&current, &p)?;
    }

    Ok(FactorModel {
        scores: x * &loadings,
        loadings,
        aux_loadings: Some(aux),
        method: Method::SpcaSeq,
        deflation: Deflation::Projection,
        score_mode: ScoreMode::Naive,
    })
}

/// Captured variance as the sum of squared diagonal entries of `R` in `T = QR`.
pub fn qr_variance(t: &Matrix) -> Result<f64> {
    if t.nrows() < t.ncols() {
        return Err(shape_err(format!(
            "QR variance needs at least as many rows as components, got {}x{}",
            t.nrows(),
            t.ncols()
        )));
    }
    let f = qr(t)?;
    Ok(f.r.diagonal().iter().map(|d| d * d).sum())
}
