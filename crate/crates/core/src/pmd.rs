//! Penalized matrix decomposition with an L1 budget on the right factor.
//!
//! The rank-one problem is `max u^T X p` subject to `||u||_2 <= 1`,
//! `||p||_2 <= 1`, `||p||_1 <= c2`, solved by alternating exact updates of `u`
//! and `p`. Multi-component models repeat the rank-one solve under one of
//! three deflation regimes.

use nalgebra::SymmetricEigen;

use crate::deflation::{mackey_deflate, MackeyState};
use crate::error::{shape_err, Error, Result};
use crate::model::{Deflation, FactorModel, Method, ScoreMode};
use crate::numerics::{l1_budget_threshold, qr, soft_threshold, svd, Matrix, Vector};

/// Left vector, right vector and pseudo-singular value of a rank-one fit.
#[derive(Debug, Clone)]
pub struct PmdRankOne {
    pub u: Vector,
    pub p: Vector,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmdConfig {
    /// L1 budget on `p`; clamped to `[1, sqrt(M)]` when used.
    pub c2: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub deflation: Deflation,
    /// Upper bound on the number of starting points tried by the rank-one
    /// solver; see [`pmd_rank_one`].
    pub max_starts: usize,
}

impl PmdConfig {
    pub fn new(c2: f64, deflation: Deflation) -> Self {
        Self {
            c2,
            max_iter: 1000,
            tol: 1e-10,
            deflation,
            max_starts: 32,
        }
    }

    pub fn method(&self) -> Result<Method> {
        match self.deflation {
            Deflation::Projection => Ok(Method::PmdPd),
            Deflation::Orthogonalized => Ok(Method::PmdO),
            Deflation::Mackey => Ok(Method::PmdM),
            Deflation::None => Err(Error::InvalidInput(
                "PMD needs projection, orthogonalized or mackey deflation".into(),
            )),
        }
    }

    pub(crate) fn budget(&self, n_vars: usize) -> f64 {
        self.c2.clamp(1.0, (n_vars as f64).sqrt())
    }
}

/// Per-iteration values of `u^T X p` after each half-step.
#[derive(Debug, Clone, Default)]
pub struct PmdTrace {
    pub objective: Vec<f64>,
    pub iterations: usize,
}

fn project_out(v: &Vector, basis: Option<&Matrix>) -> Vector {
    match basis {
        Some(b) if b.ncols() > 0 => v - b * (b.transpose() * v),
        _ => v.clone(),
    }
}

/// Unit `p` maximizing `a^T p` within the L1/L2 budget.
fn sparse_direction(a: &Vector, budget: f64) -> Option<Vector> {
    let delta = l1_budget_threshold(a, budget)?;
    let s = soft_threshold(a, delta).ok()?;
    let norm = s.norm();
    if norm > 0.0 {
        let p = s / norm;
        if p.lp_norm(1) <= budget + 1e-6 {
            return Some(p);
        }
    }
    // tied maxima: fall back to the first largest coordinate
    let i = a.iamax();
    if a[i] == 0.0 {
        return None;
    }
    let mut p = Vector::zeros(a.len());
    p[i] = a[i].signum();
    Some(p)
}

/// Rank-one PMD. With `u_constraint` (orthonormal columns) the left vector is
/// kept orthogonal to that basis.
///
/// The problem is biconvex, so alternating updates from a single start can
/// stall in a local optimum. Starting points are the left singular vectors of
/// the (projected) matrix followed by its normalized columns in decreasing
/// norm order, capped at `max_starts`. Every start gets a short pilot run and
/// the best few are iterated to convergence; the largest `d` wins, earliest
/// start on ties.
pub fn pmd_rank_one(x: &Matrix, cfg: &PmdConfig, u_constraint: Option<&Matrix>) -> Result<PmdRankOne> {
    pmd_rank_one_traced(x, cfg, u_constraint).map(|(r, _)| r)
}

const PILOT_ITERS: usize = 10;
const REFINED_STARTS: usize = 4;

/// Same as [`pmd_rank_one`], also returning the objective trace of the
/// winning start.
pub fn pmd_rank_one_traced(
    x: &Matrix,
    cfg: &PmdConfig,
    u_constraint: Option<&Matrix>,
) -> Result<(PmdRankOne, PmdTrace)> {
    if let Some(b) = u_constraint {
        if b.nrows() != x.nrows() {
            return Err(shape_err("u constraint basis has wrong row count"));
        }
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateComponent { component: 0 });
    }
    let budget = cfg.budget(x.ncols());
    let starts = starting_points(x, u_constraint, cfg.max_starts.max(1))?;

    let mut pilots: Vec<(usize, f64)> = Vec::with_capacity(starts.len());
    for (i, u0) in starts.iter().enumerate() {
        if let Ok((r, _)) = alternate(
            x,
            budget,
            u0.clone(),
            u_constraint,
            PILOT_ITERS.min(cfg.max_iter),
            cfg.tol,
        ) {
            pilots.push((i, r.d));
        }
    }
    pilots.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));

    let mut best: Option<(PmdRankOne, PmdTrace)> = None;
    let mut last_err = None;
    for &(i, _) in pilots.iter().take(REFINED_STARTS) {
        match alternate(x, budget, starts[i].clone(), u_constraint, cfg.max_iter, cfg.tol) {
            Ok((r, t)) => {
                if best.as_ref().is_none_or(|(b, _)| r.d > b.d * (1.0 + 1e-12)) {
                    best = Some((r, t));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::DegenerateComponent { component: 0 }))
}

/// Singular values below this fraction of the largest give no starting point.
/// Loose enough to drop the noise floor of the Gram route below.
const START_RANK_REL: f64 = 1e-6;

/// Left singular vectors with their singular values, descending. Wide
/// matrices go through the eigenvectors of the small `X X^T`; the start
/// vectors only seed the alternation, so the squared conditioning is harmless.
fn left_singular_pairs(x: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    if x.nrows() > x.ncols() {
        let s = svd(x)?;
        return Ok((s.u, s.singular_values.iter().copied().collect()));
    }
    let eig = SymmetricEigen::new(x * x.transpose());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let u = Matrix::from_columns(&order.iter().map(|&k| eig.eigenvectors.column(k)).collect::<Vec<_>>());
    let sigma = order.iter().map(|&k| eig.eigenvalues[k].max(0.0).sqrt()).collect();
    Ok((u, sigma))
}

fn starting_points(x: &Matrix, u_constraint: Option<&Matrix>, cap: usize) -> Result<Vec<Vector>> {
    let start = match u_constraint {
        Some(b) if b.ncols() > 0 => x - b * (b.transpose() * x),
        _ => x.clone(),
    };
    let (left, sigma) = left_singular_pairs(&start)?;
    let smax = sigma[0];
    let mut out: Vec<Vector> = Vec::with_capacity(cap);
    for (k, &sv) in sigma.iter().enumerate() {
        if out.len() == cap || sv <= START_RANK_REL * smax {
            break;
        }
        out.push(left.column(k).into_owned());
    }
    let mut cols: Vec<(usize, f64)> = start.column_iter().map(|c| c.norm()).enumerate().collect();
    cols.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for (j, norm) in cols {
        if out.len() == cap || norm <= 1e-12 * smax {
            break;
        }
        out.push(start.column(j) / norm);
    }
    Ok(out)
}

fn alternate(
    x: &Matrix,
    budget: f64,
    mut u: Vector,
    u_constraint: Option<&Matrix>,
    max_iter: usize,
    tol: f64,
) -> Result<(PmdRankOne, PmdTrace)> {
    let degenerate = || Error::DegenerateComponent { component: 0 };
    let mut p = Vector::zeros(x.ncols());
    let mut trace = PmdTrace::default();

    for iter in 0..max_iter {
        let a = x.tr_mul(&u);
        let p_next = sparse_direction(&a, budget).ok_or_else(degenerate)?;
        trace.objective.push(a.dot(&p_next));

        let xp_raw = x * &p_next;
        let xp = project_out(&xp_raw, u_constraint);
        let norm = xp.norm();
        if norm == 0.0 {
            return Err(degenerate());
        }
        let u_next = xp / norm;
        trace.objective.push(u_next.dot(&xp_raw));

        let du = (&u_next - &u).norm();
        let dp = (&p_next - &p).norm();
        u = u_next;
        p = p_next;
        trace.iterations = iter + 1;
        if du < tol && dp < tol {
            break;
        }
    }
    let d = u.dot(&(x * &p)).max(0.0);
    Ok((PmdRankOne { u, p, d }, trace))
}

/// Working matrices smaller than this fraction of the input norm are treated
/// as exhausted.
const EXHAUSTED_REL: f64 = 1e-12;

fn with_component(err: Error, component: usize) -> Error {
    match err {
        Error::DegenerateComponent { .. } => Error::DegenerateComponent { component },
        other => other,
    }
}

/// Sequential PMD with the deflation named in `cfg`. Scores are `d_a u_a`,
/// i.e. the projection of the working matrix onto each loading.
pub fn fit_pmd(x: &Matrix, a: usize, cfg: &PmdConfig) -> Result<FactorModel> {
    let method = cfg.method()?;
    let max = x.nrows().min(x.ncols());
    if a == 0 || a > max {
        return Err(shape_err(format!("component count {a} outside 1..={max}")));
    }
    let (n, m) = x.shape();
    let mut loadings = Matrix::zeros(m, a);
    let mut scores = Matrix::zeros(n, a);
    let mut current = x.clone();
    let mut u_basis = Matrix::zeros(n, 0);
    let mut mackey = MackeyState::new(m);

    let scale = x.norm();
    for comp in 0..a {
        let remaining = match cfg.deflation {
            Deflation::Orthogonalized => (x - &u_basis * (u_basis.transpose() * x)).norm(),
            _ => current.norm(),
        };
        if remaining <= EXHAUSTED_REL * scale {
            return Err(Error::DegenerateComponent { component: comp });
        }
        let r1 = match cfg.deflation {
            Deflation::Orthogonalized => pmd_rank_one(x, cfg, Some(&u_basis)),
            _ => pmd_rank_one(&current, cfg, None),
        }
        .map_err(|e| with_component(e, comp))?;

        scores.set_column(comp, &(&r1.u * r1.d));
        loadings.set_column(comp, &r1.p);

        match cfg.deflation {
            Deflation::Projection => {
                current -= (&r1.u * r1.d) * r1.p.transpose();
            }
            Deflation::Orthogonalized => {
                let k = u_basis.ncols();
                let mut raw = u_basis.clone().insert_column(k, 0.0);
                raw.set_column(k, &r1.u);
                u_basis = qr(&raw)?.q;
            }
            Deflation::Mackey => {
                let step = mackey_deflate(&current, &mackey, &r1.p)?;
                if step.degenerate {
                    log::warn!("PMD-M component {comp}: loading already spanned, deflation skipped");
                }
                current = step.x;
                mackey = step.state;
            }
            Deflation::None => unreachable!("rejected by cfg.method()"),
        }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{macs, stats_report};
    use crate::numerics::GaussianStream;
    use crate::simgen::gen_nonorthogonal_spectra;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut g = GaussianStream::new(seed);
        Matrix::from_fn(rows, cols, |_, _| g.next_normal())
    }

    #[test]
    fn slack_budget_equals_leading_singular_triple() {
        for seed in 0..10 {
            let x = random(8, 6, seed);
            let cfg = PmdConfig::new(6f64.sqrt(), Deflation::Projection);
            let r = pmd_rank_one(&x, &cfg, None).unwrap();
            let s = svd(&x).unwrap();
            assert!((r.d - s.singular_values[0]).abs() < 1e-8);
            let v = s.v.column(0);
            assert!((&r.p - v).norm().min((&r.p + v).norm()) < 1e-8);
            let u = s.u.column(0);
            assert!((&r.u - u).norm().min((&r.u + u).norm()) < 1e-8);
        }
    }

    #[test]
    fn exact_rank_one_sparse_signal() {
        let mut g = GaussianStream::new(3);
        let t = Vector::from_fn(6, |_, _| g.next_normal());
        let mut s = Vector::zeros(20);
        for i in 0..10 {
            s[i] = 1.0 + i as f64 * 0.1;
        }
        let x = &t * s.transpose();
        let r = pmd_rank_one(&x, &PmdConfig::new(4.0, Deflation::Projection), None).unwrap();
        let sn = s.normalize();
        assert!((&r.p - &sn).norm().min((&r.p + &sn).norm()) < 1e-8);
        assert!((r.d - t.norm() * s.norm()).abs() < 1e-8);
    }

    #[test]
    fn iterates_feasible_and_objective_monotone() {
        let x = random(10, 20, 4);
        let cfg = PmdConfig::new(2.0, Deflation::Projection);
        let (r, trace) = pmd_rank_one_traced(&x, &cfg, None).unwrap();
        assert!(r.u.norm() <= 1.0 + 1e-9);
        assert!(r.p.norm() <= 1.0 + 1e-9);
        assert!(r.p.lp_norm(1) <= 2.0 + 1e-6);
        assert!(r.d >= 0.0);
        for w in trace.objective.windows(2) {
            assert!(w[1] >= w[0] - 1e-10, "{} -> {}", w[0], w[1]);
        }
    }

    /// Random feasible starts, each refined by alternating maximization.
    fn multistart_oracle(x: &Matrix, c2: f64, starts: usize, seed: u64) -> f64 {
        let mut g = GaussianStream::new(seed);
        let mut best = 0.0f64;
        for _ in 0..starts {
            let mut u = Vector::from_fn(x.nrows(), |_, _| g.next_normal()).normalize();
            let mut val = 0.0;
            for _ in 0..500 {
                let a = x.transpose() * &u;
                let (mut lo, mut hi) = (0.0f64, a.amax());
                let ratio = |d: f64| {
                    let s = a.map(|v| (v.abs() - d).max(0.0) * v.signum());
                    s.lp_norm(1) / s.norm()
                };
                if ratio(0.0) > c2 {
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        if ratio(mid) > c2 {
                            lo = mid
                        } else {
                            hi = mid
                        }
                    }
                } else {
                    hi = 0.0;
                }
                let p = a.map(|v| (v.abs() - hi).max(0.0) * v.signum()).normalize();
                let xp = x * &p;
                val = xp.norm();
                u = xp / val;
            }
            best = best.max(val);
        }
        best
    }

    #[test]
    fn solver_not_beaten_by_multistart() {
        let x = random(10, 20, 5);
        let r = pmd_rank_one(&x, &PmdConfig::new(2.0, Deflation::Projection), None).unwrap();
        let oracle = multistart_oracle(&x, 2.0, 50, 99);
        assert!(r.d >= oracle - 1e-6, "solver {} < oracle {}", r.d, oracle);
    }

    #[test]
    fn orthogonalized_scores_are_orthogonal() {
        let d = gen_nonorthogonal_spectra();
        let model = fit_pmd(&d.x, 3, &PmdConfig::new(2.5, Deflation::Orthogonalized)).unwrap();
        let g = model.scores.transpose() * &model.scores;
        for i in 0..3 {
            for j in 0..i {
                assert!(g[(i, j)].abs() < 1e-8);
            }
        }
        assert!(macs(&model.scores).unwrap() < 1e-9);
        let r = stats_report(&d.x, &model).unwrap();
        assert!((r.tot_qr - 1.0).abs() < 1e-6);
        assert!((r.tot_t - 1.0).abs() < 1e-6);
        assert!((r.tot_pt - 1.0).abs() < 1e-6);
    }

    #[test]
    fn projection_deflation_annihilates_exact_component() {
        let x = random(4, 1, 6) * random(1, 7, 7) + random(4, 1, 8) * random(1, 7, 9);
        let cfg = PmdConfig::new(7f64.sqrt(), Deflation::Projection);
        let r = pmd_rank_one(&x, &cfg, None).unwrap();
        let deflated = &x - (&r.u * r.d) * r.p.transpose();
        assert!((deflated * &r.p).norm() <= 1e-10);
    }

    #[test]
    fn all_deflations_give_unit_loadings_and_corrected_closure() {
        let d = gen_nonorthogonal_spectra();
        for defl in [Deflation::Projection, Deflation::Orthogonalized, Deflation::Mackey] {
            let model = fit_pmd(&d.x, 3, &PmdConfig::new(2.5, defl)).unwrap();
            assert_eq!(model.deflation, defl);
            for c in model.loadings.column_iter() {
                assert!((c.norm() - 1.0).abs() < 1e-10);
                assert!(c.lp_norm(1) <= 2.5 + 1e-6);
            }
            let r = stats_report(&d.x, &model.with_corrected_scores(&d.x).unwrap()).unwrap();
            assert!((r.tot_pt - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_data_is_degenerate() {
        let err = fit_pmd(&Matrix::zeros(3, 4), 1, &PmdConfig::new(1.5, Deflation::Projection)).unwrap_err();
        assert_eq!(err, Error::DegenerateComponent { component: 0 });
        assert!(fit_pmd(&Matrix::identity(3, 3), 1, &PmdConfig::new(1.5, Deflation::None)).is_err());
    }

    #[test]
    fn rank_exhaustion_reports_component_index() {
        let x = random(5, 1, 10) * random(1, 6, 11);
        let err = fit_pmd(&x, 2, &PmdConfig::new(6f64.sqrt(), Deflation::Projection)).unwrap_err();
        assert_eq!(err, Error::DegenerateComponent { component: 1 });
    }
}
