//! Deflation operators shared by the sequential sparse methods.
//!
//! Projection deflation removes a loading direction from the row space of the
//! data. Applied with a sequence of non-orthogonal loadings it can put back
//! variance removed earlier. The Mackey variant instead deflates by the
//! Gram–Schmidt residual of each loading against the directions already
//! removed, so nothing is counted twice.

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

const UNIT_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;
/// Below this norm a Gram–Schmidt residual is treated as zero.
pub const MACKEY_DEGENERATE_TOL: f64 = 1e-10;

fn check_direction(x_cols: usize, p: &Vector) -> Result<()> {
    if p.len() != x_cols {
        return Err(Error::Shape(format!(
            "direction has length {}, expected {x_cols}",
            p.len()
        )));
    }
    if p.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidInput("deflation direction is zero".into()));
    }
    Ok(())
}

/// `X (I - p (p^T p)^{-1} p^T)`; for unit `p` this is `X (I - p p^T)`.
pub fn projection_deflate(x: &Matrix, p: &Vector) -> Result<Matrix> {
    check_direction(x.ncols(), p)?;
    let norm_sq = p.norm_squared();
    let xp = x * p;
    let scale = if (norm_sq - 1.0).abs() <= UNIT_TOL {
        1.0
    } else {
        1.0 / norm_sq
    };
    Ok(x - (xp * p.transpose()) * scale)
}

/// `(I - p p^T) C (I - p p^T)` for symmetric `C`.
pub fn covariance_projection_deflate(c: &Matrix, p: &Vector) -> Result<Matrix> {
    if !c.is_square() {
        return Err(Error::Shape(format!("covariance is {:?}", c.shape())));
    }
    check_direction(c.ncols(), p)?;
    let scale = c.abs().max().max(1.0);
    if (c - c.transpose()).abs().max() > SYMMETRY_TOL * scale {
        return Err(Error::InvalidInput("covariance matrix is not symmetric".into()));
    }
    let u = p / p.norm();
    let cu = c * &u;
    let ucu = u.dot(&cu);
    // (I - uu^T) C (I - uu^T) = C - cu u^T - u cu^T + (u^T C u) u u^T
    Ok(c - &cu * u.transpose() - &u * cu.transpose() + (&u * u.transpose()) * ucu)
}

/// Accumulated state of the sequential Gram–Schmidt deflation.
#[derive(Debug, Clone)]
pub struct MackeyState {
    /// Projector onto the orthogonal complement of the collected `q` vectors.
    pub projector: Matrix,
    /// Collected unit `q` vectors, one per column.
    pub collected: Matrix,
}

impl MackeyState {
    pub fn new(n_vars: usize) -> Self {
        Self {
            projector: Matrix::identity(n_vars, n_vars),
            collected: Matrix::zeros(n_vars, 0),
        }
    }
}

/// Outcome of one Mackey deflation step.
#[derive(Debug, Clone)]
pub struct MackeyStep {
    pub x: Matrix,
    pub state: MackeyState,
    /// Unit `q`, or the zero vector when `p` lies in the span of earlier `q`s.
    pub q: Vector,
    /// Set when the step was a no-op because `B p` vanished.
    pub degenerate: bool,
}

/// `q = B p / ||B p||`, `X <- X (I - q q^T)`, `B <- B (I - q q^T)`.
pub fn mackey_deflate(x: &Matrix, state: &MackeyState, p: &Vector) -> Result<MackeyStep> {
    check_direction(x.ncols(), p)?;
    if state.projector.nrows() != p.len() {
        return Err(Error::Shape("Mackey state dimension differs from data".into()));
    }
    let q_raw = &state.projector * p;
    let norm = q_raw.norm();
    if norm < MACKEY_DEGENERATE_TOL {
        return Ok(MackeyStep {
            x: x.clone(),
            state: state.clone(),
            q: Vector::zeros(p.len()),
            degenerate: true,
        });
    }
    let q = q_raw / norm;
    let xq = x * &q;
    let x_new = x - xq * q.transpose();
    let bq = &state.projector * &q;
    let projector = &state.projector - bq * q.transpose();
    let k = state.collected.ncols();
    let mut collected = state.collected.clone().insert_column(k, 0.0);
    collected.set_column(k, &q);
    Ok(MackeyStep {
        x: x_new,
        state: MackeyState { projector, collected },
        q,
        degenerate: false,
    })
}
