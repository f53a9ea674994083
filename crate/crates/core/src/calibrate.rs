//! Sparsity calibration: bisection on a method's scalar knob until the number
//! of nonzero loadings matches a target.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::methods::{fit_method, SparsityKnob};
use crate::model::{FactorModel, Method};
use crate::numerics::Matrix;

pub const CALIBRATION_STEPS: usize = 25;

/// Best knob found by [`calibrate_sparsity`].
#[derive(Debug, Clone)]
pub struct Calibration {
    pub knob: SparsityKnob,
    pub nnz: usize,
    pub target: usize,
    /// Set when the sampled (knob, nnz) pairs were not monotone, so the
    /// bisection bracket may have skipped a better value.
    pub non_monotone: bool,
    /// `(knob value, nnz)` for each successful fit, in evaluation order.
    /// Fits that failed (degenerate components) are recorded with `None`.
    pub samples: Vec<CalibrationSample>,
    pub model: FactorModel,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationSample {
    pub knob: f64,
    pub nnz: Option<usize>,
}

/// Direction in which the knob increases sparsity.
#[derive(Clone, Copy, PartialEq)]
enum Sense {
    /// Larger knob gives fewer nonzeros (lambda1, gamma).
    Sparser,
    /// Larger knob gives more nonzeros (c2, cardinality).
    Denser,
}

struct Bracket {
    lo: f64,
    hi: f64,
    sense: Sense,
    integer: bool,
}

fn bracket(method: Method, x: &Matrix) -> Bracket {
    let (lo, hi, sense, integer) = match method {
        Method::Pca => (0.0, 0.0, Sense::Sparser, false),
        Method::Spca | Method::SpcaSeq => (1.0, x.ncols() as f64, Sense::Denser, true),
        Method::PmdPd | Method::PmdO | Method::PmdM => (1.0, (x.ncols() as f64).sqrt(), Sense::Denser, false),
        Method::GpcaPd | Method::GpcaM | Method::GpcaO => (0.0, 1.0, Sense::Sparser, false),
    };
    Bracket { lo, hi, sense, integer }
}

/// Bisects the method's knob for at most 25 steps, keeping the fit whose
/// nonzero count is closest to `target_nnz`. Among fits that hit the target
/// exactly the least sparse knob wins; other ties go to the earliest. A fit
/// that fails with a degenerate component counts as "too sparse".
///
/// The SPCA variants are calibrated on the per-component cardinality, by
/// integer bisection over `1..=M`; PMD on `c2` over `[1, sqrt(M)]`; GPCA on
/// `gamma` over `(0, 1)`.
pub fn calibrate_sparsity(method: Method, x: &Matrix, target_nnz: usize, a: usize) -> Result<Calibration> {
    if method == Method::Pca {
        let model = fit_method(method, x, a, SparsityKnob::None)?;
        let nnz = model.nnz();
        return Ok(Calibration {
            knob: SparsityKnob::None,
            nnz,
            target: target_nnz,
            non_monotone: false,
            samples: vec![],
            model,
        });
    }
    let Bracket {
        mut lo,
        mut hi,
        sense,
        integer,
    } = bracket(method, x);
    let mut best: Option<(usize, f64, FactorModel)> = None;
    let mut samples = Vec::with_capacity(CALIBRATION_STEPS);
    let mut last_err = None;

    for _ in 0..CALIBRATION_STEPS {
        if integer && lo > hi {
            break;
        }
        let mid = if integer {
            (0.5 * (lo + hi)).floor()
        } else {
            0.5 * (lo + hi)
        };
        let fit = fit_method(method, x, a, SparsityKnob::for_method(method, mid));
        let too_sparse = match fit {
            Ok(model) => {
                let nnz = model.nnz();
                samples.push(CalibrationSample {
                    knob: mid,
                    nnz: Some(nnz),
                });
                let gap = nnz.abs_diff(target_nnz);
                if best.as_ref().is_none_or(|(g, _, _)| gap < *g || gap == 0) {
                    best = Some((gap, mid, model));
                }
                // on an exact hit keep moving toward the denser end: the
                // least aggressive knob with the target count shrinks least
                nnz <= target_nnz
            }
            Err(e @ (Error::DegenerateComponent { .. } | Error::RankExhausted { .. })) => {
                samples.push(CalibrationSample { knob: mid, nnz: None });
                last_err = Some(e);
                true
            }
            Err(e) => return Err(e),
        };
        let step = if integer { 1.0 } else { 0.0 };
        match (too_sparse, sense) {
            (true, Sense::Sparser) | (false, Sense::Denser) => hi = mid - step,
            (false, Sense::Sparser) | (true, Sense::Denser) => lo = mid + step,
        }
    }

    let non_monotone = !is_monotone(&samples, sense);
    if non_monotone {
        log::warn!("{method}: nonzero count not monotone in the knob over the bisection samples");
    }
    match best {
        Some((_, knob, model)) => Ok(Calibration {
            knob: SparsityKnob::for_method(method, knob),
            nnz: model.nnz(),
            target: target_nnz,
            non_monotone,
            samples,
            model,
        }),
        None => Err(last_err.unwrap_or(Error::DegenerateComponent { component: 0 })),
    }
}

fn is_monotone(samples: &[CalibrationSample], sense: Sense) -> bool {
    let mut ok: Vec<(f64, usize)> = samples.iter().filter_map(|s| s.nnz.map(|n| (s.knob, n))).collect();
    ok.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    ok.windows(2).all(|w| match sense {
        Sense::Sparser => w[1].1 <= w[0].1,
        Sense::Denser => w[1].1 >= w[0].1,
    })
}
