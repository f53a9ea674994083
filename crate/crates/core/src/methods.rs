//! Uniform entry point over all factorization methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpca::{fit_gpca, GpcaConfig};
use crate::model::{FactorModel, Method};
use crate::numerics::Matrix;
use crate::pca::fit_pca;
use crate::pmd::{fit_pmd, PmdConfig};
use crate::spca::{fit_spca_sequential, fit_spca_simultaneous, SpcaConfig};

/// The scalar sparsity knob of each method family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum SparsityKnob {
    /// PCA has no sparsity parameter.
    None,
    /// Lasso weight shared by all components (SPCA, SPCA-Sq).
    Lambda1(f64),
    /// Nonzeros kept in every loading (SPCA, SPCA-Sq); the lasso weight of
    /// each component is set per iteration to meet it.
    Cardinality(usize),
    /// L1 budget on each loading (PMD variants).
    C2(f64),
    /// Group correlation threshold (GPCA variants).
    Gamma(f64),
}

impl SparsityKnob {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SparsityKnob::None => None,
            SparsityKnob::Cardinality(k) => Some(k as f64),
            SparsityKnob::Lambda1(v) | SparsityKnob::C2(v) | SparsityKnob::Gamma(v) => Some(v),
        }
    }

    /// The knob calibrated for `method`, holding `value` (rounded for
    /// cardinalities).
    pub fn for_method(method: Method, value: f64) -> SparsityKnob {
        match method {
            Method::Pca => SparsityKnob::None,
            Method::Spca | Method::SpcaSeq => SparsityKnob::Cardinality(value.round().max(0.0) as usize),
            Method::PmdPd | Method::PmdO | Method::PmdM => SparsityKnob::C2(value),
            Method::GpcaPd | Method::GpcaM | Method::GpcaO => SparsityKnob::Gamma(value),
        }
    }
}

/// Fits `method` with `a` components and the given knob. The knob family must
/// match the method.
pub fn fit_method(method: Method, x: &Matrix, a: usize, knob: SparsityKnob) -> Result<FactorModel> {
    let mismatch = || Error::InvalidInput(format!("sparsity knob {knob:?} does not apply to {method}"));
    match (method, knob) {
        (Method::Pca, _) => fit_pca(x, a),
        (Method::Spca, SparsityKnob::Lambda1(l)) => fit_spca_simultaneous(x, a, &SpcaConfig::shared(a, l)),
        (Method::SpcaSeq, SparsityKnob::Lambda1(l)) => fit_spca_sequential(x, a, &SpcaConfig::shared(a, l)),
        (Method::Spca, SparsityKnob::Cardinality(k)) => fit_spca_simultaneous(x, a, &SpcaConfig::cardinality(a, k)),
        (Method::SpcaSeq, SparsityKnob::Cardinality(k)) => fit_spca_sequential(x, a, &SpcaConfig::cardinality(a, k)),
        (Method::PmdPd | Method::PmdO | Method::PmdM, SparsityKnob::C2(c2)) => {
            fit_pmd(x, a, &PmdConfig::new(c2, method.deflation()))
        }
        (Method::GpcaPd | Method::GpcaM | Method::GpcaO, SparsityKnob::Gamma(g)) => {
            fit_gpca(x, a, &GpcaConfig::new(g, method.deflation()))
        }
        _ => Err(mismatch()),
    }
}
