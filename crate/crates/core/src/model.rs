//! Fitted factor models and the tags describing how they were produced.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics;
use crate::error::{Error, Result};
use crate::numerics::{count_nonzero, Matrix};

/// Factorization method. The display names follow the usual tags
/// (`SPCA-Sq`, `PMD-O`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "PCA")]
    Pca,
    #[serde(rename = "SPCA")]
    Spca,
    #[serde(rename = "SPCA-Sq")]
    SpcaSeq,
    #[serde(rename = "PMD-PD")]
    PmdPd,
    #[serde(rename = "PMD-O")]
    PmdO,
    #[serde(rename = "PMD-M")]
    PmdM,
    #[serde(rename = "GPCA-PD")]
    GpcaPd,
    #[serde(rename = "GPCA-M")]
    GpcaM,
    #[serde(rename = "GPCA-O")]
    GpcaO,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Pca,
        Method::Spca,
        Method::SpcaSeq,
        Method::PmdPd,
        Method::PmdO,
        Method::PmdM,
        Method::GpcaPd,
        Method::GpcaM,
        Method::GpcaO,
    ];

    /// The eight sparse variants, in the column order of the comparison tables.
    pub const SPARSE: [Method; 8] = [
        Method::Spca,
        Method::SpcaSeq,
        Method::PmdPd,
        Method::PmdO,
        Method::PmdM,
        Method::GpcaPd,
        Method::GpcaM,
        Method::GpcaO,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "PCA",
            Method::Spca => "SPCA",
            Method::SpcaSeq => "SPCA-Sq",
            Method::PmdPd => "PMD-PD",
            Method::PmdO => "PMD-O",
            Method::PmdM => "PMD-M",
            Method::GpcaPd => "GPCA-PD",
            Method::GpcaM => "GPCA-M",
            Method::GpcaO => "GPCA-O",
        }
    }

    pub fn deflation(self) -> Deflation {
        match self {
            Method::Pca | Method::Spca => Deflation::None,
            Method::SpcaSeq | Method::PmdPd | Method::GpcaPd => Deflation::Projection,
            Method::PmdO | Method::GpcaO => Deflation::Orthogonalized,
            Method::PmdM | Method::GpcaM => Deflation::Mackey,
        }
    }

    pub fn is_orthogonalized(self) -> bool {
        self.deflation() == Deflation::Orthogonalized
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('_', "-");
        let key = match key.as_str() {
            "SPCA-SQ" | "SPCASQ" | "SPCA-SEQ" => "SPCA-SQ".to_string(),
            _ => key,
        };
        Method::ALL
            .into_iter()
            .find(|m| m.name().to_ascii_uppercase() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Deflation {
    None,
    Projection,
    Orthogonalized,
    Mackey,
}

impl fmt::Display for Deflation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deflation::None => "none",
            Deflation::Projection => "projection",
            Deflation::Orthogonalized => "orthogonalized",
            Deflation::Mackey => "mackey",
        })
    }
}

/// How the scores of a model were obtained.
///
/// `Naive` scores are whatever the fitting procedure reports: `X P` for PCA
/// and both SPCA variants, `d_a u_a` for PMD, and the working-matrix
/// projection `X_{a-1} p_a` for GPCA. `Corrected` scores are the
/// least-squares solution `X P (P^T P)^+` on the original data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    Naive,
    Corrected,
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Naive => "naive",
            ScoreMode::Corrected => "corrected",
        })
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(ScoreMode::Naive),
            "corrected" => Ok(ScoreMode::Corrected),
            other => Err(Error::InvalidInput(format!("unknown score mode '{other}'"))),
        }
    }
}

/// A fitted `X ≈ T P^T` factorization.
#[derive(Debug, Clone)]
pub struct FactorModel {
    /// N×A scores.
    pub scores: Matrix,
    /// M×A loadings, unit L2 columns.
    pub loadings: Matrix,
    /// M×A auxiliary loadings (SPCA `Q`, Mackey `q` vectors) when the method has them.
    pub aux_loadings: Option<Matrix>,
    pub method: Method,
    pub deflation: Deflation,
    pub score_mode: ScoreMode,
}

impl FactorModel {
    pub fn n_components(&self) -> usize {
        self.loadings.ncols()
    }

    /// Nonzero loadings (magnitude above `1e-12`).
    pub fn nnz(&self) -> usize {
        count_nonzero(&self.loadings, 1e-12)
    }

    /// Same model with its scores replaced by the least-squares scores on `x`.
    pub fn with_corrected_scores(&self, x: &Matrix) -> Result<FactorModel> {
        let scores = diagnostics::corrected_scores(x, &self.loadings)?;
        Ok(FactorModel {
            scores,
            score_mode: ScoreMode::Corrected,
            ..self.clone()
        })
    }

    /// `X - T P^T`.
    pub fn residuals(&self, x: &Matrix) -> Result<Matrix> {
        diagnostics::residuals(x, &self.scores, &self.loadings)
    }

    /// Same model re-scored in the requested mode. Naive scores cannot be
    /// recovered from a corrected model, so that direction is an error.
    pub fn in_mode(&self, x: &Matrix, mode: ScoreMode) -> Result<FactorModel> {
        match (self.score_mode, mode) {
            (a, b) if a == b => Ok(self.clone()),
            (ScoreMode::Naive, ScoreMode::Corrected) => self.with_corrected_scores(x),
            _ => Err(Error::InvalidInput(
                "naive scores are only available from the fitting run".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(m.name().to_lowercase().parse::<Method>().unwrap(), m);
        }
        assert!("PMD-X".parse::<Method>().is_err());
        assert_eq!("spca_sq".parse::<Method>().unwrap(), Method::SpcaSeq);
    }

    #[test]
    fn deflation_tags() {
        assert_eq!(Method::PmdO.deflation(), Deflation::Orthogonalized);
        assert_eq!(Method::GpcaM.deflation(), Deflation::Mackey);
        assert_eq!(Method::Spca.deflation(), Deflation::None);
        assert!(Method::GpcaO.is_orthogonalized());
        assert!(!Method::PmdPd.is_orthogonalized());
    }
}
