//! PCA and sparse PCA with least-squares score correction and consistent
//! explained-variance accounting.
//!
//! Methods: plain PCA, simultaneous and sequential elastic-net sparse PCA,
//! penalized matrix decomposition under projection, orthogonalized and
//! Mackey deflation, and group-wise PCA under the same three deflations.
//! [`diagnostics`] computes naive and corrected scores, residuals and the
//! correlation and variance statistics used to compare them. [`simgen`]
//! generates the noise-free benchmark data.
//!
//! No method centers its input.

pub mod calibrate;
pub mod deflation;
pub mod diagnostics;
pub mod error;
pub mod gpca;
pub mod methods;
pub mod model;
pub mod numerics;
pub mod pca;
pub mod pmd;
pub mod simgen;
pub mod spca;

pub use calibrate::{calibrate_sparsity, Calibration};
pub use diagnostics::{stats_report, StatsReport};
pub use error::{Error, Result};
pub use methods::{fit_method, SparsityKnob};
pub use model::{Deflation, FactorModel, Method, ScoreMode};
pub use numerics::{Matrix, Vector};
pub use simgen::SimulatedDataset;
