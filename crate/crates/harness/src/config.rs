//! Experiment configuration, read from a TOML key-value file.
//!
//! ```toml
//! experiment = "montecarlo"      # orthogonal | nonorthogonal | montecarlo | file
//! methods = ["PCA", "PMD-O"]     # default: all nine
//! components = 5                 # default: the generator's true rank
//! repetitions = 20
//! seed = 1
//! score_modes = ["naive", "corrected"]
//! center = false
//! output_dir = "out"
//! # file experiments only
//! data = "x.csv"
//! target_nnz = 30
//!
//! [metaparameters]
//! "PMD-PD" = { kind = "c2", value = 2.5 }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sparsepca::{Method, ScoreMode, SparsityKnob};

use crate::error::{io_err, HarnessError, Result};

pub const DEFAULT_MONTECARLO_REPETITIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Orthogonal,
    Nonorthogonal,
    Montecarlo,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    /// Number of components; `None` uses the generator's true rank.
    #[serde(default)]
    pub components: Option<usize>,
    /// `None` means 1, or 100 for Monte Carlo.
    #[serde(default)]
    pub repetitions: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "both_modes")]
    pub score_modes: Vec<ScoreMode>,
    #[serde(default)]
    pub center: bool,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Input matrix for `file` experiments.
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Calibration target for `file` experiments (generated data uses the
    /// true nonzero count).
    #[serde(default)]
    pub target_nnz: Option<usize>,
    /// Fixed knobs; methods listed here skip calibration.
    #[serde(default)]
    pub metaparameters: BTreeMap<Method, SparsityKnob>,
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn both_modes() -> Vec<ScoreMode> {
    vec![ScoreMode::Naive, ScoreMode::Corrected]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            methods: all_methods(),
            components: None,
            repetitions: None,
            seed: 0,
            score_modes: both_modes(),
            center: false,
            output_dir: default_output_dir(),
            data: None,
            target_nnz: None,
            metaparameters: BTreeMap::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text)
    }

    pub fn repetitions(&self) -> usize {
        self.repetitions.unwrap_or(match self.experiment {
            ExperimentKind::Montecarlo => DEFAULT_MONTECARLO_REPETITIONS,
            _ => 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        if self.score_modes.is_empty() {
            return bad("score_modes must not be empty".into());
        }
        if self.repetitions == Some(0) {
            return bad("repetitions must be at least 1".into());
        }
        if self.components == Some(0) {
            return bad("components must be at least 1".into());
        }
        for (m, knob) in &self.metaparameters {
            if SparsityKnob::for_method(*m, 0.0) == SparsityKnob::None && *knob != SparsityKnob::None {
                return bad(format!("{m} takes no metaparameter"));
            }
        }
        if self.experiment == ExperimentKind::File {
            if self.data.is_none() {
                return bad("file experiments need 'data'".into());
            }
            let uncalibrated: Vec<_> = self
                .methods
                .iter()
                .filter(|m| **m != Method::Pca && !self.metaparameters.contains_key(m))
                .collect();
            if self.target_nnz.is_none() && !uncalibrated.is_empty() {
                return bad("file experiments need 'target_nnz' or metaparameters for every sparse method".into());
            }
        }
        Ok(())
    }
}
