//! Run configuration: a JSON file whose fields are all optional, overridden
//! field by field from the command line.

use std::path::{Path, PathBuf};

use nucmem_core::couplings::{HomogeneityThresholds, ProfileSpec};
use nucmem_core::fockspace::LadderConvention;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Couplings,
    Modes,
    Spectrum,
    Storage,
    Decoherence,
    Verify,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Couplings => "couplings",
            Experiment::Modes => "modes",
            Experiment::Spectrum => "spectrum",
            Experiment::Storage => "storage",
            Experiment::Decoherence => "decoherence",
            Experiment::Verify => "verify",
        }
    }
}

/// Electron qubit `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    pub theta: f64,
    pub phi: f64,
}

/// Every knob any subcommand reads. Fields a subcommand does not use are
/// ignored by it but still recorded in the manifest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n_sites: Option<usize>,
    #[serde(default, rename = "I0", skip_serializing_if = "Option::is_none")]
    pub spin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_z: Option<f64>,
    /// Electron Zeeman splitting; absent means tuned to resonance.
    #[serde(default, rename = "Omega_z", skip_serializing_if = "Option::is_none")]
    pub big_omega_z: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<HomogeneityThresholds>,
    /// Excitation number of the subspace `V_n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    /// Cluster width for spectrum comparison, in units of `Ω`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export_matrix: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<QubitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_list: Option<Vec<usize>>,
    /// End of the storage time grid in units of the write time `π/(2Ω)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    /// Quasi-homogeneous coupling of the decoherence model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_range: Option<[f64; 2]>,
    /// Alternative to `x_range`: `k_B T` range, converted with `omega_z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kbt_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<LadderConvention>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            field: "<file>".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
            field: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }
}
