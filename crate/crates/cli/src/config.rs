//! TOML run configuration: global keys plus one section per subcommand.

use std::path::{Path, PathBuf};

use deltacomb::Potential;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Worker threads; 0 or absent lets rayon decide.
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub spectrum: Option<SpectrumConfig>,
    #[serde(rename = "bound-states")]
    pub bound_states: Option<BoundStatesConfig>,
    #[serde(rename = "lt-check")]
    pub lt_check: Option<LtCheckConfig>,
    #[serde(rename = "trace-ineq")]
    pub trace_ineq: Option<TraceIneqConfig>,
    #[serde(rename = "phase-diagram")]
    pub phase_diagram: Option<PhaseDiagramConfig>,
    pub prufer: Option<PruferConfig>,
    #[serde(rename = "band-edges")]
    pub band_edges: Option<BandEdgesConfig>,
    #[serde(rename = "det-compare")]
    pub det_compare: Option<DetCompareConfig>,
}

/// Where a potential comes from: a file of "n value" lines, or inline values
/// starting at `first_index` (default 1).
#[derive(Debug, Default, Clone)]
pub struct PotentialSource {
    pub potential_file: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
    pub first_index: Option<usize>,
}

macro_rules! potential_source {
    ($($t:ty),*) => {$(
        impl $t {
            pub fn potential(&self) -> PotentialSource {
                PotentialSource {
                    potential_file: self.potential_file.clone(),
                    values: self.values.clone(),
                    first_index: self.first_index,
                }
            }
        }
    )*};
}

potential_source!(SpectrumConfig, BoundStatesConfig, TraceIneqConfig, DetCompareConfig);

impl PotentialSource {
    pub fn is_given(&self) -> bool {
        self.potential_file.is_some() || self.values.is_some()
    }

    pub fn load(&self, section: &str, base: &Path) -> Result<Potential, CliError> {
        match (&self.potential_file, &self.values) {
            (Some(_), Some(_)) => Err(CliError::config(format!(
                "[{section}]: give either potential_file or values, not both"
            ))),
            (None, None) => Err(CliError::config(format!(
                "[{section}]: missing potential_file or values"
            ))),
            (Some(file), None) => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                text.parse::<Potential>().map_err(|e| {
                    CliError::config(format!("[{section}] potential_file {}: {e}", path.display()))
                })
            }
            (None, Some(values)) => {
                Potential::new(self.first_index.unwrap_or(1), values.clone())
                    .map_err(|e| CliError::config(format!("[{section}] values: {e}")))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub potential_file: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
    pub first_index: Option<usize>,
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundStatesConfig {
    pub potential_file: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
    pub first_index: Option<usize>,
    #[serde(default)]
    pub p_values: Vec<f64>,
    pub eps_max: Option<f64>,
    #[serde(default)]
    pub riesz_gammas: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtCheckConfig {
    pub instances: usize,
    pub max_support: usize,
    /// Random attractive potentials take values in `[-amplitude, 0]`.
    pub amplitude: f64,
    #[serde(default)]
    pub p_values: Vec<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceIneqConfig {
    pub potential_file: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
    pub first_index: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    /// Number of random potentials; replaces the single potential when set.
    pub ensemble: Option<usize>,
    #[serde(default = "default_support")]
    pub max_support: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    pub cuts: Option<Vec<usize>>,
    #[serde(default = "default_nodes")]
    pub n_quad: usize,
    pub seed: Option<u64>,
}

fn default_support() -> usize {
    20
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_nodes() -> usize {
    40
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    pub kappa: f64,
    pub alpha_exp: f64,
    pub coupling_a: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PruferConfig {
    pub kappa: f64,
    pub alpha_exp: f64,
    pub coupling_a: f64,
    pub seed: Option<u64>,
    pub lambda: f64,
    pub n_steps: usize,
    pub trials: usize,
    /// Realizations whose full trajectory is written out.
    #[serde(default = "default_dump")]
    pub dump_trajectories: usize,
    #[serde(default = "default_every")]
    pub record_every: usize,
    #[serde(default)]
    pub r4: bool,
}

fn default_dump() -> usize {
    1
}

fn default_every() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandEdgesConfig {
    pub coupling_a: f64,
    pub lambda_max: f64,
    pub k_alpha: Option<f64>,
    pub k_beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetCompareConfig {
    pub potential_file: Option<PathBuf>,
    pub values: Option<Vec<f64>>,
    pub first_index: Option<usize>,
    /// `[re, im]` pairs.
    pub k_points: Vec<[f64; 2]>,
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

pub fn section<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    value
        .as_ref()
        .ok_or_else(|| CliError::config(format!("config has no [{name}] section")))
}
