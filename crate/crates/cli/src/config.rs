//! TOML run configuration: one table per experiment under `[experiments]`.
//!
//! ```toml
//! [experiments.decay]
//! experiment = "deviation_scan"
//! potential.coeffs = [[1, 1.0, 0.0]]
//! lambda = 0.25
//! t_max = 8.0
//! n_list = [4, 6, 8, 12, 16, 24, 32]
//! k_grid = 17
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use swlab_core::experiments::{ExperimentSpec, Truncation};
use swlab_core::{FourierPotential, Scheme};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiments: BTreeMap<String, ExperimentSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    DeviationScan,
    DeviationScanNegative,
    AccelerationPersistence,
    BoundStateProbe,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// `[m, re, im]` rows for `m > 0`; negative frequencies follow by symmetry.
    pub coeffs: Option<Vec<(i64, f64, f64)>>,
    /// Whitespace-separated samples of `V` on `x_j = 2πj/M`.
    pub samples_file: Option<PathBuf>,
    /// Highest frequency kept from `samples_file`.
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub experiment: Kind,
    pub potential: PotentialSection,
    #[serde(default = "one")]
    pub lambda: f64,
    /// Sobolev index for the `‖V‖_α` line in the summary.
    pub alpha: Option<f64>,
    #[serde(rename = "N")]
    pub half_width: Option<usize>,
    pub buffer: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_leak_max")]
    pub leak_max: f64,
    pub t_max: f64,
    pub n_list: Vec<i64>,
    #[serde(default = "one_usize")]
    pub k_grid: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub scheme: Option<String>,
    /// Thresholds on the fitted exponent of a deviation scan.
    pub min_exponent: Option<f64>,
    pub max_exponent: Option<f64>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_tol() -> f64 {
    1e-9
}
fn default_leak_max() -> f64 {
    1e-6
}
fn default_epsilon() -> f64 {
    0.2
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if cfg.experiments.is_empty() {
        return Err(CliError::Config(format!("{}: no experiments defined", path.display())));
    }
    Ok(cfg)
}

impl ExperimentSection {
    pub fn potential(&self, base: &Path) -> Result<FourierPotential, CliError> {
        let p = &self.potential;
        match (&p.coeffs, &p.samples_file) {
            (Some(c), None) => {
                if p.bandwidth.is_some() {
                    return Err(CliError::Config("potential.bandwidth only applies to samples_file".into()));
                }
                let entries: Vec<(i64, Complex64)> =
                    c.iter().map(|&(m, re, im)| (m, Complex64::new(re, im))).collect();
                Ok(FourierPotential::from_positive(&entries).0)
            }
            (None, Some(file)) => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                let samples = text
                    .split_whitespace()
                    .map(|w| w.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let bw = p
                    .bandwidth
                    .ok_or_else(|| CliError::Config("potential.samples_file needs potential.bandwidth".into()))?;
                Ok(FourierPotential::from_samples(&samples, bw).map_err(CliError::from_setup)?.0)
            }
            _ => Err(CliError::Config(
                "exactly one of potential.coeffs and potential.samples_file must be given".into(),
            )),
        }
    }

    pub fn spec(&self, name: &str, base: &Path) -> Result<ExperimentSpec, CliError> {
        let mut spec = ExperimentSpec::new(name, self.potential(base)?, self.lambda, self.n_list.clone(), self.t_max);
        spec.k_grid = self.k_grid;
        spec.tol = self.tol;
        spec.leak_max = self.leak_max;
        if let Some(s) = &self.scheme {
            spec.scheme = s.parse::<Scheme>().map_err(CliError::from_setup)?;
        }
        spec.truncation = match (self.half_width, self.buffer) {
            (None, None) => Truncation::Auto,
            (Some(half_width), Some(buffer)) => Truncation::Fixed { half_width, buffer },
            _ => return Err(CliError::Config("N and buffer must be given together".into())),
        };
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(CliError::Config(format!("epsilon = {} must lie in [0, 1)", self.epsilon)));
        }
        spec.validate().map_err(CliError::from_setup)?;
        Ok(spec)
    }
}
