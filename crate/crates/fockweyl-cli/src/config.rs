//! Experiment configuration. Every field is optional; experiments fill in their own defaults.

use std::path::Path;

use fockweyl::io::ModelSpecJson;
use fockweyl::C64;
use serde::Deserialize;

use crate::CliError;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the subcommand id when present.
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub epsilons: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    /// Probe vectors ξ, each a list of `[re, im]`.
    pub probes: Option<Vec<Vec<Pair>>>,
    /// Base point z or initial datum z0.
    pub z: Option<Vec<Pair>>,
    pub t: Option<f64>,
    pub model: Option<ModelSpecJson>,
    pub n_max: Option<u32>,
    pub instances: Option<usize>,
    pub k_max: Option<u32>,
    pub k_values: Option<Vec<u32>>,
    pub dims: Option<Vec<usize>>,
    pub densities: Option<Vec<f64>>,
    pub lambdas: Option<Vec<f64>>,
    pub steps: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if let Some(e) = &self.epsilons {
            if e.is_empty() || e.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return bad("epsilons must be a nonempty list of positive numbers");
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return bad("tolerance must be positive");
            }
        }
        if let Some(z) = &self.z {
            if z.is_empty() {
                return bad("z must be nonempty");
            }
        }
        if let Some(p) = &self.probes {
            if p.is_empty() || p.iter().any(|x| x.is_empty()) {
                return bad("probes must be nonempty vectors");
            }
        }
        if let Some(t) = self.t {
            if !t.is_finite() {
                return bad("t must be finite");
            }
        }
        if let Some(l) = &self.lambdas {
            if l.iter().any(|x| !(*x > 0.0)) {
                return bad("lambdas must be positive");
            }
        }
        if let Some(d) = &self.densities {
            if d.iter().any(|x| !(*x > 0.0)) {
                return bad("densities must be positive");
            }
        }
        if self.instances == Some(0) || self.steps == Some(0) {
            return bad("instances and steps must be positive");
        }
        Ok(())
    }

    pub fn epsilons_or(&self, default: &[f64]) -> Vec<f64> {
        self.epsilons.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn tolerance_or(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }

    pub fn z_or(&self, default: &[C64]) -> Vec<C64> {
        self.z.as_ref().map(|z| to_complex(z)).unwrap_or_else(|| default.to_vec())
    }

    pub fn probes_or(&self, default: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
        self.probes.as_ref().map(|p| p.iter().map(|x| to_complex(x)).collect()).unwrap_or(default)
    }

    /// Probes must live on the same C^d as z.
    pub fn check_probe_dims(probes: &[Vec<C64>], d: usize) -> Result<(), CliError> {
        if probes.iter().any(|p| p.len() != d) {
            return Err(CliError::Config(format!("probes must have length {d}")));
        }
        Ok(())
    }
}

pub fn to_complex(v: &[Pair]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}
