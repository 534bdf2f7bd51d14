use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::solvers::SolverConfig;
use crate::torus::LatticeSpec;
use crate::{Error, Result};

pub const CONFIG_SCHEMA: u32 = 1;

fn default_zeta() -> f64 {
    8.0
}

fn default_theta() -> f64 {
    0.25
}

fn default_amplitude() -> f64 {
    2.0
}

fn default_smoothness() -> f64 {
    2.0
}

fn default_fraction() -> f64 {
    0.5
}

fn default_samples() -> usize {
    20
}

/// Everything a run or a study needs. Loaded from JSON; unknown keys are
/// rejected so typos do not silently fall back to defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub lattice: LatticeSpec,
    /// Template for every solver; `eps` is replaced per sweep member.
    pub solver: SolverConfig,
    /// Mach numbers, strictly decreasing.
    pub eps: Vec<f64>,
    /// Low/medium frequency threshold.
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// High band starts at `eta0 / eps`; defaults to `nu / 2`.
    #[serde(default)]
    pub eta0: Option<f64>,
    /// Regularity loss in the decay functionals, in `(0, 1/2)`.
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Target `B^{d/2}_{2,1}` norm of the initial density.
    #[serde(default = "default_amplitude")]
    pub amplitude_density: f64,
    /// Target `B^{d/2-1}_{2,1}` norm of the initial velocity.
    #[serde(default = "default_amplitude")]
    pub amplitude_velocity: f64,
    /// Spectral decay exponent of the random initial data.
    #[serde(default = "default_smoothness")]
    pub smoothness: f64,
    #[serde(default)]
    pub seed: u64,
    /// Time step of the incompressible and averaged solvers; defaults to
    /// `solver.dt`.
    #[serde(default)]
    pub reference_dt: Option<f64>,
    /// Equal diagnostic intervals over `[0, T]`, shared by all runs.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// A vanishing quantity must end below this fraction of its first value.
    #[serde(default = "default_fraction")]
    pub vanishing_fraction: f64,
    /// Resonance table radius; defaults to the largest retained `|k|`.
    #[serde(default)]
    pub cutoff: Option<f64>,
    /// Where resonance tables are cached.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!("config schema {} unsupported, expected {CONFIG_SCHEMA}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn eta0(&self) -> f64 {
        self.eta0.unwrap_or(0.5 * self.solver.nu())
    }

    pub fn reference_dt(&self) -> f64 {
        self.reference_dt.unwrap_or(self.solver.dt)
    }

    /// Hard errors for unusable settings; returns warnings for settings
    /// that leave the regime where the functionals have their intended
    /// meaning.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: String| Err(Error::Config(m));
        self.solver.validate()?;
        self.lattice.build()?;
        if self.eps.is_empty() {
            return bad("need at least one Mach number".into());
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return bad(format!("Mach numbers must lie in (0, 1], got {:?}", self.eps));
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return bad(format!("Mach numbers must decrease strictly, got {:?}", self.eps));
        }
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return bad(format!("theta = {} must lie in (0, 1/2)", self.theta));
        }
        if !(self.zeta > 0.0) || !(self.eta0() > 0.0) {
            return bad("zeta and eta0 must be positive".into());
        }
        if !(self.reference_dt() > 0.0) {
            return bad("reference dt must be positive".into());
        }
        if self.samples == 0 {
            return bad("need at least one diagnostic interval".into());
        }
        if !(self.vanishing_fraction > 0.0 && self.vanishing_fraction <= 1.0) {
            return bad("vanishing fraction must lie in (0, 1]".into());
        }
        let mut warnings = Vec::new();
        for &e in &self.eps {
            if self.zeta >= self.eta0() / e {
                warnings.push(format!(
                    "zeta = {} is not below eta0/eps = {:.4} at eps = {e}; the medium band is empty there",
                    self.zeta,
                    self.eta0() / e
                ));
            }
        }
        if self.eps.len() < 4 {
            warnings.push(format!("only {} Mach numbers; trends need at least 4", self.eps.len()));
        }
        Ok(warnings)
    }
}
