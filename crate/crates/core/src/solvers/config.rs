use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::operators::{acoustic_transform, helmholtz_project, AcousticCoeffs, PressureLaw, Projection};
use crate::torus::{Lattice, SpectralField};
use crate::{Error, Result};

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn default_courant() -> Option<f64> {
    Some(0.5)
}

fn default_samples() -> usize {
    10
}

fn yes() -> bool {
    true
}

/// Physical and numerical parameters shared by the three solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Shear viscosity, `> 0`.
    pub mu: f64,
    /// Second viscosity; `nu = 2 mu + lambda > 0`.
    pub lambda: f64,
    /// Mach number.
    #[serde(default = "one")]
    pub eps: f64,
    #[serde(default)]
    pub pressure: PressureLaw,
    /// Final time.
    pub horizon: f64,
    /// Largest time step.
    pub dt: f64,
    /// With `Some(c)`, the compressible step is also capped by
    /// `c eps / kmax` so the acoustic phases are resolved.
    #[serde(default = "default_courant")]
    pub acoustic_courant: Option<f64>,
    /// Advective safety factor: `dt <= cfl dx / max|u|`.
    #[serde(default = "half")]
    pub cfl: f64,
    /// Abort once `eps max|a|` reaches this value.
    #[serde(default = "one")]
    pub vacuum_limit: f64,
    /// Number of equal sampling intervals over `[0, horizon]`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// With `false` only the linear part and the forcing act.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default)]
    pub forcing: ForcingSpec,
}

impl SolverConfig {
    pub fn new(mu: f64, lambda: f64, eps: f64, horizon: f64, dt: f64) -> Self {
        SolverConfig {
            mu,
            lambda,
            eps,
            pressure: PressureLaw::default(),
            horizon,
            dt,
            acoustic_courant: default_courant(),
            cfl: 0.5,
            vacuum_limit: 1.0,
            samples: default_samples(),
            nonlinear: true,
            forcing: ForcingSpec::default(),
        }
    }

    /// Longitudinal viscosity `2 mu + lambda`.
    pub fn nu(&self) -> f64 {
        2.0 * self.mu + self.lambda
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.nonlinear && !(self.mu > 0.0 && self.nu() > 0.0) {
            return bad(format!("need mu > 0 and 2 mu + lambda > 0, got mu = {}, nu = {}", self.mu, self.nu()));
        }
        if self.mu < 0.0 || self.nu() < 0.0 {
            return bad("viscosities must be non-negative".into());
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon {} must be positive", self.horizon));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt {} must be positive", self.dt));
        }
        if let Some(c) = self.acoustic_courant {
            if !(c > 0.0) {
                return bad(format!("acoustic courant {c} must be positive"));
            }
        }
        if !(self.cfl > 0.0) || !(self.vacuum_limit > 0.0) {
            return bad("cfl and vacuum limit must be positive".into());
        }
        if self.samples == 0 {
            return bad("need at least one sampling interval".into());
        }
        self.pressure.validate()?;
        Ok(())
    }
}

/// Uniform time grid `t_i = horizon * i / steps` with a sample every
/// `stride` steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
    pub stride: usize,
}

impl TimeGrid {
    /// Smallest grid with step `<= dt_max` and `samples` equal intervals.
    pub fn new(horizon: f64, dt_max: f64, samples: usize) -> Self {
        let per = horizon / samples as f64;
        let stride = ((per / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        TimeGrid { horizon, steps: stride * samples, stride }
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.steps as f64
    }

    /// Index of the grid time closest to `t`.
    pub fn index_of(&self, t: f64) -> usize {
        (t / self.horizon * self.steps as f64).round() as usize
    }
}

/// Time profile of a forcing mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Constant,
    /// `e^{rate t}`
    Exp { rate: f64 },
    /// `sin(omega t)`
    Sin { omega: f64 },
    /// `cos(omega t)`
    Cos { omega: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant => 1.0,
            Envelope::Exp { rate } => (rate * t).exp(),
            Envelope::Sin { omega } => (omega * t).sin(),
            Envelope::Cos { omega } => (omega * t).cos(),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant => 0.0,
            Envelope::Exp { rate } => rate * (rate * t).exp(),
            Envelope::Sin { omega } => omega * (omega * t).cos(),
            Envelope::Cos { omega } => -omega * (omega * t).sin(),
        }
    }
}

/// One forced Fourier mode `env(t) (c e^{ik.x} + conj)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingMode {
    /// Integer wave index.
    pub index: Vec<i64>,
    /// Per-component coefficient `(re, im)`.
    pub coeff: Vec<(f64, f64)>,
    pub envelope: Envelope,
}

/// Body force as a finite sum of real Fourier modes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSpec {
    #[serde(default)]
    pub modes: Vec<ForcingMode>,
}

impl ForcingSpec {
    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    fn assemble(&self, lat: &Arc<Lattice>, t: f64, weight: impl Fn(&Envelope, f64) -> f64) -> Result<SpectralField> {
        let d = lat.dim();
        let mut out = SpectralField::zeros(lat, d);
        for m in &self.modes {
            if m.coeff.len() != d {
                return Err(Error::Config(format!("forcing mode {:?} needs {d} components", m.index)));
            }
            let slot = lat
                .slot(&m.index)
                .ok_or_else(|| Error::Config(format!("forcing mode {:?} is not retained", m.index)))?;
            let neg = lat.neg(slot);
            let w = weight(&m.envelope, t);
            for (h, &(re, im)) in m.coeff.iter().enumerate() {
                let c = Complex64::new(re, im) * w;
                if slot == neg {
                    out.comp_mut(h)[slot] += Complex64::new(2.0 * c.re, 0.0);
                } else {
                    out.comp_mut(h)[slot] += c;
                    out.comp_mut(h)[neg] += c.conj();
                }
            }
        }
        out.set_reality(true);
        Ok(out)
    }

    /// `f(t)` as a vector field.
    pub fn at(&self, lat: &Arc<Lattice>, t: f64) -> Result<SpectralField> {
        self.assemble(lat, t, Envelope::value)
    }

    /// `df/dt`.
    pub fn rate_at(&self, lat: &Arc<Lattice>, t: f64) -> Result<SpectralField> {
        self.assemble(lat, t, Envelope::rate)
    }

    /// Divergence-free part `Pf`.
    pub fn solenoidal_at(&self, lat: &Arc<Lattice>, t: f64) -> Result<SpectralField> {
        helmholtz_project(&self.at(lat, t)?, Projection::P)
    }

    /// Acoustic coefficients of `(0, Qf)` or of its time derivative.
    pub fn acoustic_at(&self, lat: &Arc<Lattice>, t: f64, rate: bool) -> Result<AcousticCoeffs> {
        let f = if rate { self.rate_at(lat, t)? } else { self.at(lat, t)? };
        let q = helmholtz_project(&f, Projection::Q)?;
        acoustic_transform(&SpectralField::zeros(lat, 1), &q)
    }
}
