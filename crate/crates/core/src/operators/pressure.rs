use serde::{Deserialize, Serialize};

use crate::torus::{forward_transform, inverse_transform, GridField, SpectralField};
use crate::{Error, Result};

/// Barotropic pressure law, normalised so that `P'(1) = 1`.
///
/// The solver needs `g(a) = P'(1+a)/(1+a) = 1 + kappa a + a K(a)` with
/// `K(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureLaw {
    /// `P(rho) = rho^gamma / gamma`, so `g(a) = (1+a)^{gamma-2}`.
    Gamma { gamma: f64 },
    /// `g(a) = 1 + sum_n coeffs[n-1] a^n`, at most eight terms.
    Series { coeffs: Vec<f64> },
}

impl Default for PressureLaw {
    fn default() -> Self {
        PressureLaw::Gamma { gamma: 1.4 }
    }
}

/// Largest density perturbation where a truncated series is trusted.
const SERIES_RADIUS: f64 = 0.5;

impl PressureLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            PressureLaw::Gamma { gamma } if *gamma >= 1.0 && gamma.is_finite() => Ok(()),
            PressureLaw::Gamma { gamma } => Err(Error::Config(format!("gamma = {gamma} must be >= 1"))),
            PressureLaw::Series { coeffs } if !coeffs.is_empty() && coeffs.len() <= 8 => Ok(()),
            PressureLaw::Series { .. } => Err(Error::Config("series law needs 1..=8 coefficients".into())),
        }
    }

    /// `kappa = g'(0)`.
    pub fn kappa(&self) -> f64 {
        match self {
            PressureLaw::Gamma { gamma } => gamma - 2.0,
            PressureLaw::Series { coeffs } => coeffs[0],
        }
    }

    /// `K(a) = (g(a) - 1 - kappa a) / a`.
    pub fn k_tilde(&self, a: f64) -> Result<f64> {
        match self {
            PressureLaw::Gamma { gamma } => {
                if a <= -1.0 {
                    return Err(Error::Vacuum(a));
                }
                let e = gamma - 2.0;
                if a.abs() < 1e-3 {
                    // Taylor tail, avoids cancellation near a = 0
                    let mut term = e;
                    let mut sum = 0.0;
                    for n in 2..10 {
                        term *= (e - (n - 1) as f64) * a / n as f64;
                        sum += term;
                    }
                    Ok(sum)
                } else {
                    Ok(((1.0 + a).powf(e) - 1.0 - e * a) / a)
                }
            }
            PressureLaw::Series { coeffs } => {
                if a.abs() > SERIES_RADIUS {
                    return Err(Error::Argument(format!(
                        "series law used at a = {a}, outside |a| <= {SERIES_RADIUS}"
                    )));
                }
                Ok(coeffs.iter().skip(1).rev().fold(0.0, |acc, c| acc * a + c) * a)
            }
        }
    }

    /// `g(a) = P'(1+a)/(1+a)`.
    pub fn ratio(&self, a: f64) -> Result<f64> {
        Ok(1.0 + self.kappa() * a + a * self.k_tilde(a)?)
    }
}

/// `I(a) = a / (1 + a)`, the viscosity correction.
pub fn viscous_factor(a: f64) -> f64 {
    a / (1.0 + a)
}

/// Grid values and spectral fields of `I(eps a)` and `K(eps a)`.
pub struct NonlinearCoefficients {
    pub kappa: f64,
    pub viscous: SpectralField,
    pub pressure: SpectralField,
    pub viscous_grid: Vec<f64>,
    pub pressure_grid: Vec<f64>,
}

/// Evaluate the nonlinear coefficients pointwise. Fails unless
/// `eps * max|a| <= limit`.
pub fn nonlinear_coefficients_within(
    law: &PressureLaw,
    a: &SpectralField,
    eps: f64,
    limit: f64,
) -> Result<NonlinearCoefficients> {
    if !a.is_scalar() {
        return Err(Error::Shape("density perturbation must be scalar".into()));
    }
    let grid = inverse_transform(a);
    let vals = grid.real_part(0);
    let peak = vals.iter().fold(0.0f64, |m, x| m.max(x.abs())) * eps;
    if peak > limit {
        return Err(Error::Vacuum(peak));
    }
    let viscous_grid: Vec<f64> = vals.iter().map(|&x| viscous_factor(eps * x)).collect();
    let pressure_grid = vals.iter().map(|&x| law.k_tilde(eps * x)).collect::<Result<Vec<f64>>>()?;
    let lat = a.lattice();
    let viscous = forward_transform(&GridField::from_real(lat, vec![viscous_grid.clone()])?)?;
    let pressure = forward_transform(&GridField::from_real(lat, vec![pressure_grid.clone()])?)?;
    Ok(NonlinearCoefficients { kappa: law.kappa(), viscous, pressure, viscous_grid, pressure_grid })
}

/// [`nonlinear_coefficients_within`] with the strict bound `1/2`.
pub fn nonlinear_coefficients(law: &PressureLaw, a: &SpectralField, eps: f64) -> Result<NonlinearCoefficients> {
    nonlinear_coefficients_within(law, a, eps, 0.5)
}
