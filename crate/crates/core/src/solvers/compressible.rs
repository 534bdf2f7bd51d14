use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;

use super::config::{SolverConfig, TimeGrid};
use super::propagator::{acoustic_viscous_propagator, transverse_factor, Propagator};
use super::scheme::{check_cfl, check_finite, lawson_heun, Evolution, LinearSpace};
use crate::operators::{
    acoustic_transform, convective_term, helmholtz_project, nonlinear_coefficients_within, wave_group,
    AcousticCoeffs, Projection,
};
use crate::torus::{
    dealiased_product, forward_transform, inverse_transform, spectral_derivative, DerivativeKind, GridField,
    Lattice, SpectralField,
};
use crate::{Error, Result};

/// Density perturbation `a` (scalar, zero mean) and velocity `u`.
#[derive(Clone, Debug)]
pub struct CompressibleState {
    pub density: SpectralField,
    pub velocity: SpectralField,
}

impl CompressibleState {
    pub fn new(density: SpectralField, velocity: SpectralField) -> Result<Self> {
        let lat = density.lattice().clone();
        if !density.is_scalar() || velocity.ncomp() != lat.dim() {
            return Err(Error::Shape("need a scalar density and a d-vector velocity".into()));
        }
        if !velocity.lattice().same_as(&lat) {
            return Err(Error::LatticeMismatch("density and velocity".into()));
        }
        Ok(CompressibleState { density, velocity })
    }

    pub fn zeros(lat: &Arc<Lattice>) -> Self {
        CompressibleState { density: SpectralField::zeros(lat, 1), velocity: SpectralField::zeros(lat, lat.dim()) }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.density.lattice()
    }

    /// `(a, u)` as one `d + 1` component field.
    pub fn stacked(&self) -> SpectralField {
        SpectralField::stack(&[&self.density, &self.velocity]).expect("same lattice")
    }

    pub fn from_stacked(field: &SpectralField) -> Result<Self> {
        let d = field.lattice().dim();
        if field.ncomp() != d + 1 {
            return Err(Error::Shape(format!("compressible state needs {} components", d + 1)));
        }
        CompressibleState::new(field.component(0), field.slice(1..d + 1))
    }

    pub fn solenoidal(&self) -> Result<SpectralField> {
        helmholtz_project(&self.velocity, Projection::P)
    }

    pub fn potential(&self) -> Result<SpectralField> {
        helmholtz_project(&self.velocity, Projection::Q)
    }

    /// Acoustic coefficients of `(a, Qu)` pulled back by the free wave
    /// group: `V^eps(t) = L(-t/eps)(a, Qu)`.
    pub fn filtered(&self, t: f64, eps: f64) -> Result<AcousticCoeffs> {
        Ok(wave_group(&acoustic_transform(&self.density, &self.potential()?)?, -t / eps))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.density.l2_norm().powi(2) + self.velocity.l2_norm().powi(2)).sqrt()
    }
}

impl LinearSpace for CompressibleState {
    fn plus_scaled(&self, a: f64, x: &Self) -> Result<Self> {
        Ok(CompressibleState {
            density: self.density.plus_scaled(a, &x.density)?,
            velocity: self.velocity.plus_scaled(a, &x.velocity)?,
        })
    }
}

/// Fixed-step solver for the scaled compressible system
/// `a' = -div u / eps - div(a u)`,
/// `u' = -grad a / eps + A u - u.grad u - (kappa + K(eps a)) a grad a - I(eps a) A u + f`
/// with `A u = mu lap u + (mu + lambda) grad div u`.
pub struct CompressibleSolver {
    lattice: Arc<Lattice>,
    cfg: SolverConfig,
    grid: TimeGrid,
    pair: Vec<Propagator>,
    transverse: Vec<f64>,
    warned: AtomicBool,
}

/// Above this value of `eps max|a|` the uniform bounds are no longer
/// guaranteed; the run continues with a warning.
const VACUUM_WARNING: f64 = 0.5;

impl CompressibleSolver {
    pub fn new(lattice: &Arc<Lattice>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let mut dt_max = cfg.dt;
        if let Some(c) = cfg.acoustic_courant {
            dt_max = dt_max.min(c * cfg.eps / lattice.kmax());
        }
        let grid = TimeGrid::new(cfg.horizon, dt_max, cfg.samples);
        let h = grid.dt();
        let mut pair = vec![acoustic_viscous_propagator(0.0, h, cfg.eps, 0.0); lattice.len()];
        let mut transverse = vec![1.0; lattice.len()];
        for &f in lattice.modes() {
            let k = lattice.kabs(f);
            pair[f] = acoustic_viscous_propagator(k, h, cfg.eps, cfg.nu());
            transverse[f] = transverse_factor(k, h, cfg.mu);
        }
        Ok(CompressibleSolver { lattice: lattice.clone(), cfg, grid, pair, transverse, warned: AtomicBool::new(false) })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// Exact linear flow; uses the cached propagators when `h` is the grid
    /// step.
    pub fn linear_flow(&self, y: &CompressibleState, h: f64) -> CompressibleState {
        let lat = &self.lattice;
        let d = lat.dim();
        let cached = h == self.grid.dt();
        let mut out = y.clone();
        for &f in lat.modes().iter().skip(1) {
            let k = lat.kabs(f);
            let (pair, tf) = if cached {
                (self.pair[f], self.transverse[f])
            } else {
                (acoustic_viscous_propagator(k, h, self.cfg.eps, self.cfg.nu()), transverse_factor(k, h, self.cfg.mu))
            };
            let w = lat.wavevector(f);
            let e: Vec<f64> = (0..d).map(|i| w[i] / k).collect();
            let mu: Complex64 = (0..d).map(|i| y.velocity.comp(i)[f] * e[i]).sum();
            let (a1, mu1) = pair.apply(y.density.comp(0)[f], mu);
            out.density.comp_mut(0)[f] = a1;
            for i in 0..d {
                let perp = y.velocity.comp(i)[f] - mu * e[i];
                out.velocity.comp_mut(i)[f] = perp * tf + mu1 * e[i];
            }
        }
        out
    }

    /// `A u = mu lap u + (mu + lambda) grad div u`.
    fn lame(&self, u: &SpectralField) -> Result<SpectralField> {
        let lap = spectral_derivative(u, DerivativeKind::Laplacian)?;
        let gd = spectral_derivative(&spectral_derivative(u, DerivativeKind::Divergence)?, DerivativeKind::Gradient)?;
        Ok(lap.scale(self.cfg.mu).plus_scaled(self.cfg.mu + self.cfg.lambda, &gd)?)
    }

    /// Everything except the linear acoustic-viscous part.
    pub fn rhs(&self, t: f64, y: &CompressibleState) -> Result<CompressibleState> {
        let lat = &self.lattice;
        let d = lat.dim();
        let mut out = CompressibleState::zeros(lat);
        if self.cfg.nonlinear {
            let eps = self.cfg.eps;
            let coef = nonlinear_coefficients_within(&self.cfg.pressure, &y.density, eps, self.cfg.vacuum_limit)?;
            let a = inverse_transform(&y.density).real_part(0);
            let peak = eps * a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if peak > VACUUM_WARNING && !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!("eps*max|a| = {peak:.4} exceeds {VACUUM_WARNING}; uniform bounds no longer apply");
            }
            let flux = dealiased_product(&y.density, &y.velocity)?;
            out.density = spectral_derivative(&flux, DerivativeKind::Divergence)?.scale(-1.0);

            let grad_a = inverse_transform(&spectral_derivative(&y.density, DerivativeKind::Gradient)?);
            let au = inverse_transform(&self.lame(&y.velocity)?);
            let comps = (0..d)
                .map(|h| {
                    let (ga, lu) = (grad_a.real_part(h), au.real_part(h));
                    (0..lat.len())
                        .map(|p| {
                            -(coef.kappa + coef.pressure_grid[p]) * a[p] * ga[p] - coef.viscous_grid[p] * lu[p]
                        })
                        .collect()
                })
                .collect();
            let pointwise = forward_transform(&GridField::from_real(lat, comps)?)?;
            out.velocity = pointwise.sub(&convective_term(&y.velocity, &y.velocity)?)?;
        }
        if !self.cfg.forcing.is_zero() {
            out.velocity = out.velocity.add(&self.cfg.forcing.at(lat, t)?)?;
        }
        Ok(out)
    }
}

impl Evolution for CompressibleSolver {
    type State = CompressibleState;

    fn time_grid(&self) -> TimeGrid {
        self.grid
    }

    fn step(&self, y: &CompressibleState, i: usize) -> Result<CompressibleState> {
        let h = self.grid.dt();
        if self.cfg.nonlinear {
            check_cfl(&y.velocity, h, self.cfg.cfl)?;
        }
        let next = lawson_heun(y, self.grid.time(i), h, |s, h| self.linear_flow(s, h), |t, s| self.rhs(t, s))?;
        check_finite(next.l2_norm(), "compressible state")?;
        Ok(next)
    }
}
