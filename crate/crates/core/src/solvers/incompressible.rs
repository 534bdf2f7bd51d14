use std::sync::Arc;

use super::config::{SolverConfig, TimeGrid};
use super::scheme::{check_cfl, check_finite, lawson_heun, Evolution};
use crate::operators::{convective_term, helmholtz_project, Projection};
use crate::torus::{Lattice, SpectralField};
use crate::{Error, Result};

/// Fixed-step solver for `v' = mu lap v - P(v.grad v) + P f`, started from
/// divergence-free data.
pub struct IncompressibleSolver {
    lattice: Arc<Lattice>,
    cfg: SolverConfig,
    grid: TimeGrid,
    heat: Vec<f64>,
}

impl IncompressibleSolver {
    pub fn new(lattice: &Arc<Lattice>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = TimeGrid::new(cfg.horizon, cfg.dt, cfg.samples);
        let h = grid.dt();
        let heat = (0..lattice.len()).map(|f| (-cfg.mu * lattice.k2(f) * h).exp()).collect();
        Ok(IncompressibleSolver { lattice: lattice.clone(), cfg, grid, heat })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn linear_flow(&self, v: &SpectralField, h: f64) -> SpectralField {
        if h == self.grid.dt() {
            v.map_modes(|f| self.heat[f])
        } else {
            v.map_modes(|f| (-self.cfg.mu * self.lattice.k2(f) * h).exp())
        }
    }

    pub fn rhs(&self, t: f64, v: &SpectralField) -> Result<SpectralField> {
        let lat = &self.lattice;
        let mut n = SpectralField::zeros(lat, lat.dim());
        if self.cfg.nonlinear {
            n = convective_term(v, v)?.scale(-1.0);
        }
        if !self.cfg.forcing.is_zero() {
            n = n.add(&self.cfg.forcing.at(lat, t)?)?;
        }
        helmholtz_project(&n, Projection::P)
    }

    /// Rejects data with a gradient part above roundoff.
    pub fn check_initial(&self, v: &SpectralField) -> Result<()> {
        let q = helmholtz_project(v, Projection::Q)?;
        if q.l2_norm() > 1e-12 * v.l2_norm().max(1.0) {
            return Err(Error::Argument("incompressible data must be divergence-free".into()));
        }
        Ok(())
    }
}

impl Evolution for IncompressibleSolver {
    type State = SpectralField;

    fn time_grid(&self) -> TimeGrid {
        self.grid
    }

    fn step(&self, v: &SpectralField, i: usize) -> Result<SpectralField> {
        let h = self.grid.dt();
        if self.cfg.nonlinear {
            check_cfl(v, h, self.cfg.cfl)?;
        }
        let next = lawson_heun(v, self.grid.time(i), h, |s, h| self.linear_flow(s, h), |t, s| self.rhs(t, s))?;
        check_finite(next.l2_norm(), "incompressible velocity")?;
        Ok(next)
    }
}
