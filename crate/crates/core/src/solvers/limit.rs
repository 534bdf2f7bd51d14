use std::sync::Arc;

use num_complex::Complex64;

use super::config::{SolverConfig, TimeGrid};
use super::scheme::{check_finite, lawson_heun, Evolution};
use crate::operators::{within_radius, AcousticCoeffs};
use crate::resonance::{limit_q1, limit_q2, ResonanceTable};
use crate::torus::SpectralField;
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// Incompressible velocity as a function of time.
pub trait VelocityField: Send + Sync {
    fn at(&self, t: f64) -> Result<SpectralField>;
}

/// A time-independent velocity.
pub struct Frozen(pub SpectralField);

impl VelocityField for Frozen {
    fn at(&self, _t: f64) -> Result<SpectralField> {
        Ok(self.0.clone())
    }
}

/// Piecewise cubic Lagrange interpolation through the four samples nearest
/// to `t`. Sample times are reproduced exactly.
pub struct Interpolant {
    traj: Trajectory<SpectralField>,
}

impl Interpolant {
    pub fn new(traj: Trajectory<SpectralField>) -> Self {
        Interpolant { traj }
    }
}

impl VelocityField for Interpolant {
    fn at(&self, t: f64) -> Result<SpectralField> {
        let times = self.traj.times();
        let states = self.traj.states();
        let n = times.len();
        let end = times[n - 1];
        if t < -1e-12 * end.max(1.0) || t > end * (1.0 + 1e-12) {
            return Err(Error::Argument(format!("velocity requested at t = {t} outside [0, {end}]")));
        }
        if let Some(i) = times.iter().position(|&s| s == t) {
            return Ok(states[i].clone());
        }
        let right = times.partition_point(|&s| s < t).clamp(1, n - 1);
        let width = n.min(4);
        let first = (right as isize - 2).clamp(0, (n - width) as isize) as usize;
        let nodes = first..first + width;
        let mut out = SpectralField::zeros(states[0].lattice(), states[0].ncomp());
        for j in nodes.clone() {
            let w: f64 = nodes.clone().filter(|&m| m != j).map(|m| (t - times[m]) / (times[j] - times[m])).product();
            out = out.axpy(Complex64::new(w, 0.0), &states[j])?;
        }
        Ok(out)
    }
}

/// Fixed-step solver for the averaged acoustic system
/// `V' = (nu/2) lap V - Q1(v, V) - Q2(V, V)` driven by a given
/// incompressible velocity `v`.
pub struct LimitSolver {
    table: Arc<ResonanceTable>,
    velocity: Arc<dyn VelocityField>,
    cfg: SolverConfig,
    grid: TimeGrid,
    heat: Vec<f64>,
}

impl LimitSolver {
    /// The table must cover every retained mode.
    pub fn new(table: Arc<ResonanceTable>, velocity: Arc<dyn VelocityField>, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let lat = table.lattice().clone();
        if !within_radius(lat.kmax(), table.cutoff()) {
            return Err(Error::Config(format!(
                "resonance table radius {} is below the largest retained |k| = {}",
                table.cutoff(),
                lat.kmax()
            )));
        }
        let grid = TimeGrid::new(cfg.horizon, cfg.dt, cfg.samples);
        let h = grid.dt();
        let heat = (0..lat.len()).map(|f| (-0.5 * cfg.nu() * lat.k2(f) * h).exp()).collect();
        Ok(LimitSolver { table, velocity, cfg, grid, heat })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn linear_flow(&self, v: &AcousticCoeffs, h: f64) -> AcousticCoeffs {
        let lat = v.lattice().clone();
        let nu = self.cfg.nu();
        let cached = h == self.grid.dt();
        v.map(|f, _| {
            let g = if cached { self.heat[f] } else { (-0.5 * nu * lat.k2(f) * h).exp() };
            Complex64::new(g, 0.0)
        })
    }

    pub fn rhs(&self, t: f64, v: &AcousticCoeffs) -> Result<AcousticCoeffs> {
        if !self.cfg.nonlinear {
            return Ok(AcousticCoeffs::zeros(v.lattice()));
        }
        let u = self.velocity.at(t)?;
        let q1 = limit_q1(&u, v, &self.table)?;
        let q2 = limit_q2(v, v, self.cfg.pressure.kappa(), &self.table)?;
        Ok(q1.add(&q2)?.scale(-1.0))
    }
}

impl Evolution for LimitSolver {
    type State = AcousticCoeffs;

    fn time_grid(&self) -> TimeGrid {
        self.grid
    }

    fn step(&self, v: &AcousticCoeffs, i: usize) -> Result<AcousticCoeffs> {
        let h = self.grid.dt();
        let next = lawson_heun(v, self.grid.time(i), h, |s, h| self.linear_flow(s, h), |t, s| self.rhs(t, s))?;
        check_finite(next.l2_norm(), "limit state")?;
        Ok(next)
    }
}
