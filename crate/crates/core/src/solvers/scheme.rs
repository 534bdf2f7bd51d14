use num_complex::Complex64;

use super::config::TimeGrid;
use crate::operators::AcousticCoeffs;
use crate::torus::{inverse_transform, SpectralField};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// States the integrator can combine linearly.
pub trait LinearSpace: Clone {
    /// `self + a x`
    fn plus_scaled(&self, a: f64, x: &Self) -> Result<Self>;
}

impl LinearSpace for SpectralField {
    fn plus_scaled(&self, a: f64, x: &Self) -> Result<Self> {
        self.axpy(Complex64::new(a, 0.0), x)
    }
}

impl LinearSpace for AcousticCoeffs {
    fn plus_scaled(&self, a: f64, x: &Self) -> Result<Self> {
        self.axpy(Complex64::new(a, 0.0), x)
    }
}

/// Second-order Lawson step for `y' = Ly + N(t, y)` with `flow(y, h) =
/// e^{hL} y`:
/// `y* = E(y + h N0)`, `y1 = E(y + h/2 N0) + h/2 N(t + h, y*)`.
pub fn lawson_heun<S: LinearSpace>(
    y: &S,
    t: f64,
    h: f64,
    flow: impl Fn(&S, f64) -> S,
    rhs: impl Fn(f64, &S) -> Result<S>,
) -> Result<S> {
    let n0 = rhs(t, y)?;
    let pred = flow(&y.plus_scaled(h, &n0)?, h);
    let n1 = rhs(t + h, &pred)?;
    flow(&y.plus_scaled(0.5 * h, &n0)?, h).plus_scaled(0.5 * h, &n1)
}

/// A fixed-step integrator on a uniform time grid.
pub trait Evolution {
    type State: LinearSpace;

    fn time_grid(&self) -> TimeGrid;

    /// Advance from grid time `t_i` to `t_{i+1}`.
    fn step(&self, y: &Self::State, i: usize) -> Result<Self::State>;

    /// Integrate from `t = 0`, keeping every `stride`-th state.
    fn run(&self, initial: &Self::State) -> Result<Trajectory<Self::State>> {
        let (times, states) = self.run_from(initial, 0)?.into_iter().unzip();
        Trajectory::new(times, states)
    }

    /// Continue from the state at grid step `start`; the first sample is
    /// the given state itself. Steps only depend on `(state, i)`, so a
    /// restart from a saved sample reproduces the original run bit for bit.
    fn run_from(&self, state: &Self::State, start: usize) -> Result<Vec<(f64, Self::State)>> {
        let grid = self.time_grid();
        if start > grid.steps {
            return Err(Error::Argument(format!("start step {start} beyond {}", grid.steps)));
        }
        let mut out = vec![(grid.time(start), state.clone())];
        let mut y = state.clone();
        for i in start..grid.steps {
            y = self.step(&y, i)?;
            if (i + 1) % grid.stride == 0 {
                out.push((grid.time(i + 1), y.clone()));
            }
        }
        Ok(out)
    }
}

/// Advective limit `cfl * dx / max|u|` from grid velocity samples.
pub(crate) fn check_cfl(u: &SpectralField, dt: f64, cfl: f64) -> Result<()> {
    let g = inverse_transform(u);
    let n = u.lattice().len();
    let mut peak: f64 = 0.0;
    for p in 0..n {
        let s: f64 = (0..g.ncomp()).map(|c| g.comp(c)[p].norm_sqr()).sum();
        peak = peak.max(s);
    }
    let peak = peak.sqrt();
    if !peak.is_finite() {
        return Err(Error::NonFinite("velocity".into()));
    }
    if peak > 0.0 {
        let limit = cfl * u.lattice().min_spacing() / peak;
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
    }
    Ok(())
}

pub(crate) fn check_finite(norm: f64, what: &str) -> Result<()> {
    if norm.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what.into()))
    }
}
