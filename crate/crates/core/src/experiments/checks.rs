use serde::Serialize;

use super::config::ExperimentConfig;
use super::study::{compressible_run, initial_data};
use crate::littlewood_paley::{norm, NormSpec};
use crate::operators::{helmholtz_project, Projection};
use crate::solvers::{Evolution, IncompressibleSolver};
use crate::torus::{forward_transform, inverse_transform, spectral_derivative, DerivativeKind, SpectralField};
use crate::{Error, Result};

/// One measured defect against its tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.value <= self.tolerance
    }
}

/// Invariants of the configured lattice and of a compressible run at the
/// largest Mach number: transform round trip and Parseval on the initial
/// data, conservation of the density mean, reality, the filtered isometry,
/// and incompressibility of the limit velocity.
pub fn invariant_checks(cfg: &ExperimentConfig) -> Result<Vec<CheckOutcome>> {
    cfg.validate()?;
    let lat = cfg.lattice.build()?;
    let initial = initial_data(cfg, &lat)?;
    let u0 = &initial.velocity;
    let grid = inverse_transform(u0);
    let back = forward_transform(&grid)?;
    let round_trip = back.sub(u0)?.max_abs() / u0.max_abs();
    let grid_energy: f64 = (0..grid.ncomp()).flat_map(|c| grid.comp(c).iter().map(|z| z.norm_sqr())).sum::<f64>()
        * lat.volume()
        / lat.len() as f64;
    let parseval = (grid_energy.sqrt() - u0.l2_norm()).abs() / u0.l2_norm();

    let eps = cfg.eps[0];
    let traj = compressible_run(cfg, &initial, eps)?;
    let s = lat.dim() as f64 / 2.0;
    let (mut mean, mut reality, mut isometry) = (0.0f64, 0.0f64, 0.0f64);
    for (t, y) in traj.times().iter().zip(traj.states()) {
        mean = mean.max(y.density.comp(0)[0].norm());
        reality = reality.max(y.density.reality_defect()).max(y.velocity.reality_defect());
        let pair = SpectralField::stack(&[&y.density, &y.potential()?])?;
        let direct = norm(&pair, &NormSpec::sobolev(s))?;
        let filtered = norm(&y.filtered(*t, eps)?.to_state(), &NormSpec::sobolev(s))?;
        isometry = isometry.max((filtered - direct).abs() / direct.max(f64::MIN_POSITIVE));
    }

    let v0 = helmholtz_project(u0, Projection::P)?;
    let v = IncompressibleSolver::new(&lat, cfg.solver.clone())?.run(&v0)?;
    let divergence = v
        .states()
        .iter()
        .map(|w| Ok(spectral_derivative(w, DerivativeKind::Divergence)?.max_abs() / w.max_abs().max(f64::MIN_POSITIVE)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(vec![
        CheckOutcome { name: "transform round trip", value: round_trip, tolerance: 1e-12 },
        CheckOutcome { name: "Parseval", value: parseval, tolerance: 1e-12 },
        CheckOutcome { name: "density mean", value: mean, tolerance: 1e-13 },
        CheckOutcome { name: "reality", value: reality, tolerance: 1e-12 },
        CheckOutcome { name: "filtered isometry", value: isometry, tolerance: 1e-12 },
        CheckOutcome { name: "incompressibility", value: divergence, tolerance: 1e-12 },
    ])
}

/// `Error::Invariant` naming every failed check.
pub fn require(outcomes: &[CheckOutcome]) -> Result<()> {
    let failed: Vec<String> =
        outcomes.iter().filter(|c| !c.pass()).map(|c| format!("{} = {:e} > {:e}", c.name, c.value, c.tolerance)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(failed.join("; ")))
    }
}
