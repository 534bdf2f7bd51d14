use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::functionals::{
    bridge_check, compute_functionals, triangle_check, FlowSamples, FunctionalParams, Functionals, ReferenceSamples,
};
use super::report::{ConvergenceReport, DiagnosticsRow};
use crate::operators::{acoustic_transform, helmholtz_project, Projection};
use crate::resonance::{enumerate_resonance_sets, ResonanceTable};
use crate::solvers::{
    generate_initial_data, CompressibleSolver, CompressibleState, Evolution, IncompressibleSolver, Interpolant,
    LimitSolver, TimeGrid,
};
use crate::torus::{Lattice, SpectralField};
use crate::trajectory::Trajectory;
use crate::{Error, Result};

/// Tolerance for comparisons that hold exactly in real arithmetic.
const ROUNDOFF: f64 = 1e-12;

/// Shared diagnostic times `T j / samples`.
pub fn diagnostic_times(horizon: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|j| horizon * j as f64 / samples as f64).collect()
}

/// Resonance table for the configured radius, through the cache when one
/// is configured.
pub fn resonance_table(cfg: &ExperimentConfig, lat: &Arc<Lattice>) -> Result<ResonanceTable> {
    let cutoff = cfg.cutoff.unwrap_or_else(|| lat.kmax());
    match &cfg.cache_dir {
        Some(dir) => ResonanceTable::load_or_build(dir, lat, cutoff),
        None => enumerate_resonance_sets(lat, cutoff),
    }
}

/// The seeded initial data of a configuration.
pub fn initial_data(cfg: &ExperimentConfig, lat: &Arc<Lattice>) -> Result<CompressibleState> {
    let (a, u) = generate_initial_data(lat, cfg.amplitude_density, cfg.amplitude_velocity, cfg.smoothness, cfg.seed)?;
    CompressibleState::new(a, u)
}

/// Every `stride`-th state, relabelled with the diagnostic times.
fn resample<S: Clone>(traj: &Trajectory<S>, stride: usize, times: &[f64]) -> Result<Trajectory<S>> {
    let states = (0..times.len()).map(|j| traj.states()[j * stride].clone()).collect();
    Trajectory::new(times.to_vec(), states)
}

/// Incompressible and averaged solutions from the initial data, sampled
/// on the diagnostic grid. Both solvers step on the same grid so the
/// averaged solver reads `v` at its own nodes.
pub fn reference_run(cfg: &ExperimentConfig, initial: &CompressibleState, table: Arc<ResonanceTable>) -> Result<ReferenceSamples> {
    let lat = initial.lattice().clone();
    let horizon = cfg.solver.horizon;
    let grid = TimeGrid::new(horizon, cfg.reference_dt(), cfg.samples);
    let mut solver = cfg.solver.clone();
    solver.dt = cfg.reference_dt();
    solver.samples = grid.steps;

    let v0 = helmholtz_project(&initial.velocity, Projection::P)?;
    let v = IncompressibleSolver::new(&lat, solver.clone())?.run(&v0)?;
    let w0 = acoustic_transform(&initial.density, &initial.potential()?)?;
    let big_v = LimitSolver::new(table, Arc::new(Interpolant::new(v.clone())), solver)?.run(&w0)?;

    let times = diagnostic_times(horizon, cfg.samples);
    ReferenceSamples::new(resample(&v, grid.stride, &times)?, &resample(&big_v, grid.stride, &times)?)
}

/// One compressible run at Mach number `eps`, sampled on the diagnostic
/// grid.
pub fn compressible_run(cfg: &ExperimentConfig, initial: &CompressibleState, eps: f64) -> Result<Trajectory<CompressibleState>> {
    let mut solver = cfg.solver.clone();
    solver.eps = eps;
    solver.samples = cfg.samples;
    CompressibleSolver::new(initial.lattice(), solver)?.run(initial)
}

/// Functionals of one member at `T` and at `T/2`; the second must not
/// exceed the first since every functional is a supremum or an integral in
/// time.
fn member(
    cfg: &ExperimentConfig,
    traj: &Trajectory<CompressibleState>,
    reference: &ReferenceSamples,
    eps: f64,
) -> Result<Functionals> {
    let times = diagnostic_times(cfg.solver.horizon, cfg.samples);
    let params = FunctionalParams { eps, zeta: cfg.zeta, eta0: cfg.eta0(), theta: cfg.theta };
    let flow = FlowSamples::new(traj, &times, eps)?;
    let full = compute_functionals(&flow, reference, &params)?;
    check_relations(traj.states()[0].lattice(), &full, &params)?;

    if cfg.samples >= 2 {
        let half = cfg.solver.horizon * (cfg.samples / 2) as f64 / cfg.samples as f64;
        let cut = |t: &Trajectory<SpectralField>| t.truncate(half);
        let early_flow = FlowSamples {
            density: cut(&flow.density),
            potential: cut(&flow.potential),
            solenoidal: cut(&flow.solenoidal),
            acoustic: cut(&flow.acoustic),
            filtered: cut(&flow.filtered),
            tail: FlowSamples::new(&traj.truncate(half), &times[..cfg.samples / 2 + 1], eps)?.tail,
        };
        let early_ref =
            ReferenceSamples { velocity: cut(&reference.velocity), acoustic: cut(&reference.acoustic) };
        let early = compute_functionals(&early_flow, &early_ref, &params)?;
        for (k, late) in &full.values {
            let e = early.values[k];
            if e > late + ROUNDOFF * late.max(1.0) {
                return Err(Error::Invariant(format!("{k} decreased in time: {e} at T/2, {late} at T (eps {eps})")));
            }
        }
    }
    Ok(full)
}

fn check_relations(lat: &Arc<Lattice>, f: &Functionals, p: &FunctionalParams) -> Result<()> {
    let (lhs, rhs) = bridge_check(lat, f, p);
    if lhs > rhs * (1.0 + ROUNDOFF) + ROUNDOFF {
        return Err(Error::Invariant(format!("low-frequency bridge fails: {lhs} > {rhs}")));
    }
    let (y, bound) = triangle_check(f);
    if y > bound * (1.0 + ROUNDOFF) + ROUNDOFF {
        return Err(Error::Invariant(format!("Y = {y} exceeds D + low reference norms = {bound}")));
    }
    Ok(())
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than
/// two usable points.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        x.iter().zip(y).filter(|(a, b)| **a > 0.0 && **b > 0.0).map(|(a, b)| (a.ln(), b.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    /// Strictly decreasing as `eps` decreases.
    Decreasing,
    /// Fails first at this position of the sweep.
    NotDecreasing { at: usize },
    InsufficientData,
}

/// Trend of a sequence listed in sweep order (decreasing `eps`).
pub fn trend(values: &[f64]) -> Trend {
    if values.len() < 2 {
        return Trend::InsufficientData;
    }
    match values.windows(2).position(|w| !(w[1] < w[0])) {
        None => Trend::Decreasing,
        Some(i) => Trend::NotDecreasing { at: i + 1 },
    }
}

/// Quantities whose monotone decay in `eps` the study reports.
pub const MONOTONE_QUANTITIES: [&str; 5] = ["D", "Pu_diff", "V_diff", "W_theta", "eps_a"];

/// Quantities that tend to zero with `eps`.
pub const VANISHING_QUANTITIES: [&str; 3] = ["Pu_diff", "V_diff", "eps_a"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingVerdict {
    pub quantity: String,
    pub pass: bool,
    pub first: f64,
    pub last: f64,
    pub trend: Trend,
}

/// Each vanishing quantity must decrease strictly along the sweep and end
/// below `fraction` of its first value.
pub fn vanishing_limit_check(rows: &[DiagnosticsRow], fraction: f64) -> Vec<VanishingVerdict> {
    VANISHING_QUANTITIES
        .iter()
        .map(|&q| {
            let vals: Vec<f64> = rows.iter().map(|r| r.values.get(q).copied().unwrap_or(f64::NAN)).collect();
            let tr = trend(&vals);
            let (first, last) = (vals.first().copied().unwrap_or(f64::NAN), vals.last().copied().unwrap_or(f64::NAN));
            VanishingVerdict {
                quantity: q.to_string(),
                pass: tr == Trend::Decreasing && last < fraction * first,
                first,
                last,
                trend: tr,
            }
        })
        .collect()
}

/// Slope and monotonicity verdicts from finished rows.
pub fn summarize(cfg: &ExperimentConfig, rows: Vec<DiagnosticsRow>, warnings: Vec<String>) -> ConvergenceReport {
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let col = |q: &str| rows.iter().map(|r| r.values[q]).collect::<Vec<f64>>();
    let slope = log_log_slope(&eps, &col("W_theta"));
    let trends: BTreeMap<String, Trend> = MONOTONE_QUANTITIES.iter().map(|&q| (q.to_string(), trend(&col(q)))).collect();
    let vanishing = vanishing_limit_check(&rows, cfg.vanishing_fraction);
    ConvergenceReport::new(cfg.clone(), rows, slope, trends, vanishing, warnings)
}

/// Full sweep: one reference run, then every Mach number in parallel.
/// Rows come back in sweep order whatever the scheduling.
pub fn convergence_study(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let warnings = cfg.validate()?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let lat = cfg.lattice.build()?;
    let initial = initial_data(cfg, &lat)?;
    let table = Arc::new(resonance_table(cfg, &lat)?);
    let reference = reference_run(cfg, &initial, table)?;
    let rows = cfg
        .eps
        .par_iter()
        .map(|&eps| {
            let start = Instant::now();
            let traj = compressible_run(cfg, &initial, eps)?;
            let f = member(cfg, &traj, &reference, eps)?;
            log::info!("eps = {eps}: W_theta = {:.4e}, D = {:.4e}", f.values["W_theta"], f.values["D"]);
            Ok(DiagnosticsRow {
                eps,
                horizon: cfg.solver.horizon,
                values: f.values,
                wall_time: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(cfg, rows, warnings))
}
