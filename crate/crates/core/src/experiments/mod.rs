//! Energy functionals along trajectories, Mach-number sweeps and their
//! reports.
//!
//! A sweep solves the incompressible and averaged systems once, then the
//! compressible system for each Mach number, and measures the distance
//! between them with banded Chemin-Lerner norms. Thresholds: `zeta`
//! separates low from medium frequencies, `eta0 / eps` medium from high.

mod checks;
mod config;
mod functionals;
mod report;
mod study;

pub use checks::{invariant_checks, require, CheckOutcome};
pub use config::{ExperimentConfig, CONFIG_SCHEMA};
pub use functionals::{
    bridge_check, bridge_constant, compute_functionals, triangle_check, FlowSamples, FunctionalParams, Functionals,
    ReferenceSamples, FUNCTIONAL_NAMES,
};
pub use report::{long_csv, wide_csv, ConvergenceReport, DiagnosticsRow, REPORT_SCHEMA};
pub use study::{
    compressible_run, convergence_study, diagnostic_times, initial_data, log_log_slope, reference_run,
    resonance_table, summarize, trend, vanishing_limit_check, Trend, VanishingVerdict, MONOTONE_QUANTITIES,
    VANISHING_QUANTITIES,
};
