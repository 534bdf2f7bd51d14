//! Python access to the low-Mach toolkit. Configurations and reports cross
//! the boundary as JSON text, the same schema the command line reads.

use std::path::PathBuf;
use std::sync::Arc;

use lowmach::experiments::{convergence_study, initial_data, invariant_checks, resonance_table, wide_csv, ConvergenceReport, ExperimentConfig};
use lowmach::littlewood_paley::{norm as dyadic_norm, NormSpec};
use lowmach::resonance::small_divisors;
use lowmach::solvers::{Checkpoint, CompressibleSolver, Evolution};
use lowmach::Error;
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Vacuum(_) | Error::Cfl { .. } | Error::NonFinite(_) => PyArithmeticError::new_err(e.to_string()),
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn config(text: &str) -> PyResult<ExperimentConfig> {
    ExperimentConfig::from_json(text).map_err(to_py)
}

/// Validates a configuration; returns its warnings.
#[pyfunction]
fn validate(config_json: &str) -> PyResult<Vec<String>> {
    config(config_json)?.validate().map_err(to_py)
}

/// Runs the Mach-number sweep; returns the report as JSON.
#[pyfunction]
fn converge(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = config(config_json)?;
    py.detach(|| convergence_study(&cfg).and_then(|r| r.to_json())).map_err(to_py)
}

/// Diagnostics table of a JSON report: `eps,T` then the functionals.
#[pyfunction]
fn report_csv(report_json: &str) -> PyResult<String> {
    Ok(wide_csv(&ConvergenceReport::from_json(report_json).map_err(to_py)?.rows))
}

/// Compressible run from the configured initial data at Mach number
/// `eps` (default: first configured value). Returns `(t, L2 norm)` per
/// sample.
#[pyfunction]
#[pyo3(signature = (config_json, eps=None))]
fn simulate(py: Python<'_>, config_json: &str, eps: Option<f64>) -> PyResult<Vec<(f64, f64)>> {
    let mut cfg = config(config_json)?;
    if let Some(e) = eps {
        cfg.eps = vec![e];
    }
    py.detach(|| {
        cfg.validate()?;
        let lat = cfg.lattice.build()?;
        let mut solver = cfg.solver.clone();
        solver.eps = cfg.eps[0];
        solver.samples = cfg.samples;
        let traj = CompressibleSolver::new(&lat, solver)?.run(&initial_data(&cfg, &lat)?)?;
        Ok(traj.times().iter().zip(traj.states()).map(|(t, y)| (*t, y.l2_norm())).collect())
    })
    .map_err(to_py)
}

/// Invariant suite: `(name, defect, tolerance, passed)` per check.
#[pyfunction]
fn check(py: Python<'_>, config_json: &str) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let cfg = config(config_json)?;
    let outcomes = py.detach(|| invariant_checks(&cfg)).map_err(to_py)?;
    Ok(outcomes.into_iter().map(|c| (c.name.to_string(), c.value, c.tolerance, c.pass())).collect())
}

/// Norm of a checkpointed field, e.g. `B:s=1:p=2:r=1:band=h:eta=32`.
#[pyfunction]
fn norm(path: PathBuf, spec: &str) -> PyResult<f64> {
    let spec: NormSpec = spec.parse().map_err(to_py)?;
    let ck = Checkpoint::read(&path, None).map_err(to_py)?;
    dyadic_norm(&ck.field, &spec).map_err(to_py)
}

/// Resonance counts and small divisors up to the configured radius:
/// `(velocity triples, acoustic triples, velocity divisor, acoustic divisor)`.
#[pyfunction]
fn resonances(py: Python<'_>, config_json: &str) -> PyResult<(usize, usize, f64, f64)> {
    let cfg = config(config_json)?;
    py.detach(|| {
        let lat = cfg.lattice.build()?;
        let table = Arc::new(resonance_table(&cfg, &lat)?);
        let d = small_divisors(&lat, table.cutoff())?;
        Ok((table.velocity().len(), table.acoustic().len(), d.velocity, d.acoustic))
    })
    .map_err(to_py)
}

#[pymodule]
fn lowmach_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(converge, m)?)?;
    m.add_function(wrap_pyfunction!(report_csv, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(resonances, m)?)?;
    Ok(())
}
