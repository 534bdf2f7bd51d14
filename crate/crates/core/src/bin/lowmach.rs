use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use lowmach::experiments::{
    convergence_study, initial_data, invariant_checks, require, resonance_table, ExperimentConfig, Trend,
};
use lowmach::littlewood_paley::{norm, NormSpec};
use lowmach::operators::{acoustic_transform, helmholtz_project, Projection};
use lowmach::resonance::small_divisors;
use lowmach::solvers::{
    Checkpoint, CompressibleSolver, CompressibleState, Evolution, IncompressibleSolver, Interpolant, LimitSolver,
    StateKind,
};
use lowmach::{Error, Result};

/// Low-Mach compressible flows on periodic boxes: simulation, limit
/// systems, dyadic norms and Mach-number sweeps.
#[derive(Parser)]
#[command(name = "lowmach", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of the initial data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Comma-separated Mach numbers; overrides the configured list.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Worker threads for the Mach-number sweep.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compressible run at one Mach number.
    Simulate {
        /// Continue from a compressible checkpoint.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Incompressible and averaged acoustic runs.
    LimitSim,
    /// Resonance table and small divisors.
    Resonances {
        /// Table radius; defaults to the configured cutoff.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Norms of a checkpointed field.
    Norms {
        field: PathBuf,
        /// Norm specification such as `B:s=1:p=2:r=1:band=h:eta=32`.
        #[arg(long = "spec", required = true)]
        specs: Vec<String>,
    },
    /// Full Mach-number sweep with report.
    Converge,
    /// Invariant suite on the configured lattice.
    Check,
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let path = common.config.as_ref().ok_or_else(|| Error::Argument("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(eps) = &common.eps {
        cfg.eps = eps.clone();
    }
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn simulate(common: &Common, restart: Option<&Path>) -> Result<()> {
    let cfg = load(common)?;
    cfg.validate()?;
    if cfg.eps.len() != 1 && common.eps.is_some() {
        return Err(Error::Argument("simulate takes a single Mach number".into()));
    }
    let eps = cfg.eps[0];
    let lat = cfg.lattice.build()?;
    let mut solver_cfg = cfg.solver.clone();
    solver_cfg.eps = eps;
    solver_cfg.samples = cfg.samples;
    let solver = CompressibleSolver::new(&lat, solver_cfg)?;
    let (start, state) = match restart {
        Some(path) => {
            let ck = Checkpoint::read(path, Some(&lat))?;
            if ck.header.kind != StateKind::Compressible || ck.header.eps != Some(eps) {
                return Err(Error::Argument(format!("{} is not a compressible state at eps = {eps}", path.display())));
            }
            (ck.header.step, CompressibleState::from_stacked(&ck.field)?)
        }
        None => (0, initial_data(&cfg, &lat)?),
    };
    let stride = solver.time_grid().stride;
    let samples = solver.run_from(&state, start)?;
    std::fs::create_dir_all(&common.out)?;
    let mut series = String::from("t,l2,eps_max_a,density_mean\n");
    for (i, (t, y)) in samples.iter().enumerate() {
        let max_a = lowmach::torus::inverse_transform(&y.density).max_norm();
        writeln!(series, "{t},{},{},{}", y.l2_norm(), eps * max_a, y.density.comp(0)[0].norm()).unwrap();
        let mut ck = Checkpoint::new(StateKind::Compressible, *t, start + i * stride, y.stacked());
        ck.header.eps = Some(eps);
        ck.header.seed = Some(cfg.seed);
        ck.write(&common.out.join(format!("state_{:04}.lmck", ck.header.step / stride)))?;
    }
    write(&common.out.join("series.csv"), &series)
}

fn limit_sim(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    cfg.validate()?;
    let lat = cfg.lattice.build()?;
    let initial = initial_data(&cfg, &lat)?;
    let table = Arc::new(resonance_table(&cfg, &lat)?);
    let mut solver_cfg = cfg.solver.clone();
    solver_cfg.dt = cfg.reference_dt();
    solver_cfg.samples = cfg.samples;
    let v0 = helmholtz_project(&initial.velocity, Projection::P)?;
    let incompressible = IncompressibleSolver::new(&lat, solver_cfg.clone())?;
    // the averaged solver reads v at every step, so keep all of them
    let mut dense_cfg = solver_cfg.clone();
    dense_cfg.samples = incompressible.time_grid().steps;
    let v = IncompressibleSolver::new(&lat, dense_cfg.clone())?.run(&v0)?;
    let w0 = acoustic_transform(&initial.density, &initial.potential()?)?;
    let limit = LimitSolver::new(table, Arc::new(Interpolant::new(v.clone())), dense_cfg)?;
    let big_v = limit.run(&w0)?;
    std::fs::create_dir_all(&common.out)?;
    let stride = incompressible.time_grid().stride;
    let mut series = String::from("t,velocity_l2,acoustic_l2\n");
    for (i, j) in (0..v.len()).step_by(stride).enumerate() {
        let t = v.times()[j];
        writeln!(series, "{t},{},{}", v.states()[j].l2_norm(), big_v.states()[j].l2_norm()).unwrap();
        let mut ck = Checkpoint::new(StateKind::Incompressible, t, j, v.states()[j].clone());
        ck.header.seed = Some(cfg.seed);
        ck.write(&common.out.join(format!("velocity_{i:04}.lmck")))?;
        let mut ck = Checkpoint::new(StateKind::Acoustic, t, j, big_v.states()[j].as_branches());
        ck.header.seed = Some(cfg.seed);
        ck.write(&common.out.join(format!("acoustic_{i:04}.lmck")))?;
    }
    write(&common.out.join("limit_series.csv"), &series)
}

fn resonances(common: &Common, cutoff: Option<f64>) -> Result<()> {
    let mut cfg = load(common)?;
    if cutoff.is_some() {
        cfg.cutoff = cutoff;
    }
    cfg.cache_dir = Some(common.out.clone());
    let lat = cfg.lattice.build()?;
    let table = resonance_table(&cfg, &lat)?;
    let divisors = small_divisors(&lat, table.cutoff())?;
    write(&common.out.join("small_divisors.json"), &serde_json::to_string_pretty(&divisors)?)?;
    println!(
        "cutoff {}: {} velocity triples, {} acoustic triples; small divisors {:.6e} / {:.6e}",
        table.cutoff(),
        table.velocity().len(),
        table.acoustic().len(),
        divisors.velocity,
        divisors.acoustic
    );
    Ok(())
}

fn norms(common: &Common, field: &Path, specs: &[String]) -> Result<()> {
    let ck = Checkpoint::read(field, None)?;
    let mut table = String::from("spec,value\n");
    for text in specs {
        let spec: NormSpec = text.parse()?;
        writeln!(table, "{spec},{}", norm(&ck.field, &spec)?).unwrap();
    }
    print!("{table}");
    write(&common.out.join("norms.csv"), &table)
}

fn converge(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let report = convergence_study(&cfg)?;
    report.write(&common.out)?;
    match report.slope {
        Some(s) => println!("slope of log W_theta against log eps: {s:.4}"),
        None => println!("slope of log W_theta against log eps: insufficient data"),
    }
    for (q, t) in &report.trends {
        let verdict = match t {
            Trend::Decreasing => "decreasing".to_string(),
            Trend::NotDecreasing { at } => format!("not decreasing (at eps = {})", report.rows[*at].eps),
            Trend::InsufficientData => "insufficient data".to_string(),
        };
        println!("{q}: {verdict}");
    }
    for v in &report.vanishing {
        println!("vanishing {}: {} ({:.4e} -> {:.4e})", v.quantity, if v.pass { "pass" } else { "fail" }, v.first, v.last);
    }
    Ok(())
}

fn check(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let outcomes = invariant_checks(&cfg)?;
    for c in &outcomes {
        println!("{:<22} {:>11.3e} (tolerance {:.0e}) {}", c.name, c.value, c.tolerance, if c.pass() { "ok" } else { "FAILED" });
    }
    require(&outcomes)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    }
    let c = &cli.common;
    match &cli.command {
        Command::Simulate { restart } => simulate(c, restart.as_deref()),
        Command::LimitSim => limit_sim(c),
        Command::Resonances { cutoff } => resonances(c, *cutoff),
        Command::Norms { field, specs } => norms(c, field, specs),
        Command::Converge => converge(c),
        Command::Check => check(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // exit code 2 is reserved for invariant failures
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
