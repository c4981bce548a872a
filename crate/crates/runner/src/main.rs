//! `mems`: run one named experiment and leave a reproducible record.
//!
//! Exit status: 0 when every check passed or was skipped, 1 when a check
//! failed, 2 for usage, config, or I/O problems that prevented a run.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mems_runner::config::ExperimentConfig;
use mems_runner::record::{ResultRecord, Verdict};
use mems_runner::{experiments, Error};

#[derive(Parser)]
#[command(
    name = "mems",
    version,
    about = "Numerical laboratory for a parabolic nonlocal MEMS membrane equation",
    after_help = "Every experiment reads the same TOML schema; keys it does not use are \
ignored. `--override key.path=value` edits any key in place, e.g. \
`--override domain.cells=256 --override params.lambda=0.7`. Set MEMS_THREADS \
to cap sweep concurrency. Exit status is 0 only if every recorded check \
passed or was skipped."
)]
struct Cli {
    /// List the experiments and exit.
    #[arg(long)]
    list: bool,

    #[command(subcommand)]
    experiment: Option<Experiment>,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output root; results land in <DIR>/<experiment>/. Defaults to the
    /// config's output.dir.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Override one config key (repeatable), e.g. --override evolve.dt=5e-4
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Continue the local minimal branch to the pull-in fold
    #[command(long_about = "Continue the local minimal branch to the pull-in fold.\n\n\
Follows the branch of -Laplacian w = lambda/(1-w)^2 from lambda = 0 to the \
fold, recording sup w and the linearized stability eigenvalue per point, \
and brackets the pull-in voltage lambda* to four digits.\n\n\
Config keys: domain.kind (\"interval\" or \"ball\"), domain.size, \
domain.dim (ball only), domain.cells. Writes branch.csv, bifurcation.svg \
with the fold marked, and record.json.")]
    SteadyBranch(RunArgs),

    /// Solve the scalar reduction of the nonlocal steady problem
    #[command(long_about = "Solve the scalar reduction of the nonlocal steady problem.\n\n\
Finds the equivalent local voltage mu with mu (1 + chi C(w_mu))^2 = lambda \
on the minimal branch and reports the root, its residual, the deflection \
profile, and the capacitance integral.\n\n\
Config keys: domain.*, params.chi, params.lambda. Writes record.json.")]
    NonlocalSteady(RunArgs),

    /// Existence and nonexistence voltage thresholds for one (domain, chi)
    #[command(long_about = "Existence and nonexistence voltage thresholds for one (domain, chi).\n\n\
Computes the guaranteed-existence corner lambda* (1 + chi |Omega|)^2, the \
fold of the nonlocal branch, the observed onset of nonexistence, and (on \
balls of dimension >= 2) the closed-form convex upper bound, then checks \
they are ordered.\n\n\
Config keys: domain.*, params.chi. Writes record.json.")]
    Thresholds(RunArgs),

    /// Time-step the nonlocal equation with quench detection
    #[command(long_about = "Time-step the nonlocal equation with quench detection.\n\n\
IMEX evolution from the configured initial state until steady state, \
touchdown, or t_max. Records sup u and the energy series, flags quenching \
with a bracketed touchdown time, and checks monotonicity from rest.\n\n\
Config keys: domain.*, params.chi, params.lambda, u0.kind (\"zero\", \
\"scaled-eigenfunction\" with c, \"steady-profile\" with mu, or \"file\" \
with path), evolve.dt, evolve.t_max, evolve.stride, evolve.quench_tol, \
evolve.steady_tol. Writes series.csv, sup_u.svg, energy.svg, record.json.")]
    Evolve(RunArgs),

    /// Iterate the integral form on its guaranteed existence window
    #[command(long_about = "Iterate the integral form on its guaranteed existence window.\n\n\
Runs the heat-semigroup Picard iteration on [0, (1-a)^3/(16 lambda)] where \
a = sup u0 < 1, checks the (1+a)/2 ceiling, convergence on the window, and \
that nonlocal iterates stay below their local (chi = 0) majorants.\n\n\
Config keys: domain.*, params.chi, params.lambda, u0.*. Writes series.csv \
for the converged iterate, sup_u.svg, record.json.")]
    Picard(RunArgs),

    /// Lyapunov ledger and a priori bounds of one evolution
    #[command(long_about = "Lyapunov ledger and a priori bounds of one evolution.\n\n\
Evolves the configured run, accumulates dissipation + Dirichlet + nonlocal \
potential per sample, and checks the total stays constant and the \
dissipation is nondecreasing. On intervals started from rest it also \
verifies the closed-form sup and gradient-energy bounds.\n\n\
Config keys: domain.*, params.chi (> 0 when lambda > 0), params.lambda, \
u0.*, evolve.*. Writes series.csv, energy.svg, record.json.")]
    Energy(RunArgs),

    /// Touchdown times across a list of voltages, with a fit
    #[command(long_about = "Touchdown times across a list of voltages, with a fit.\n\n\
Evolves one run per entry of params.lambdas (in parallel, capped by \
MEMS_THREADS), records which quenched and when, checks touchdown times \
fall as the voltage rises, and fits T = c3/(lambda - lambda0).\n\n\
Config keys: domain.*, params.chi, params.lambdas (required, strictly \
increasing), u0.*, evolve.*. Writes sweep.csv, tquench.svg with the fit \
overlaid, record.json.")]
    QuenchSweep(RunArgs),

    /// Run the full acceptance suite, one verdict per criterion
    #[command(long_about = "Run the full acceptance suite, one verdict per criterion.\n\n\
Eleven fixed gates: closed-form eigenvalues, the shooting-method fold \
oracle, randomized steady solves with refinement-order checks, threshold \
ordering, the energy ledger, Picard vs stepper, global convergence, \
invariant sandwiches, quench dynamics, initial-data stability, and bitwise \
determinism of the pipeline. Ignores params and u0; only output.dir (or \
--out) matters. Writes record.json with one check per criterion.")]
    VerifyAll(RunArgs),
}

impl Experiment {
    fn parts(&self) -> (&'static str, &RunArgs) {
        match self {
            Experiment::SteadyBranch(a) => ("steady-branch", a),
            Experiment::NonlocalSteady(a) => ("nonlocal-steady", a),
            Experiment::Thresholds(a) => ("thresholds", a),
            Experiment::Evolve(a) => ("evolve", a),
            Experiment::Picard(a) => ("picard", a),
            Experiment::Energy(a) => ("energy", a),
            Experiment::QuenchSweep(a) => ("quench-sweep", a),
            Experiment::VerifyAll(a) => ("verify-all", a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for (name, summary) in experiments::EXPERIMENTS {
            println!("{name:<16} {summary}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(experiment) = cli.experiment else {
        eprintln!("no experiment named; `mems --list` shows the choices");
        return ExitCode::from(2);
    };
    match run(&experiment) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(experiment: &Experiment) -> mems_runner::Result<bool> {
    init_threads()?;
    let (name, args) = experiment.parts();
    let base = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = base.with_overrides(&args.overrides)?;
    let out_root = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());

    let rec = experiments::run(name, &cfg, &out_root)?;
    print_record(name, &out_root, &rec);
    Ok(!rec.any_fail())
}

fn print_record(name: &str, out_root: &std::path::Path, rec: &ResultRecord) {
    println!("{name} -> {}", out_root.join(name).display());
    for (key, scalar) in &rec.scalars {
        println!("  {key} = {}  ({})", scalar.value, scalar.note);
    }
    for check in &rec.checks {
        match &check.verdict {
            Verdict::Pass => {
                println!("  pass  {}", check.name);
                if let Some(note) = &check.note {
                    println!("        {note}");
                }
            }
            Verdict::Fail { reason } => println!("  FAIL  {}: {reason}", check.name),
            Verdict::Skipped { reason } => println!("  skip  {}: {reason}", check.name),
        }
    }
    let status = if rec.any_fail() { "FAIL" } else { "ok" };
    println!("  => {status}");
}

/// Honors MEMS_THREADS by sizing the global worker pool before any solver
/// runs; unset means one worker per core.
fn init_threads() -> mems_runner::Result<()> {
    let Ok(raw) = std::env::var("MEMS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("MEMS_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool setup failed: {e}")))?;
    Ok(())
}
