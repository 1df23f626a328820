mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use commands::Failure;
use config::{Overrides, RunConfig};
use slspec::BoundaryCondition;
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectra of Sturm–Liouville operators with distributional potentials, and
/// numerical checks of their asymptotics.
#[derive(Parser, Debug)]
#[command(name = "slspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues for a potential or an ensemble.
    Solve(Common),
    /// Galerkin reference spectra, compared with the shooting solvers.
    Oracle(Common),
    /// Run a verification suite chosen by the config's "theorem" field.
    Verify(Common),
    /// Remainder norms over a random ensemble.
    Ensemble(Common),
    /// Expansion of the sine-type solution against quadrature.
    Expand(Common),
    /// Eigenvalue derivatives and eigenfunction gaps.
    Sensitivity(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// dirichlet, dirichlet_neumann or both.
    #[arg(long)]
    bc: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "SLSPEC_JOBS")]
    jobs: Option<usize>,
}

fn parse_bc(s: &str) -> Result<Vec<BoundaryCondition>, String> {
    if s == "both" {
        return Ok(vec![BoundaryCondition::Dirichlet, BoundaryCondition::DirichletNeumann]);
    }
    s.split(',').map(|p| p.trim().parse::<BoundaryCondition>().map_err(|e| e.to_string())).collect()
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&common.config).map_err(Failure::Config)?;
    let bc = common.bc.as_deref().map(parse_bc).transpose().map_err(Failure::Config)?;
    cfg.apply(&Overrides { n_max: common.nmax, out: common.out.clone(), bc, seed: common.seed });
    cfg.validate().map_err(Failure::Config)?;
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, body): (&Common, fn(&RunConfig) -> Result<(), Failure>) = match &cli.command {
        Command::Solve(c) => (c, commands::solve),
        Command::Oracle(c) => (c, commands::oracle),
        Command::Verify(c) => (c, commands::verify),
        Command::Ensemble(c) => (c, commands::ensemble),
        Command::Expand(c) => (c, commands::expand),
        Command::Sensitivity(c) => (c, commands::sensitivity),
    };
    let cfg = load(common)?;
    body(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("slspec: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
