use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symbif::cache::LatticeOrigin;
use symbif::commands::{critical, invariants, spectrum, verify};
use symbif::{AlphaSpec, CliError, OutputFormat, Report, RunConfig};

/// Hessian spectra, critical leaky parameters and equivariant bifurcation
/// invariants for the leaky-ReLU teacher-student model.
#[derive(Parser, Debug)]
#[command(name = "symbif", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: OutputFormat,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Directory for cached subgroup lattices.
    #[arg(long, global = true, env = "SYMBIF_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form spectrum of the Hessian at the minimum, matched against a dense eigensolve.
    Spectrum {
        /// Network width, at least 4.
        #[arg(long)]
        k: usize,
        /// Single leaky parameter.
        #[arg(long, conflicts_with = "alpha_grid", allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Grid `start:stop:points`; default `0:3.5:11`.
        #[arg(long, value_parser = AlphaSpec::parse_grid, allow_hyphen_values = true)]
        alpha_grid: Option<AlphaSpec>,
        /// Add 1e-3 to one Hessian entry before matching.
        #[arg(long)]
        inject_hessian_perturbation: bool,
    },
    /// Critical leaky parameters, ordering and residuals.
    Critical {
        /// Network width, at least 4.
        #[arg(long)]
        k: usize,
    },
    /// Basic degrees and bifurcation invariants in the Burnside ring (4 <= k <= 6).
    Invariants {
        /// Network width, 4 to 6.
        #[arg(long)]
        k: usize,
    },
    /// Oracle checks; hard failures give exit code 1.
    Verify {
        /// Single width; default runs k = 4 and k = 5.
        #[arg(long)]
        k: Option<usize>,
        /// Monte-Carlo samples per kernel trial.
        #[arg(long, default_value_t = 100_000)]
        mc_samples: usize,
        /// Monte-Carlo kernel trials.
        #[arg(long, default_value_t = 1000)]
        mc_trials: usize,
        /// Seed for every random draw.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add 1e-3 to one Hessian entry in the spectrum sweep.
        #[arg(long)]
        inject_hessian_perturbation: bool,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig { output: cli.common.output, cache_dir: cli.common.cache_dir.clone(), ..RunConfig::default() };
    cfg.tolerances.apply(&cli.common.tol)?;
    match &cli.command {
        Command::Spectrum { k, alpha, alpha_grid, inject_hessian_perturbation } => {
            cfg.k = Some(*k);
            cfg.alpha = alpha.map(AlphaSpec::Single).or_else(|| alpha_grid.clone());
            cfg.inject_hessian_perturbation = *inject_hessian_perturbation;
        }
        Command::Critical { k } | Command::Invariants { k } => cfg.k = Some(*k),
        Command::Verify { k, mc_samples, mc_trials, seed, inject_hessian_perturbation } => {
            cfg.k = *k;
            cfg.mc_samples = *mc_samples;
            cfg.mc_trials = *mc_trials;
            cfg.seed = *seed;
            cfg.inject_hessian_perturbation = *inject_hessian_perturbation;
        }
    }
    Ok(cfg)
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::Spectrum { .. } => "spectrum",
        Command::Critical { .. } => "critical",
        Command::Invariants { .. } => "invariants",
        Command::Verify { .. } => "verify",
    }
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Report, CliError> {
    match cli.command {
        Command::Spectrum { .. } => spectrum::cmd_spectrum(cfg),
        Command::Critical { .. } => critical::cmd_critical(cfg),
        Command::Verify { .. } => verify::cmd_verify(cfg),
        Command::Invariants { .. } => {
            let (report, origin) = invariants::cmd_invariants(cfg)?;
            match origin {
                LatticeOrigin::Built => eprintln!("lattice built"),
                LatticeOrigin::Loaded(p) => eprintln!("lattice loaded from {}", p.display()),
                LatticeOrigin::Rebuilt(p, why) => eprintln!("lattice cache {} rejected ({why}); rebuilt", p.display()),
            }
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = name(&cli.command);
    let (report, output) = match config(&cli) {
        Ok(cfg) => (run(&cli, &cfg).unwrap_or_else(|e| Report::from_error(command, &e)), cfg.output),
        Err(e) => (Report::from_error(command, &e), cli.common.output),
    };
    match output {
        OutputFormat::Text => print!("{}", report.render_text()),
        OutputFormat::Json => {
            for n in &report.notices {
                eprintln!("{command}: {n}");
            }
            print!("{}", report.render_json())
        }
    }
    ExitCode::from(report.exit().code() as u8)
}
