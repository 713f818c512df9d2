use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ltstep::cli::{self, Overrides};
use ltstep::{SolveMode, Variant};

/// Local time stepping for the heat equation on a two-subdomain composite grid.
#[derive(Parser)]
#[command(name = "ltstep", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration; writes summary.json, error_space.csv, error_time.csv.
    Run(Common),
    /// Factor-2 refinement study; writes convergence.csv.
    Converge(Common),
    /// All variants against uniform time-step baselines; writes compare.csv.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file with `section.key = value` lines.
    config: PathBuf,
    /// Interface scheme and master: is1-coarse, is1-fine, is2-coarse, is2-fine.
    #[arg(long)]
    variant: Option<Variant>,
    /// converged, single-iteration, predictor-only or direct.
    #[arg(long)]
    mode: Option<SolveMode>,
    /// Tolerance on both interface residuals (converged mode).
    #[arg(long)]
    eps: Option<f64>,
    /// Sweep limit per window (converged mode).
    #[arg(long)]
    max_iters: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            variant: self.variant,
            mode: self.mode,
            eps: self.eps,
            max_iters: self.max_iters,
            output_dir: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = match &args.command {
        Command::Run(c) => cli::run_experiment(&c.config, &c.overrides()),
        Command::Converge(c) => cli::run_convergence(&c.config, &c.overrides()),
        Command::Compare(c) => cli::run_compare(&c.config, &c.overrides()),
    };
    match &result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if !outcome.converged {
                eprintln!("ltstep: corrector did not reach the tolerance in every window");
            }
        }
        Err(e) => eprintln!("ltstep: {e}"),
    }
    ExitCode::from(cli::exit_code(&result) as u8)
}
