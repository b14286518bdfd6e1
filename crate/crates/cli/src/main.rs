mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use speedscale::multiproc::Strategy;
use speedscale::Error;

#[derive(Parser, Debug)]
#[command(
    name = "speedscale",
    version,
    about = "Minimum-energy speed-scaling scheduling"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Override the instance exponent (also the exponent for generated
    /// instances and reductions; default 2).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Discretization accuracy for the landmark grid.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// How jobs are spread over zone windows on several processors.
    #[arg(long, global = true, default_value_t = Strategy::Lp)]
    pub strategy: Strategy,
    /// Drop the non-preemption rows from the LP relaxation.
    #[arg(long = "no-constraint-3", global = true)]
    pub no_constraint_3: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Largest landmark grid tried first; doubled while the LP is infeasible,
    /// up to the full density.
    #[arg(long, global = true, default_value_t = 40)]
    pub max_grid_points: usize,
    /// State cap for the exhaustive oracles.
    #[arg(long, global = true, default_value_t = speedscale::oracle::DEFAULT_STATE_CAP)]
    pub cap: u128,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Schedule an instance: LP relaxation and rounding on one processor, the
    /// zone-window algorithm on several.
    Solve(InstanceArg),
    /// Solve the LP relaxation only.
    Lp(InstanceArg),
    /// LP relaxation and rounding with the per-stage report (one processor).
    Round(InstanceArg),
    /// Exact baselines.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Print the landmark grid of an instance.
    Discretize {
        #[arg(short, long)]
        instance: PathBuf,
        /// Dump every grid point as JSON.
        #[arg(long)]
        dump: bool,
    },
    /// LP with and without the non-preemption rows against the exhaustive
    /// optimum on the integrality-gap family.
    GapExperiment {
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 8])]
        n: Vec<usize>,
        /// Landmarks inserted between consecutive integer endpoints.
        #[arg(long, default_value_t = 3)]
        per_gap: usize,
    },
    /// Reduce a bounded 3-dimensional matching instance to scheduling.
    #[command(name = "reduce-3dm")]
    Reduce3dm {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Check the matching-deficit inequality for a schedule of a reduction.
    CheckGap {
        #[arg(long)]
        tdm: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Run every instance of a corpus directory and tabulate energies.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![Strategy::Lp, Strategy::Greedy])]
        strategies: Vec<Strategy>,
    },
    /// Generate instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Args, Debug)]
pub struct InstanceArg {
    #[arg(short, long)]
    pub instance: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Optimal preemptive single-processor schedule.
    Yds(InstanceArg),
    /// Exhaustive non-preemptive optimum on the landmark grid.
    Brute(InstanceArg),
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    Random {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        work_min: u64,
        #[arg(long, default_value_t = 4)]
        work_max: u64,
        #[arg(long, default_value_t = 8)]
        horizon: u64,
    },
    GapFamily {
        #[arg(long)]
        n: usize,
    },
    /// A 3DM instance with a planted perfect matching.
    #[command(name = "planted-3dm")]
    Planted3dm {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        distractors: usize,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Domain(_) | Error::SizeLimit { .. } => 1,
        Error::Infeasible(_) => 2,
        Error::ContractViolation(_) | Error::Solver(_) | Error::InvalidSchedule(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(text) => match &cli.global.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(1)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
