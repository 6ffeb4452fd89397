//! `cwave`: runs one experiment per invocation and writes its artifacts,
//! a config echo and a manifest into an output directory.
//!
//! Exit status: 0 on success, 1 when the computation fails (partial
//! artifacts carry a `.partial` suffix), 2 for usage or configuration errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cwave", version, about = "Cubic wave equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` overrides applied to the configuration, e.g. `grid.n=64`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured datum and store its trajectory and energies.
    Simulate(ConfigArgs),
    /// Space-time diagnostics of a stored trajectory.
    Diagnose {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long = "N")]
        cutoff: f64,
        /// Length of the subintervals the Z norm is evaluated on.
        #[arg(long, default_value_t = 1.0)]
        interval: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Almost-conservation ledgers for one or several cutoffs.
    AlmostConservation {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated cutoffs, e.g. "4,8,16,32".
        #[arg(long = "sweep-N")]
        sweep: Option<String>,
    },
    /// End-to-end growth-bound experiment.
    Gwp(ConfigArgs),
    /// Monte-Carlo check of the symbol bounds.
    VerifySymbol {
        #[arg(long)]
        s: f64,
        #[arg(long = "N")]
        cutoff: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shell-by-shell breakdown of the increment over one subinterval.
    Breakdown {
        #[arg(long)]
        traj: PathBuf,
        /// `a,b`
        #[arg(long)]
        interval: String,
        #[arg(long)]
        s: f64,
        #[arg(long = "N")]
        cutoff: f64,
        #[arg(long, default_value_t = cwave::symbol::DEFAULT_QUADRUPLE_LIMIT)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// How a run ended unsuccessfully.
pub enum Failure {
    Usage(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 1,
        }
    }
}

fn out_dir(out: Option<PathBuf>, name: &str) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("cwave-out").join(name))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(a) => {
            let out = out_dir(a.out.clone(), "simulate");
            commands::simulate(&commands::load_config(&a.config, &a.overrides, a.seed)?, &out)
        }
        Command::Diagnose {
            traj,
            s,
            cutoff,
            interval,
            out,
        } => commands::diagnose(&traj, s, cutoff, interval, &out_dir(out, "diagnose")),
        Command::AlmostConservation { config: a, sweep } => {
            let cfg = commands::load_config(&a.config, &a.overrides, a.seed)?;
            let out = out_dir(a.out.clone(), "almost-conservation");
            commands::almost_conservation(&cfg, sweep.as_deref(), &out)
        }
        Command::Gwp(a) => {
            let out = out_dir(a.out.clone(), "gwp");
            commands::gwp(&commands::load_config(&a.config, &a.overrides, a.seed)?, &out)
        }
        Command::VerifySymbol {
            s,
            cutoff,
            samples,
            seed,
            out,
        } => commands::verify_symbol(s, cutoff, samples, seed, &out_dir(out, "verify-symbol")),
        Command::Breakdown {
            traj,
            interval,
            s,
            cutoff,
            limit,
            out,
        } => commands::breakdown(&traj, &interval, s, cutoff, limit, &out_dir(out, "breakdown")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let (Failure::Usage(msg) | Failure::Compute(msg)) = f;
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
