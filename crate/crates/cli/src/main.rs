use std::path::PathBuf;
use std::process::ExitCode;

use beliefshare_cli::{cmd_scenario, cmd_sweep, CliError, ScenarioName, SweepRequest};
use beliefshare_core::sim::DEFAULT_SWEEP_CAP;
use beliefshare_core::CommMode;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "beliefshare",
    version,
    about = "Multi-agent active inference with belief sharing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one canonical scenario and export its belief trace.
    Scenario {
        name: ScenarioName,
        /// none, posterior_sharing or likelihood_sharing.
        #[arg(long)]
        mode: CommMode,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every start/object combination for each communication mode and the random baseline.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
        /// Master seed; defaults to the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "BELIEFSHARE_JOBS")]
        jobs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SWEEP_CAP)]
        max_trials: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scenario {
            name,
            mode,
            out,
            seed,
        } => {
            cmd_scenario(name, mode, seed, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Sweep {
            config,
            repeats,
            out,
            seed,
            jobs,
            max_trials,
        } => {
            let req = SweepRequest {
                config,
                repeats,
                seed,
                jobs,
                max_trials,
                out,
            };
            let (_, report) = cmd_sweep(&req)?;
            for row in &report.aggregate {
                println!(
                    "{:<20} {:.4} +/- {:.4}  (n = {})",
                    row.arm.to_string(),
                    row.find_rate,
                    row.stderr,
                    row.trials
                );
            }
            println!("wrote {}", req.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
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
