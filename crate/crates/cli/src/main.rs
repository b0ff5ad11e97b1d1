use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tapgp::{cmd_compare, cmd_run, cmd_sweep, Options};

/// Active tapping surface reconstruction experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// Write results here instead of `[output] output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Suppress the stdout report.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trace, metrics and heatmaps.
    Run { config: PathBuf },
    /// Weighted exploration vs uncertainty-only over the configured seeds.
    Compare { config: PathBuf },
    /// One metrics row per value of the `[sweep]` key and seed.
    Sweep { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let opts = Options {
        output_dir: cli.output_dir,
        quiet: cli.quiet,
    };
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &opts).map(drop),
        Command::Compare { config } => cmd_compare(config, &opts).map(drop),
        Command::Sweep { config } => cmd_sweep(config, &opts).map(drop),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tapgp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
