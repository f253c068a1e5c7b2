use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lowrank_perturb::checkers::CHECKER_IDS;
use lowrank_perturb::harness::{self, SuiteConfig, SuiteSummary};

#[derive(Parser)]
#[command(name = "lrperturb", version, about = "Numerical checks of low-rank perturbation bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured batch and write reports into a directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides LRPERTURB_WORKERS and the config's `workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Re-derive every verdict in a reports.csv or reports.jsonl file.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
    /// Print the bound ids accepted in configs and by `demo`.
    ListCheckers,
    /// Run one bound on a small worked instance and print intermediates.
    Demo {
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn finish(summary: &SuiteSummary) -> ExitCode {
    println!("{}", summary.one_line());
    for f in summary.failed.iter().take(10) {
        println!("FAILED {} seed={}", f.bound_id, f.seed.map_or("-".into(), |s| s.to_string()));
    }
    if summary.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> lowrank_perturb::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, workers } => {
            let cfg = SuiteConfig::from_path(&config)?;
            let workers = cfg.resolve_workers(workers)?;
            let summary = harness::run_suite_to_dir(&cfg, &out, workers)?;
            Ok(finish(&summary))
        }
        Command::Verify { report } => Ok(finish(&harness::verify_report(&report)?)),
        Command::ListCheckers => {
            for id in CHECKER_IDS {
                println!("{id}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Demo { bound, seed } => {
            print!("{}", harness::demo(&bound, seed)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
