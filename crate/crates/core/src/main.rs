use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use offspring::distribution::tcp::{worker_loop, WorkerOptions};
use offspring::emo_strategy::island_task_handler;
use offspring::harness::{report, run_experiment, run_sweep, ExecutorChoice, ExperimentConfig};
use offspring::Error;

#[derive(Parser)]
#[command(name = "offspring", version, about = "Network-based MOEAs, serial or as a distributed island model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// sync, pool:N, tcp:HOST:PORT or tcp-local:N
        #[arg(long)]
        executor: Option<ExecutorChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serial baseline and distributed run for several population sizes.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated total population sizes.
        #[arg(long, value_delimiter = ',', default_value = "100,300,500,1000")]
        populations: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute island tasks for a coordinator.
    Worker {
        #[arg(long, value_name = "HOST:PORT")]
        connect: String,
        #[arg(long)]
        name: Option<String>,
        /// Give up after this many consecutive failed connection attempts.
        #[arg(long)]
        max_attempts: Option<u32>,
    },
    /// Summarize the CSV output of a run or sweep.
    Report {
        #[arg(long = "in")]
        dir: PathBuf,
    },
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::UnknownProblem(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn load(config: &Path, out: Option<PathBuf>) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_file(config)?;
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, executor, out } => load(&config, out).and_then(|mut cfg| {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(e) = executor {
                cfg.executor = e;
            }
            let r = run_experiment(&cfg)?;
            println!(
                "{} iterations, {} tasks, {:.3}s wall, mean overhead {:.2}%, front of {} points in {}",
                r.summary.iterations,
                r.summary.tasks_executed,
                r.metrics.wall_time,
                100.0 * r.metrics.mean_overhead(),
                r.front.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }),
        Command::Sweep { config, populations, out } => load(&config, out).and_then(|cfg| {
            let rows = run_sweep(&cfg, &populations)?;
            for r in rows {
                println!(
                    "population {:>5}: speedup {:.2}, mean overhead {:.2}% ({})",
                    r.population,
                    r.speedup,
                    100.0 * r.mean_overhead,
                    r.status
                );
            }
            Ok(())
        }),
        Command::Worker { connect, name, max_attempts } => {
            let mut options = WorkerOptions { max_attempts, ..WorkerOptions::default() };
            if let Some(n) = name {
                options.name = n;
            }
            worker_loop(&connect, island_task_handler(), &options)
        }
        Command::Report { dir } => report(&dir).map(|text| print!("{text}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
