use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exchmat::runner::{run_experiment, selftest::selftest, ExperimentConfig};
use exchmat::Error;

#[derive(Parser)]
#[command(name = "exchmat", version, about = "Random matrices with exchangeable entries")]
struct Cli {
    /// Log every eigenvalue iteration to stderr.
    #[arg(long, global = true, hide = true)]
    trace_kernels: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        rng_seed: Option<u64>,
        /// Overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the built-in oracle checks.
    Selftest,
}

fn run(config: PathBuf, rng_seed: Option<u64>, out: Option<PathBuf>, threads: Option<usize>) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::from_file(&config)?;
    if let Some(seed) = rng_seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = out {
        cfg.output_dir = out;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config {
            field: "threads".into(),
            message: e.to_string(),
        })?;
    let report = pool.install(|| run_experiment(&cfg))?;
    println!(
        "{}: {} kernel calls, {} failures, {:.2}s",
        report.summary.experiment,
        report.summary.trials,
        report.summary.kernel_failures,
        report.wall_clock.as_secs_f64()
    );
    for path in &report.artifact_paths {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.trace_kernels { "trace" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.command {
        Command::Run {
            config,
            rng_seed,
            out,
            threads,
        } => match run(config, rng_seed, out, threads) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Selftest => {
            let checks = selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
