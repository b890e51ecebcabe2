use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fracphase::harness::{run_experiment, ExperimentConfig, ExperimentKind};

#[derive(Clone, Copy, ValueEnum)]
enum Command {
    Converge,
    Spinodal,
    Adaptive,
    Coarsen,
    Bubble3d,
    KernelCheck,
    ExtrapProbe,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::Converge => ExperimentKind::Converge,
            Command::Spinodal => ExperimentKind::Spinodal,
            Command::Adaptive => ExperimentKind::Adaptive,
            Command::Coarsen => ExperimentKind::Coarsen,
            Command::Bubble3d => ExperimentKind::Bubble3d,
            Command::KernelCheck => ExperimentKind::KernelCheck,
            Command::ExtrapProbe => ExperimentKind::ExtrapProbe,
        }
    }
}

/// Time-fractional phase-field experiments.
#[derive(Parser)]
#[command(name = "fracphase", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML file overlaid on the experiment's preset.
    #[arg(long)]
    config: PathBuf,
    /// Directory for reports, diagnostics and snapshots.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let kind = ExperimentKind::from(cli.command);
    let result = std::fs::read_to_string(&cli.config)
        .map_err(|e| fracphase::Error::Config(format!("{}: {e}", cli.config.display())))
        .and_then(|text| ExperimentConfig::from_toml(kind, &text))
        .and_then(|mut cfg| {
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(threads) = cli.threads {
                cfg.threads = threads.max(1);
            }
            run_experiment(kind, &cfg, cli.out.as_deref())
        });
    match result {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            // a closed pipe is not an error worth reporting
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fracphase {}: {e}", kind.name());
            ExitCode::FAILURE
        }
    }
}
