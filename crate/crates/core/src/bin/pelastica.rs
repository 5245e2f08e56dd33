use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pelastica::app::{execute, ExitStatus};
use pelastica::config::{Command, ConfigSource, RunConfig};

/// Regularized p-elastic gradient flow of closed curves.
#[derive(Parser)]
#[command(name = "pelastica", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one key (repeatable); wins over the config file
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print only the result lines
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Run the flow to the horizon or stationarity
    Flow,
    /// Run a sequence of (epsilon, delta) stages with warm starts
    Continuation,
    /// Compare gradients and first variations with finite differences
    Gradcheck,
    /// Run the inequality check suites
    Check,
    /// Print the energy breakdown of the initial curve
    Energy,
}

fn build_config(cli: &Cli) -> pelastica::error::Result<RunConfig> {
    let command = match cli.command {
        Sub::Flow => Command::Flow,
        Sub::Continuation => Command::Continuation,
        Sub::Gradcheck => Command::Gradcheck,
        Sub::Check => Command::Check,
        Sub::Energy => Command::Energy,
    };
    let mut src = ConfigSource::new();
    if let Some(path) = &cli.config {
        src.add_text(&std::fs::read_to_string(path)?)?;
    }
    for kv in &cli.set {
        src.add_override(kv)?;
    }
    if let Some(out) = &cli.out {
        src.set("output_dir", &out.to_string_lossy());
    }
    if let Some(seed) = cli.seed {
        src.set("seed", &seed.to_string());
    }
    RunConfig::resolve(command, &src)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(ExitStatus::ConfigError.code() as u8);
        }
    };
    let mut stdout = std::io::stdout();
    let (status, err) = execute(&cfg, &mut stdout, cli.quiet);
    if let Some(e) = err {
        let kind = if status == ExitStatus::ConfigError { "config error" } else { "error" };
        eprintln!("{kind}: {e}");
    }
    ExitCode::from(status.code() as u8)
}
