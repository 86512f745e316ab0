use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tomolab::{commands, Config, HarnessError};

#[derive(Parser)]
#[command(name = "tomolab", version, about = "Two-qubit entanglement detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON configuration; missing keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Small sample sizes for quick runs.
    #[arg(long)]
    fast: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence band of the noisy input family.
    Band(Common),
    /// Noisy filter protocol and reconstruction for each input.
    Protocol(Common),
    /// Reconstruction and feasible-set ensembles for one transcript.
    Reconstruct(Common),
    /// Counterexample campaign for 14-observable measurement sets.
    Nogo(Common),
    /// Four-copy and two-copy determinant estimates.
    Multicopy(Common),
    /// Werner thresholds and the X-state extension counterexample.
    Extend(Common),
}

fn run(cli: Cli) -> Result<commands::Summary, HarnessError> {
    let (runner, common): (fn(&Config, u64, &std::path::Path) -> _, Common) = match cli.command {
        Command::Band(c) => (commands::band, c),
        Command::Protocol(c) => (commands::protocol, c),
        Command::Reconstruct(c) => (commands::reconstruct, c),
        Command::Nogo(c) => (commands::nogo, c),
        Command::Multicopy(c) => (commands::multicopy, c),
        Command::Extend(c) => (commands::extend, c),
    };
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if common.fast {
        cfg = cfg.fast();
    }
    runner(&cfg, common.seed, &common.out)
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
    match run(cli) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
