//! `macrates` command-line entry point.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use macrates::sim::{run_scenario, ModelConfig, ScenarioKind};
use macrates::Error;

/// Run one simulation scenario and write its CSV.
#[derive(Debug, Parser)]
#[command(name = "macrates", version)]
struct Args {
    /// limited_duration, file_upload or stability_probe
    #[arg(long)]
    scenario: ScenarioKind,
    /// TOML model and scenario description
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Output directory; created if missing
    #[arg(long)]
    out: PathBuf,
    /// Overrides `scenario.replications`
    #[arg(long)]
    replications: Option<usize>,
    /// Overrides `scenario.slots`
    #[arg(long)]
    slots: Option<usize>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) => Failure::Config(e.to_string()),
            Error::Runtime(_) | Error::Solver { .. } => Failure::Runtime(e.to_string()),
        }
    }
}

fn load(args: &Args) -> Result<ModelConfig, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("reading {}: {e}", args.config.display())))?;
    let mut cfg = ModelConfig::parse(&text)?;
    if let Some(n) = args.replications {
        if n == 0 {
            return Err(Failure::Config("--replications must be at least 1".into()));
        }
        cfg.replications = n;
    }
    if let Some(t) = args.slots {
        if t == 0 {
            return Err(Failure::Config("--slots must be at least 1".into()));
        }
        cfg.slots = t;
    }
    Ok(cfg)
}

fn write_report(path: &Path, report: &macrates::sim::ScenarioReport) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Runtime(format!("writing {}: {e}", path.display()));
    let file = fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    report.write_csv(&mut w)?;
    w.flush().map_err(io)
}

fn run(args: &Args) -> Result<PathBuf, Failure> {
    let cfg = load(args)?;
    let report = run_scenario(args.scenario, &cfg, args.seed)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::Runtime(format!("creating {}: {e}", args.out.display())))?;
    let path = args.out.join(format!("{}.csv", args.scenario));
    write_report(&path, &report)?;
    Ok(path)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(&args) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("macrates: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("macrates: {msg}");
            ExitCode::from(2)
        }
    }
}
