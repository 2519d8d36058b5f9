//! `bergkern`: runs the kernel verification suites on a domain spec file.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! invalid input.

mod report;
mod spec;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::spec::{parse, SpecError, SpecFile};
use crate::suites::{run, Command};

#[derive(Debug, Parser)]
#[command(name = "bergkern", version, about = "Bergman, Szegő and Green kernel checks on planar domains")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Domain spec file (`key = value` lines). Optional for `reinhardt`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Write tab-separated report rows here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Bergman basis degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Boundary nodes per curve.
    #[arg(long)]
    nodes: Option<usize>,
    /// Grid resolution of the minimal-point scan.
    #[arg(long)]
    grid: Option<usize>,
    /// Multiplier applied to every tolerance.
    #[arg(long)]
    tol_scale: Option<f64>,
}

fn load(cli: &Cli) -> Result<SpecFile, String> {
    let mut spec = match &cli.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None if cli.command == Command::Reinhardt => parse("kind = reinhardt2\n").expect("built-in spec"),
        None => return Err("--spec is required for this command".to_string()),
    };
    let overrides = |flag: &str, e: String| SpecError::general(format!("--{flag}: {e}")).to_string();
    let positive = |v: usize, flag: &str| {
        if v > 0 {
            Ok(v)
        } else {
            Err(overrides(flag, "must be positive".to_string()))
        }
    };
    if let Some(d) = cli.degree {
        spec.settings.degree = positive(d, "degree")?;
    }
    if let Some(m) = cli.nodes {
        spec.settings.nodes = Some(positive(m, "nodes")?);
    }
    if let Some(g) = cli.grid {
        spec.settings.grid = positive(g, "grid")?;
    }
    if let Some(s) = cli.tol_scale {
        spec.settings.tol_scale = spec::parse_non_negative(&s.to_string()).map_err(|e| overrides("tol-scale", e))?;
    }
    Ok(spec)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let spec = match load(&cli) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(cli.command, &spec) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {}", e.0);
            return ExitCode::from(2);
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, report.tsv()) {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    print!("{}", report.summary());
    if report.failures() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
