use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use susy_cpn::cli::{self, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "susy-cpn", version, about = "Randomized identity checks for supersymmetric CP^(N-1) surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Global,
}

#[derive(Args)]
struct Global {
    /// Seed for probe points.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of probe points.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Residual tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured check suites and print a JSON report.
    Verify {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample the surface coordinates on a grid and write CSV.
    Surface {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Curvature of the induced metric at each probe point, as JSON.
    Curvature {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Weierstrass checks for an N = 2 model.
    Weierstrass {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn load(path: &Path, g: &Global) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(Overrides {
        seed: g.seed,
        points: g.points,
        tolerance: g.tolerance,
    });
    Ok(cfg)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let g = &cli.overrides;
    match &cli.command {
        Command::Verify { config, output } => {
            let cfg = load(config, g)?;
            let report = cli::verify(&cfg)?;
            let out = output.clone().or(cfg.output.report.clone());
            emit(&to_json(&report), out.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Weierstrass { config, output } => {
            let cfg = load(config, g)?;
            let report = cli::weierstrass_report(&cfg)?;
            let out = output.clone().or(cfg.output.report.clone());
            emit(&to_json(&report), out.as_deref())?;
            Ok(report.exit_code())
        }
        Command::Surface { config, output } => {
            let cfg = load(config, g)?;
            let csv = cli::surface_csv(&cfg)?;
            let out = output.clone().or(cfg.output.surface.clone());
            emit(&csv, out.as_deref())?;
            Ok(0)
        }
        Command::Curvature { config, output } => {
            let cfg = load(config, g)?;
            let report = cli::curvature_report(&cfg)?;
            let out = output.clone().or(cfg.output.curvature.clone());
            emit(&to_json(&report), out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
