use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oscillab::lab::{run, Experiment, ExperimentConfig};
use oscillab::{Error, Result};

/// Oscillation-operator experiments. Exit status is 0 when every verdict
/// passes, 1 when one fails, 2 on errors.
#[derive(Debug, Parser)]
#[command(name = "oscillab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; unset fields take per-experiment defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; `<stem>.csv` gets the rows and `<stem>.json` the summary.
    /// Without it the CSV goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hörmander integral sweep over shifts y.
    VerifyHormander,
    /// Evaluate the operator at points.
    Oscillation {
        /// `a,b,c` or `grid:start:end:count`.
        #[arg(long)]
        points: Option<String>,
    },
    /// `‖Of‖_p / ‖f‖_p` over the family.
    StrongP,
    /// `λ |{Of > λ}| / ‖f‖₁` over the family and a λ grid.
    Weak11,
    /// `‖Oa‖₁` over atoms, or `‖Of‖₁ / (‖f‖₁ + ‖Hf‖₁)` on the circle.
    H1,
    /// BMO of `Of` against `‖f‖_∞`.
    Bmo,
    /// `‖Of‖₁ / ‖f*‖₁` on the circle.
    Fstar,
    /// Flow versus line comparison over growing horizons.
    Transfer,
}

fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse points `{spec}`"));
    if let Some(rest) = spec.strip_prefix("grid:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return Ok(match n {
            0 => Vec::new(),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        });
    }
    spec.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn execute(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if cli.seed.is_some() {
        config.seed = cli.seed;
    }
    let experiment = match &cli.command {
        Command::VerifyHormander => Experiment::VerifyHormander,
        Command::Oscillation { points } => {
            if let Some(p) = points {
                config.points = Some(parse_points(p)?);
            }
            Experiment::Oscillation
        }
        Command::StrongP => Experiment::StrongP,
        Command::Weak11 => Experiment::Weak11,
        Command::H1 => Experiment::H1,
        Command::Bmo => Experiment::Bmo,
        Command::Fstar => Experiment::Fstar,
        Command::Transfer => Experiment::Transfer,
    };
    let settings = config.resolve(experiment)?;
    let report = run(&settings)?;
    match cli.out.or(config.output) {
        Some(path) => {
            let (csv, json) = report.write_files(&settings, &path)?;
            println!("{}: {} rows -> {}, {}", experiment, report.rows.len(), csv.display(), json.display());
            for s in &report.summary {
                println!("  {} = {}", s.name, s.value);
            }
        }
        None => print!("{}", report.csv_string()?),
    }
    for v in &report.verdicts {
        eprintln!("{} {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
