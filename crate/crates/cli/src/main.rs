use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use atomscatter_cli::{run_scenario, CliError, Mode, RawConfig, THREADS_ENV};

/// Scatter one- and two-photon Gaussian pulses off a two-level atom and
/// write the output fields, cross-sections and observables.
#[derive(Debug, Parser)]
#[command(name = "atomscatter", version, allow_negative_numbers = true)]
struct Args {
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Pulse length T in units of 1/Γ.
    #[arg(long)]
    pulse_length: Option<f64>,

    /// Photon separation of a cross-section (repeatable).
    #[arg(long = "tau")]
    taus: Vec<f64>,

    /// Grid override, "min:max:points" with an odd point count.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,

    /// Pulse lengths for the sweep, "min:max:steps", log-spaced.
    #[arg(long)]
    sweep: Option<String>,

    #[arg(long = "out")]
    out: Option<PathBuf>,

    /// Relative tolerance of the adaptive quadrature.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Most nodes per axis written to two_photon.csv.
    #[arg(long)]
    field_points: Option<usize>,

    /// key = value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn into_raw(self) -> Result<RawConfig, CliError> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        Ok(file.overlay(RawConfig {
            mode: self.mode,
            pulse_length: self.pulse_length,
            grid: self.grid,
            taus: (!self.taus.is_empty()).then_some(self.taus),
            sweep: self.sweep,
            output_dir: self.out,
            tolerance: self.tolerance,
            field_points: self.field_points,
        }))
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be an integer >= 1, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}

fn run(args: Args) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = args.into_raw()?.validate()?;
    let report = run_scenario(&cfg)?;
    for path in &report.written {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", report.summary_path.display());
    let failed = report.summary.failed_checks();
    if failed > 0 {
        eprintln!("{failed} acceptance check(s) outside their band, see summary.txt");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
