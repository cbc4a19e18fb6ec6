//! Scenario configuration: `key = value` files merged with command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use atomscatter::{QuadratureSettings, SpatialGrid};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    OnePhoton,
    TwoPhoton,
    Decomposition,
    CrossSections,
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::OnePhoton => "one-photon",
            Mode::TwoPhoton => "two-photon",
            Mode::Decomposition => "decomposition",
            Mode::CrossSections => "cross-sections",
            Mode::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Mode as clap::ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| CliError::Usage(format!("unknown mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepRange {
    /// Log-spaced pulse lengths from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.min.log10(), self.max.log10());
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| match k {
                0 => self.min,
                k if k == last => self.max,
                k => 10f64.powf(a + (b - a) * k as f64 / last as f64),
            })
            .collect()
    }
}

/// Everything a run needs, already validated.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub pulse_length: f64,
    pub grid: Option<SpatialGrid>,
    pub taus: Vec<f64>,
    pub sweep: Option<SweepRange>,
    pub output_dir: PathBuf,
    pub quadrature: QuadratureSettings,
    /// Per-axis cap on nodes written to the two-photon field CSV.
    pub field_points: usize,
}

/// Unvalidated settings from one source. `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub mode: Option<Mode>,
    pub pulse_length: Option<f64>,
    pub grid: Option<String>,
    pub taus: Option<Vec<f64>>,
    pub sweep: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub field_points: Option<usize>,
}

impl RawConfig {
    /// Parses `key = value` lines. `#` starts a comment. `tau` may be a
    /// comma-separated list and may be repeated.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key.replace('-', "_").as_str() {
                "mode" => raw.mode = Some(value.parse().map_err(|e: CliError| bad(e.to_string()))?),
                "pulse_length" => raw.pulse_length = Some(parse_number(key, value).map_err(bad)?),
                "grid" => raw.grid = Some(value.to_string()),
                "tau" => {
                    let taus = raw.taus.get_or_insert_with(Vec::new);
                    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                        taus.push(parse_number(key, part).map_err(bad)?);
                    }
                }
                "sweep" => raw.sweep = Some(value.to_string()),
                "out" | "output_dir" => raw.output_dir = Some(PathBuf::from(value)),
                "tolerance" => raw.tolerance = Some(parse_number(key, value).map_err(bad)?),
                "field_points" => {
                    raw.field_points = Some(
                        value
                            .parse()
                            .map_err(|_| bad(format!("field_points: not an integer: '{value}'")))?,
                    )
                }
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Values from `over` win wherever they are present.
    pub fn overlay(self, over: RawConfig) -> RawConfig {
        RawConfig {
            mode: over.mode.or(self.mode),
            pulse_length: over.pulse_length.or(self.pulse_length),
            grid: over.grid.or(self.grid),
            taus: over.taus.or(self.taus),
            sweep: over.sweep.or(self.sweep),
            output_dir: over.output_dir.or(self.output_dir),
            tolerance: over.tolerance.or(self.tolerance),
            field_points: over.field_points.or(self.field_points),
        }
    }

    pub fn validate(self) -> Result<ScenarioConfig, CliError> {
        let mode = self
            .mode
            .ok_or_else(|| CliError::Usage("no mode given (--mode or 'mode =')".into()))?;

        let sweep = self.sweep.as_deref().map(parse_sweep).transpose()?;
        if mode == Mode::Sweep && sweep.is_none() {
            return Err(CliError::Usage(
                "sweep mode needs a sweep range (--sweep min:max:steps)".into(),
            ));
        }

        let pulse_length = match (self.pulse_length, mode) {
            (Some(t), _) => t,
            (None, Mode::Sweep) => sweep.map(|s| s.min).unwrap_or(1.0),
            (None, _) => {
                return Err(CliError::Usage(
                    "no pulse length given (--pulse-length)".into(),
                ))
            }
        };
        if !(pulse_length > 0.0 && pulse_length.is_finite()) {
            return Err(CliError::Usage(format!(
                "pulse length must be positive, got {pulse_length}"
            )));
        }

        let grid = self.grid.as_deref().map(parse_grid).transpose()?;

        let taus = self
            .taus
            .unwrap_or_else(|| default_taus(mode, pulse_length));
        if let Some(t) = taus.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
            return Err(CliError::Usage(format!("tau values must be >= 0, got {t}")));
        }

        let quadrature = match self.tolerance {
            Some(rel) => QuadratureSettings::with_relative_tolerance(rel)
                .map_err(|e| CliError::Usage(format!("tolerance: {e}")))?,
            None => QuadratureSettings::default(),
        };

        let field_points = self.field_points.unwrap_or(401);
        if field_points < 2 {
            return Err(CliError::Usage("field_points must be at least 2".into()));
        }

        Ok(ScenarioConfig {
            mode,
            pulse_length,
            grid,
            taus,
            sweep,
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            quadrature,
            field_points,
        })
    }
}

/// Slices used for the long- and short-pulse figures.
fn default_taus(mode: Mode, pulse_length: f64) -> Vec<f64> {
    match mode {
        Mode::OnePhoton | Mode::Sweep => Vec::new(),
        Mode::TwoPhoton => vec![0.0],
        _ if pulse_length >= 5.0 => vec![0.0, 1.4, 5.0],
        _ => vec![0.0, 0.3, 1.0],
    }
}

fn parse_number(key: &str, value: &str) -> Result<f64, String> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("{key}: not a finite number: '{}'", value.trim()))
}

fn split_triple<'a>(what: &str, s: &'a str) -> Result<[&'a str; 3], CliError> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    <[&str; 3]>::try_from(parts)
        .map_err(|_| CliError::Usage(format!("{what}: expected 'min:max:count', got '{s}'")))
}

pub fn parse_grid(s: &str) -> Result<SpatialGrid, CliError> {
    let [a, b, n] = split_triple("grid", s)?;
    let usage = |m: String| CliError::Usage(format!("grid: {m}"));
    let min = parse_number("min", a).map_err(usage)?;
    let max = parse_number("max", b).map_err(usage)?;
    let points: usize = n
        .parse()
        .map_err(|_| usage(format!("point count is not an integer: '{n}'")))?;
    SpatialGrid::new(min, max, points).map_err(|e| usage(e.to_string()))
}

pub fn parse_sweep(s: &str) -> Result<SweepRange, CliError> {
    let [a, b, n] = split_triple("sweep", s)?;
    let usage = |m: String| CliError::Usage(format!("sweep: {m}"));
    let min = parse_number("min", a).map_err(usage)?;
    let max = parse_number("max", b).map_err(usage)?;
    let steps: usize = n
        .parse()
        .map_err(|_| usage(format!("step count is not an integer: '{n}'")))?;
    if !(min > 0.0 && max > min) {
        return Err(usage(format!("need 0 < min < max, got {min}:{max}")));
    }
    if steps < 2 {
        return Err(usage(format!("need at least 2 steps, got {steps}")));
    }
    Ok(SweepRange { min, max, steps })
}
