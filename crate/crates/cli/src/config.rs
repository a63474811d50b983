//! Run configuration: a flat JSON document merged with command-line
//! flags, flags winning key by key. All quantities are in units where the
//! waveguide decay rate of the default system is 1 (and c = 1, hbar = 1).

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use wqed::nm::SweepAxis;
use wqed::params::{PacketParams, SystemParams};

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

pub fn config_err(err: wqed::Error) -> CliError {
    CliError::Config(err.to_string())
}

/// The flat config document. Every key has a flag of the same name.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma1d: Option<f64>,
    pub nu_s: Option<f64>,
    pub delta: Option<f64>,
    pub detuning: Option<f64>,
    pub c0: Option<f64>,
    pub t0: Option<f64>,
    pub tmax: Option<f64>,
    pub dt_out: Option<f64>,
    pub axis: Option<String>,
    pub grid: Option<String>,
    pub rd: Option<f64>,
    pub times: Option<String>,
    pub halfwidth: Option<f64>,
    pub step: Option<f64>,
    pub modes: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flags shared by every subcommand; all optional so the config file can
/// supply them.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonFlags {
    /// Flat JSON config file; explicit flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Emitter decay rate into the guide (frequency unit of the run).
    #[arg(long, allow_negative_numbers = true)]
    pub gamma1d: Option<f64>,
    /// Emitter transition frequency (only shifts lab-frame phases).
    #[arg(long = "nu-s", allow_negative_numbers = true)]
    pub nu_s: Option<f64>,
    /// Spectral linewidth of the incoming packet.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Packet carrier frequency minus the transition frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub detuning: Option<f64>,
    /// Vacuum-component amplitude of the packet state.
    #[arg(long, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    /// Start time (evolve) or measure cutoff (sweep, validate).
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// End of the simulated window.
    #[arg(long, allow_negative_numbers = true)]
    pub tmax: Option<f64>,
    /// Output sampling interval for time series.
    #[arg(long = "dt-out", allow_negative_numbers = true)]
    pub dt_out: Option<f64>,
    /// Detector distance for the field-ratio identity checks.
    #[arg(long, allow_negative_numbers = true)]
    pub rd: Option<f64>,
    /// Output file; data is deterministic, metadata goes to a sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Everything resolved: defaults filled, strings parsed, physics
/// parameters validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub sys: SystemParams<f64>,
    pub pkt: PacketParams<f64>,
    pub t0: Option<f64>,
    pub tmax: f64,
    pub dt_out: f64,
    pub rd: f64,
    pub axis: Option<SweepAxis>,
    pub grid: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub halfwidth: Option<f64>,
    pub step: Option<f64>,
    pub modes: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Config(m);
    let values: Vec<f64> = if let Some(rest) = text.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid '{text}': want lin:start:stop:count")));
        }
        let (a, b, n) = (
            parse_f64(parts[0])?,
            parse_f64(parts[1])?,
            parse_count(parts[2])?,
        );
        (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect()
    } else if let Some(rest) = text.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid '{text}': want log:start:stop:count")));
        }
        let (a, b, n) = (
            parse_f64(parts[0])?,
            parse_f64(parts[1])?,
            parse_count(parts[2])?,
        );
        if a <= 0.0 || b <= 0.0 {
            return Err(bad(format!("grid '{text}': log endpoints must be > 0")));
        }
        let (la, lb) = (a.log10(), b.log10());
        (0..n)
            .map(|k| 10f64.powf(la + (lb - la) * k as f64 / (n - 1) as f64))
            .collect()
    } else {
        text.split(',')
            .map(|s| parse_f64(s.trim()))
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty".to_string()));
    }
    Ok(values)
}

fn parse_f64(s: &str) -> Result<f64, CliError> {
    s.parse()
        .map_err(|_| CliError::Config(format!("'{s}' is not a number")))
}

fn parse_count(s: &str) -> Result<usize, CliError> {
    let n: usize = s
        .parse()
        .map_err(|_| CliError::Config(format!("'{s}' is not a count")))?;
    if n < 2 {
        return Err(CliError::Config("grids need at least 2 points".to_string()));
    }
    Ok(n)
}

pub fn parse_times(text: &str) -> Result<Vec<f64>, CliError> {
    let times: Vec<f64> = text
        .split(',')
        .map(|s| parse_f64(s.trim()))
        .collect::<Result<_, _>>()?;
    if times.is_empty() {
        return Err(CliError::Config("times list is empty".to_string()));
    }
    Ok(times)
}

pub fn resolve(
    flags: &CommonFlags,
    axis: Option<&str>,
    grid: Option<&str>,
    times: Option<&str>,
    halfwidth: Option<f64>,
    step: Option<f64>,
    modes: Option<usize>,
) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let gamma1d = pick(flags.gamma1d, file.gamma1d).unwrap_or(1.0);
    let nu_s = pick(flags.nu_s, file.nu_s).unwrap_or(0.0);
    let delta = pick(flags.delta, file.delta).unwrap_or(0.1);
    let detuning = pick(flags.detuning, file.detuning).unwrap_or(0.0);
    let c0 = pick(flags.c0, file.c0).unwrap_or(0.0);
    let sys = SystemParams::new(gamma1d, nu_s).map_err(config_err)?;
    let pkt = PacketParams::new(delta, detuning, c0).map_err(config_err)?;

    let axis = match pick(axis, file.axis.as_deref()) {
        Some("detuning") => Some(SweepAxis::Detuning),
        Some("linewidth") => Some(SweepAxis::Linewidth),
        Some(other) => {
            return Err(CliError::Config(format!(
                "axis '{other}' is not 'detuning' or 'linewidth'"
            )))
        }
        None => None,
    };
    let grid = match pick(grid, file.grid.as_deref()) {
        Some(text) => Some(parse_grid(text)?),
        None => None,
    };
    let times = match pick(times, file.times.as_deref()) {
        Some(text) => Some(parse_times(text)?),
        None => None,
    };

    let format = match pick(flags.format.as_deref(), file.format.as_deref()).unwrap_or("csv") {
        "csv" => Format::Csv,
        "json" => Format::Json,
        other => {
            return Err(CliError::Config(format!(
                "format '{other}' is not 'csv' or 'json'"
            )))
        }
    };

    let tmax = pick(flags.tmax, file.tmax).unwrap_or(8.0);
    let dt_out = pick(flags.dt_out, file.dt_out).unwrap_or(0.02);
    if !tmax.is_finite() || !dt_out.is_finite() || dt_out <= 0.0 {
        return Err(CliError::Config(
            "tmax must be finite and dt_out positive".to_string(),
        ));
    }

    Ok(RunConfig {
        sys,
        pkt,
        t0: pick(flags.t0, file.t0),
        tmax,
        dt_out,
        rd: pick(flags.rd, file.rd).unwrap_or(1.0),
        axis,
        grid,
        times,
        halfwidth: pick(halfwidth, file.halfwidth),
        step: pick(step, file.step),
        modes: pick(modes, file.modes).unwrap_or(4001),
        out: pick(
            flags.out.clone(),
            file.out.as_ref().map(PathBuf::from),
        ),
        format,
    })
}
