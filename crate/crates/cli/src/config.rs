//! Run configuration: command-line flags layered over an optional JSON file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TauUnit {
    /// `τJ/2π`.
    TwoPi,
    /// `Jτ`.
    Raw,
}

impl TauUnit {
    /// Converts a file-unit value to `Jτ`.
    pub fn to_jt(self, x: f64) -> f64 {
        match self {
            TauUnit::TwoPi => 2.0 * PI * x,
            TauUnit::Raw => x,
        }
    }

    pub fn jt_to_file(self, jt: f64) -> f64 {
        match self {
            TauUnit::TwoPi => jt / (2.0 * PI),
            TauUnit::Raw => jt,
        }
    }

    pub fn column(self, stem: &str) -> String {
        match self {
            TauUnit::TwoPi => format!("{stem}_over_2pi"),
            TauUnit::Raw => format!("{stem}_j"),
        }
    }
}

/// Correlator flavour for `lg-scan`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Collapsed,
    Factorized,
    Symmetrized,
}

fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<usize>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(Option::<OneOrMany>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(n) => vec![n],
        OneOrMany::Many(ns) => ns,
    }))
}

/// Every setting a command may read. Unset fields fall back to the JSON
/// config and then to the defaults in [`RunConfig::resolved`].
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// JSON file with default values for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Number of bosons; commands that compare sizes accept a list.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    #[serde(default, deserialize_with = "one_or_many", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,

    /// Λ = U/J.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_steps: Option<usize>,

    /// Tunnelling rate J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hopping: Option<f64>,

    /// Initial left-well occupation; defaults to N.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_left: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_min: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_max: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_stride: Option<usize>,

    /// τ grid: `tau_steps + 1` points from `tau_min` to `tau_max`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_steps: Option<usize>,

    /// Time grid of `evolve`, same layout and unit as the τ grid.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmin: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tsteps: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_unit: Option<TauUnit>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Model>,

    /// τ samples per Rabi period.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi_steps: Option<usize>,

    /// Output directory; without it the main table goes to stdout.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    /// Concurrent grid cells; defaults to the available parallelism.
    #[arg(long, env = "BJJ_LGI_WORKERS")]
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
}

macro_rules! layer {
    ($top:expr, $base:expr, $($field:ident),*) => {
        RunConfig { config: $top.config, $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    /// Fills unset fields from the file named by `--config`, if any.
    pub fn load(self) -> CliResult<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let base = read_config(&path)?;
        Ok(self.over(base))
    }

    fn over(self, base: RunConfig) -> RunConfig {
        layer!(
            self, base, n, lambda, lambda_min, lambda_max, lambda_steps, hopping, init_left, init_min, init_max,
            init_stride, tau_min, tau_max, tau_steps, tmin, tmax, tsteps, tau_unit, model, rabi_steps, out, format,
            workers
        )
    }

    /// The configuration with defaults written in, as echoed to sidecars.
    pub fn resolved(mut self) -> Self {
        self.hopping.get_or_insert(1.0);
        self.tau_unit.get_or_insert(TauUnit::TwoPi);
        self.format.get_or_insert(Format::Csv);
        self
    }

    pub fn hopping(&self) -> CliResult<f64> {
        let j = self.hopping.unwrap_or(1.0);
        if !(j.is_finite() && j > 0.0) {
            return Err(CliError::usage(format!("hopping must be positive and finite, got {j}")));
        }
        Ok(j)
    }

    pub fn unit(&self) -> TauUnit {
        self.tau_unit.unwrap_or(TauUnit::TwoPi)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn sizes(&self) -> CliResult<Vec<usize>> {
        let ns = self.n.clone().unwrap_or_default();
        if ns.is_empty() {
            return Err(CliError::usage("--n is required"));
        }
        if ns.contains(&0) {
            return Err(CliError::usage("N must be at least 1"));
        }
        Ok(ns)
    }

    pub fn size(&self) -> CliResult<usize> {
        match self.sizes()?.as_slice() {
            &[n] => Ok(n),
            _ => Err(CliError::usage("this command takes a single N")),
        }
    }

    /// The single `--lambda`, or the grid if its bounds are given.
    pub fn lambdas(&self) -> CliResult<Vec<f64>> {
        let grid = self.lambda_min.is_some() || self.lambda_max.is_some() || self.lambda_steps.is_some();
        match (self.lambda, grid) {
            (Some(_), true) => Err(CliError::usage("give either --lambda or a lambda grid, not both")),
            (Some(l), false) if l.is_finite() => Ok(vec![l]),
            (Some(l), false) => Err(CliError::usage(format!("lambda must be finite, got {l}"))),
            (None, true) => linear_grid("lambda", self.lambda_min, self.lambda_max, self.lambda_steps),
            (None, false) => Ok(vec![0.0]),
        }
    }

    pub fn has_lambda_grid(&self) -> bool {
        self.lambda_min.is_some() || self.lambda_max.is_some() || self.lambda_steps.is_some()
    }

    pub fn has_init_grid(&self) -> bool {
        self.init_min.is_some() || self.init_max.is_some() || self.init_stride.is_some()
    }

    /// `--init-left`, the init grid, or `N` when neither is given.
    pub fn initials(&self, n: usize) -> CliResult<Vec<usize>> {
        let values = match (self.init_left, self.has_init_grid()) {
            (Some(_), true) => return Err(CliError::usage("give either --init-left or an init grid, not both")),
            (Some(l), false) => vec![l],
            (None, true) => {
                let lo = self.init_min.unwrap_or(0);
                let hi = self.init_max.unwrap_or(n);
                let stride = self.init_stride.unwrap_or(1);
                if stride == 0 || hi < lo {
                    return Err(CliError::usage("init grid needs init_min <= init_max and a positive stride"));
                }
                (lo..=hi).step_by(stride).collect()
            }
            (None, false) => vec![n],
        };
        if let Some(&bad) = values.iter().find(|&&l| l > n) {
            return Err(CliError::usage(format!("initial occupation {bad} exceeds N = {n}")));
        }
        Ok(values)
    }

    /// τ grid in file units.
    pub fn taus(&self) -> CliResult<Vec<f64>> {
        nonnegative("tau", linear_grid("tau", Some(self.tau_min.unwrap_or(0.0)), self.tau_max, self.tau_steps)?)
    }

    /// `evolve` time grid in file units.
    pub fn times(&self) -> CliResult<Vec<f64>> {
        nonnegative("t", linear_grid("t", Some(self.tmin.unwrap_or(0.0)), self.tmax, self.tsteps)?)
    }

    pub fn workers(&self) -> CliResult<usize> {
        match self.workers {
            Some(0) => Err(CliError::usage("--workers must be at least 1")),
            Some(w) => Ok(w),
            None => Ok(std::thread::available_parallelism().map_or(1, |w| w.get())),
        }
    }
}

fn read_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// `steps + 1` evenly spaced points from `min` to `max`.
pub fn linear_grid(name: &str, min: Option<f64>, max: Option<f64>, steps: Option<usize>) -> CliResult<Vec<f64>> {
    let (Some(min), Some(max)) = (min, max) else {
        return Err(CliError::usage(format!("{name} grid needs both bounds")));
    };
    let steps = steps.unwrap_or(0);
    if steps == 0 {
        return Err(CliError::usage(format!("{name} grid is empty: steps must be at least 1")));
    }
    if !(min.is_finite() && max.is_finite() && max > min) {
        return Err(CliError::usage(format!("{name} grid must increase, got [{min}, {max}]")));
    }
    Ok((0..=steps)
        .map(|k| if k == steps { max } else { min + (max - min) * k as f64 / steps as f64 })
        .collect())
}

fn nonnegative(name: &str, grid: Vec<f64>) -> CliResult<Vec<f64>> {
    if grid[0] < 0.0 {
        return Err(CliError::usage(format!("{name} grid must start at or above zero")));
    }
    Ok(grid)
}
