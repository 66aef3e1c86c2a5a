use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cli::RunArgs;
use crate::error::CliError;

pub const DEFAULT_OUT: &str = "semistable-out";
pub const OUT_ENV: &str = "SEMISTABLE_OUT";

/// Every configurable value. Files and sidecars use exactly these keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigValues {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_pert: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epoch_override: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_epoch: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<bool>,
}

#[derive(Deserialize)]
struct Sidecar {
    config: ConfigValues,
}

impl ConfigValues {
    pub fn from_args(a: &RunArgs) -> Self {
        Self {
            alpha: a.alpha,
            b: a.b,
            eps_pert: a.eps_pert,
            c: a.c,
            delta: a.delta,
            n: a.n,
            seed: a.seed,
            grid: a.grid.clone(),
            times: a.times.clone(),
            out: a.out.clone(),
            threads: a.threads,
            epoch_override: a.epoch_override,
            extra_epoch: a.extra_epoch,
            t0: a.t0,
            joint: a.joint,
        }
    }

    /// Reads a flat TOML file, or a `.json` file that is either flat or a
    /// sidecar with a `config` object.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
        if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            if value.get("config").is_some() {
                let side: Sidecar = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
                Ok(side.config)
            } else {
                serde_json::from_value(value).map_err(|e| bad(e.to_string()))
            }
        } else {
            toml::from_str(&text).map_err(|e| bad(e.to_string()))
        }
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: ConfigValues) -> Self {
        Self {
            alpha: over.alpha.or(self.alpha),
            b: over.b.or(self.b),
            eps_pert: over.eps_pert.or(self.eps_pert),
            c: over.c.or(self.c),
            delta: over.delta.or(self.delta),
            n: over.n.or(self.n),
            seed: over.seed.or(self.seed),
            grid: over.grid.or(self.grid),
            times: over.times.or(self.times),
            out: over.out.or(self.out),
            threads: over.threads.or(self.threads),
            epoch_override: over.epoch_override.or(self.epoch_override),
            extra_epoch: over.extra_epoch.or(self.extra_epoch),
            t0: over.t0.or(self.t0),
            joint: over.joint.or(self.joint),
        }
    }
}

/// Spacing of a [`GridSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Log,
    Linear,
}

/// `min:max:count[:log|lin]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub const fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Log => semistable::log_grid(self.min, self.max, self.count),
            Spacing::Linear => semistable::linear_grid(self.min, self.max, self.count),
        }
    }
}

impl FromStr for GridSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("grid `{s}`: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad("expected min:max:count[:log|lin]"));
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad("min is not a number"))?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad("max is not a number"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("count is not a non-negative integer"))?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("log") => Spacing::Log,
            Some("lin") | Some("linear") => Spacing::Linear,
            Some(_) => return Err(bad("spacing must be `log` or `lin`")),
        };
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(bad("need finite min <= max"));
        }
        if count == 0 {
            return Err(bad("count must be positive"));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(bad("a log grid needs min > 0"));
        }
        Ok(Self {
            min,
            max,
            count,
            spacing,
        })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = match self.spacing {
            Spacing::Log => "log",
            Spacing::Linear => "lin",
        };
        write!(f, "{}:{}:{}:{sp}", self.min, self.max, self.count)
    }
}

/// `start:end:steps`, giving `steps + 1` equally spaced times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSpec {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl TimeSpec {
    pub fn points(&self) -> Vec<f64> {
        let h = (self.end - self.start) / self.steps as f64;
        (0..=self.steps)
            .map(|k| if k == self.steps { self.end } else { self.start + h * k as f64 })
            .collect()
    }
}

impl FromStr for TimeSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Config(format!("times `{s}`: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:steps"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start is not a number"))?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad("end is not a number"))?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad("steps is not a non-negative integer"))?;
        if start != 0.0 {
            return Err(bad("paths start at time 0"));
        }
        if !end.is_finite() || end <= start || steps == 0 {
            return Err(bad("need end > start and steps > 0"));
        }
        Ok(Self { start, end, steps })
    }
}

impl fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.steps)
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: semistable::ModelParams,
    pub delta: f64,
    pub n: Option<usize>,
    pub seed: u64,
    pub grid: Option<GridSpec>,
    pub times: Option<TimeSpec>,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub epoch_override: Option<f64>,
    pub extra_epoch: Option<f64>,
    pub t0: f64,
    pub joint: bool,
}

impl RunConfig {
    /// Defaults, then the config file, then flags. The output directory
    /// falls back to `$SEMISTABLE_OUT` when neither sets it.
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => ConfigValues::load(path)?,
            None => ConfigValues::default(),
        };
        let v = file.overlay(ConfigValues::from_args(args));
        let params = semistable::ModelParams::new(
            v.alpha.unwrap_or(1.0),
            v.b.unwrap_or(0.5),
            v.eps_pert.unwrap_or(0.5),
            v.c.unwrap_or(1.0),
        )?;
        let delta = v.delta.unwrap_or(semistable::sampler::DEFAULT_DELTA);
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(CliError::Config(format!("delta = {delta} must be positive")));
        }
        if v.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        let t0 = v.t0.unwrap_or(0.2);
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(CliError::Config(format!("t0 = {t0} must be positive")));
        }
        for (name, e) in [("epoch_override", v.epoch_override), ("extra_epoch", v.extra_epoch)] {
            if let Some(e) = e {
                if !(e > 0.0) || !e.is_finite() {
                    return Err(CliError::Config(format!("{name} = {e} must be positive")));
                }
            }
        }
        let out = v
            .out
            .or_else(|| std::env::var_os(OUT_ENV).filter(|s| !s.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        Ok(Self {
            params,
            delta,
            n: v.n,
            seed: v.seed.unwrap_or(0),
            grid: v.grid.as_deref().map(str::parse).transpose()?,
            times: v.times.as_deref().map(str::parse).transpose()?,
            out,
            threads: v.threads,
            epoch_override: v.epoch_override,
            extra_epoch: v.extra_epoch,
            t0,
            joint: v.joint.unwrap_or(false),
        })
    }

    /// The values a sidecar records; `grid`, `n` and `times` are the ones
    /// the command actually used.
    pub fn to_values(&self, grid: Option<GridSpec>, n: Option<usize>, times: Option<TimeSpec>) -> ConfigValues {
        ConfigValues {
            alpha: Some(self.params.alpha()),
            b: Some(self.params.b()),
            eps_pert: Some(self.params.eps_pert()),
            c: Some(self.params.c()),
            delta: Some(self.delta),
            n,
            seed: Some(self.seed),
            grid: grid.map(|g| g.to_string()),
            times: times.map(|t| t.to_string()),
            out: None,
            threads: self.threads,
            epoch_override: self.epoch_override,
            extra_epoch: self.extra_epoch,
            t0: Some(self.t0),
            joint: Some(self.joint),
        }
    }
}
