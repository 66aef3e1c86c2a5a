use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ConfigValues;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const GIT_DESCRIBE: &str = env!("SEMISTABLE_GIT_DESCRIBE");

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io(dir))
}

/// Writes a CSV with `'\n'` line endings; each row is already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    let mut file = fs::File::create(path).map_err(io(path))?;
    file.write_all(text.as_bytes()).map_err(io(path))
}

/// Truncation scheme echoed in sidecars.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeEcho {
    pub delta: f64,
    pub lambda_delta: f64,
    pub sigma2_delta: f64,
}

impl From<&semistable::TruncationScheme> for SchemeEcho {
    fn from(s: &semistable::TruncationScheme) -> Self {
        Self {
            delta: s.delta,
            lambda_delta: s.lambda_delta,
            sigma2_delta: s.sigma2_delta,
        }
    }
}

/// Provenance written next to every data or report file. Passing the file
/// back through `--config` repeats the run.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar {
    pub command: String,
    pub config: ConfigValues,
    pub derived: semistable::verification::ParamsEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeEcho>,
    pub outputs: Vec<String>,
    pub version: String,
    pub git_describe: String,
}

impl Sidecar {
    pub fn new(command: &str, config: ConfigValues, params: &semistable::ModelParams) -> Self {
        Self {
            command: command.to_string(),
            config,
            derived: params.into(),
            scheme: None,
            outputs: Vec::new(),
            version: VERSION.to_string(),
            git_describe: GIT_DESCRIBE.to_string(),
        }
    }

    /// Writes `<stem>.meta.json` in `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<PathBuf, CliError> {
        let path = dir.join(format!("{stem}.meta.json"));
        write_json(&path, self)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }
}
