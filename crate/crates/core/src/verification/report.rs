use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::scalar::Scalar;

/// Parameter echo carried by every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub alpha: f64,
    pub b: f64,
    pub eps_pert: f64,
    pub c: f64,
    pub a: f64,
    pub omega: f64,
    pub hurst: f64,
}

impl<T: Scalar> From<&ModelParams<T>> for ParamsEcho {
    fn from(p: &ModelParams<T>) -> Self {
        Self {
            alpha: p.alpha().as_f64(),
            b: p.b().as_f64(),
            eps_pert: p.eps_pert().as_f64(),
            c: p.c().as_f64(),
            a: p.a().as_f64(),
            omega: p.omega().as_f64(),
            hurst: p.hurst().as_f64(),
        }
    }
}

/// Outcome of one check. `passed` is always `statistic <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub n_samples: usize,
    pub seed: Option<u64>,
    pub params: Option<ParamsEcho>,
    /// Named sub-statistics and settings, sorted by key.
    pub components: BTreeMap<String, f64>,
    pub notes: String,
}

impl VerificationReport {
    pub fn new(check_name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            check_name: check_name.into(),
            statistic,
            threshold,
            passed: statistic <= threshold,
            n_samples: 0,
            seed: None,
            params: None,
            components: BTreeMap::new(),
            notes: String::new(),
        }
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_params<T: Scalar>(mut self, params: &ModelParams<T>) -> Self {
        self.params = Some(params.into());
        self
    }

    pub fn with_component(mut self, key: &str, value: f64) -> Self {
        self.components.insert(key.to_string(), value);
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "[{}] {}: statistic {:.6e} vs threshold {:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_name,
            self.statistic,
            self.threshold
        )?;
        for (k, v) in &self.components {
            writeln!(f, "    {k} = {v:.6e}")?;
        }
        if !self.notes.is_empty() {
            writeln!(f, "    note: {}", self.notes)?;
        }
        Ok(())
    }
}
