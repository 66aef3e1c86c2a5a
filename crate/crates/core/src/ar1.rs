//! The AR(1) scheme `X_k = b X_{k-1} + eps_k` with semi-stable marginals.
//!
//! With `X_0 ~ Z(1)` and `eps_k ~ b Z(a - 1)` every `X_k` has the law of
//! `Z(1)`: on the exponent scale `psi(bu) + (a - 1) psi(bu) = a psi(bu) = psi(u)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, SemiStableLaw};
use crate::sampler::{LevySampler, StreamId, TruncationScheme};
use crate::scalar::Scalar;

/// How `X_0` was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", bound = "T: Scalar")]
pub enum Start<T> {
    /// `X_0` drawn from the stationary law `Z(1)`.
    Stationary,
    /// Deterministic `X_0`.
    Fixed(T),
}

/// A realization `X_0, ..., X_n` together with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Ar1Series<T> {
    pub values: Vec<T>,
    /// `eps_1, ..., eps_n` exactly as added.
    pub innovations: Vec<T>,
    pub params: ModelParams<T>,
    pub scheme: TruncationScheme<T>,
    pub stream: StreamId,
    pub start: Start<T>,
    pub n: usize,
}

impl<T: Scalar> Ar1Series<T> {
    /// `X_k - b X_{k-1}` for `k = 1..=n`.
    pub fn reconstruct_innovations(&self) -> Vec<T> {
        let b = self.params.b();
        self.values.windows(2).map(|w| w[1] - b * w[0]).collect()
    }

    /// Every `gap`-th value starting at `offset`.
    pub fn thinned(&self, offset: usize, gap: usize) -> Vec<T> {
        self.values.iter().skip(offset).step_by(gap.max(1)).copied().collect()
    }
}

/// Supplies innovations to the recursion.
pub trait InnovationSource<T> {
    fn next_innovation(&mut self) -> Result<T>;
}

/// Innovations `b Z(a - 1)` drawn from a Levy sampler.
pub struct LevyInnovations<'s, 'a, T, R> {
    sampler: &'s LevySampler<'a, T>,
    rng: &'s mut R,
}

impl<'s, 'a, T: Scalar, R: Rng> LevyInnovations<'s, 'a, T, R> {
    pub fn new(sampler: &'s LevySampler<'a, T>, rng: &'s mut R) -> Self {
        Self { sampler, rng }
    }
}

impl<T: Scalar, R: Rng> InnovationSource<T> for LevyInnovations<'_, '_, T, R> {
    fn next_innovation(&mut self) -> Result<T> {
        self.sampler.sample_innovation(self.rng)
    }
}

/// Always returns zero; isolates the deterministic part of the recursion.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroInnovations;

impl<T: Scalar> InnovationSource<T> for ZeroInnovations {
    fn next_innovation(&mut self) -> Result<T> {
        Ok(T::zero())
    }
}

/// Runs `n` steps of the recursion from `x0`; returns `(values, innovations)`.
pub fn run_recursion<T: Scalar, S: InnovationSource<T> + ?Sized>(
    b: T,
    x0: T,
    n: usize,
    source: &mut S,
) -> Result<(Vec<T>, Vec<T>)> {
    let mut values = Vec::with_capacity(n + 1);
    let mut innovations = Vec::with_capacity(n);
    values.push(x0);
    let mut x = x0;
    for _ in 0..n {
        let e = source.next_innovation()?;
        x = b * x + e;
        values.push(x);
        innovations.push(e);
    }
    Ok((values, innovations))
}

/// Stationary run: `X_0 ~ Z(1)`, then `n` innovations from the same stream.
pub fn simulate_ar1<T: Scalar>(sampler: &LevySampler<'_, T>, n: usize, stream: StreamId) -> Result<Ar1Series<T>> {
    let mut rng = stream.rng();
    let x0 = sampler.sample_increment(T::one(), &mut rng)?;
    let params = *sampler.law().params();
    let mut source = LevyInnovations::new(sampler, &mut rng);
    let (values, innovations) = run_recursion(params.b(), x0, n, &mut source)?;
    Ok(Ar1Series {
        values,
        innovations,
        params,
        scheme: *sampler.scheme(),
        stream,
        start: Start::Stationary,
        n,
    })
}

/// Run from a deterministic `x0`; its influence after `k` steps is `b^k x0`.
pub fn nonstationary_start_ar1<T: Scalar>(
    sampler: &LevySampler<'_, T>,
    n: usize,
    x0: T,
    stream: StreamId,
) -> Result<Ar1Series<T>> {
    if !x0.is_finite() {
        return Err(Error::range("x0", format!("x0 = {x0} must be finite")));
    }
    let mut rng = stream.rng();
    let params = *sampler.law().params();
    let mut source = LevyInnovations::new(sampler, &mut rng);
    let (values, innovations) = run_recursion(params.b(), x0, n, &mut source)?;
    Ok(Ar1Series {
        values,
        innovations,
        params,
        scheme: *sampler.scheme(),
        stream,
        start: Start::Fixed(x0),
        n,
    })
}

/// The stationary marginal CF, i.e. that of `Z(1)`.
pub fn theoretical_marginal_cf<T: Scalar>(law: &SemiStableLaw<T>, u: T) -> T {
    law.marginal_cf(u)
}

/// Smallest `g` with `b^g <= 0.01`.
pub fn thinning_gap<T: Scalar>(b: T) -> usize {
    let g = (T::lit(0.01).ln() / b.ln()).ceil();
    g.to_usize().unwrap_or(1).max(1)
}
