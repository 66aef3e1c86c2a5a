use num_complex::Complex;
use rayon::prelude::*;

use super::calibrate::{calibrate_threshold, CalibrationConfig, NullStatistic};
use super::ecf::{cf_sup_distance, empirical_cf, joint_empirical_cf, sup_distance, two_sample_distance};
use super::report::VerificationReport;
use crate::ar1::{nonstationary_start_ar1, simulate_ar1, thinning_gap, Ar1Series, Start};
use crate::error::{Error, Result};
use crate::model::{Evaluator, SemiStableLaw};
use crate::sampler::{LevySampler, StreamId, TruncationScheme};
use crate::scalar::Scalar;

/// Paths per random stream when sampling in parallel chunks.
const CHUNK: usize = 2048;

fn real<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Residual of `psi(u) = epoch psi(epoch^{-1/alpha} u)` on `grid`; the
/// default epoch is the law's own `a = b^{-alpha}`.
pub fn check_functional_equation<T: Scalar>(
    law: &SemiStableLaw<T>,
    grid: &[T],
    epoch: Option<T>,
    route: Evaluator,
    tolerance: T,
) -> Result<VerificationReport> {
    let p = law.params();
    let (name, residual, epoch_used) = match epoch {
        None => ("semistable_equation", law.semistable_residual(grid, route)?, p.a()),
        Some(e) => {
            if !(e > T::zero()) || !e.is_finite() {
                return Err(Error::range("epoch", format!("epoch = {e} must be positive")));
            }
            ("scaling_equation_extra_epoch", law.epoch_residual(grid, e, route)?, e)
        }
    };
    Ok(VerificationReport::new(name, residual.as_f64(), tolerance.as_f64())
        .with_samples(grid.len())
        .with_params(p)
        .with_component("epoch", epoch_used.as_f64())
        .with_component("grid_points", grid.len() as f64)
        .with_notes(match route {
            Evaluator::Closed => "closed-form exponent",
            Evaluator::Quadrature => "quadrature exponent",
        }))
}

/// `max_u |psi_closed(u) - psi_quadrature(u)|`.
pub fn check_cross_evaluator<T: Scalar>(law: &SemiStableLaw<T>, grid: &[T], tolerance: T) -> Result<VerificationReport> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("frequency grid"));
    }
    let gaps: Result<Vec<T>> = grid
        .par_iter()
        .map(|&u| law.exponent_quadrature(u).map(|q| (q.psi - law.psi(u)).abs()))
        .collect();
    let worst = gaps?.into_iter().fold(T::zero(), T::max);
    Ok(VerificationReport::new("evaluator_agreement", worst.as_f64(), tolerance.as_f64())
        .with_samples(grid.len())
        .with_params(law.params()))
}

/// SSD(b) factor `f_0 = exp((a - 1) psi(b u))` with the exponent multiplied
/// by `factor_scale`, which is 1 for the true factor.
pub fn check_ssd_factor_scaled<T: Scalar>(law: &SemiStableLaw<T>, grid: &[T], factor_scale: T) -> Result<VerificationReport> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("frequency grid"));
    }
    let b = law.params().b();
    let f0 = |u: T| (factor_scale * law.ssd_factor_exponent(u)).exp();
    let at_zero = (f0(T::zero()) - T::one()).abs();
    let mut bounds = T::zero();
    let mut evenness = T::zero();
    let mut factorization = T::zero();
    for &u in grid {
        let v = f0(u);
        if !(v >= T::zero()) {
            bounds = bounds.max(T::one());
        }
        bounds = bounds.max(v - T::one());
        evenness = evenness.max((v - f0(-u)).abs());
        factorization = factorization.max((law.marginal_cf(u) - law.marginal_cf(b * u) * v).abs());
    }
    let worst = at_zero.max(bounds).max(evenness).max(factorization);
    Ok(VerificationReport::new("ssd_factor", worst.as_f64(), 1e-10)
        .with_samples(grid.len())
        .with_params(law.params())
        .with_component("f0_at_zero", at_zero.as_f64())
        .with_component("bounds_violation", bounds.as_f64())
        .with_component("evenness", evenness.as_f64())
        .with_component("factorization", factorization.as_f64())
        .with_component("factor_scale", factor_scale.as_f64()))
}

pub fn check_ssd_factor<T: Scalar>(law: &SemiStableLaw<T>, grid: &[T]) -> Result<VerificationReport> {
    check_ssd_factor_scaled(law, grid, T::one())
}

/// Window layout for [`check_stationarity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StationarityDesign {
    /// Thinning gap; `None` uses the smallest `g` with `b^g <= 0.01`.
    pub gap: Option<usize>,
    /// Minimum number of thinned points over both windows.
    pub min_effective: usize,
}

impl Default for StationarityDesign {
    fn default() -> Self {
        Self {
            gap: None,
            min_effective: 10_000,
        }
    }
}

fn window_triple<T: Scalar>(
    law: &SemiStableLaw<T>,
    w1: &[T],
    w2: &[T],
    grid: &[T],
    calib: &CalibrationConfig,
) -> Result<(T, T, T, T)> {
    let target = |u: T| real(law.marginal_cf(u));
    let e1 = empirical_cf(w1, grid)?;
    let e2 = empirical_cf(w2, grid)?;
    let d1 = cf_sup_distance(&e1, target);
    let d2 = cf_sup_distance(&e2, target);
    let d12 = two_sample_distance(&e1, &e2)?;
    let points: Vec<[T; 1]> = grid.iter().map(|&u| [u]).collect();
    let threshold = calibrate_threshold(
        |w: [T; 1]| law.marginal_cf(w[0]),
        &points,
        NullStatistic::WindowTriple {
            n1: w1.len(),
            n2: w2.len(),
        },
        calib,
    )?;
    Ok((d1, d2, d12, threshold))
}

/// Marginal stationarity along one series: the thinned series is cut into
/// two halves, and each half's ECF is compared with the stationary CF and
/// with the other half.
pub fn check_stationarity<T: Scalar>(
    law: &SemiStableLaw<T>,
    series: &Ar1Series<T>,
    grid: &[T],
    design: &StationarityDesign,
    calib: &CalibrationConfig,
) -> Result<VerificationReport> {
    let gap = design.gap.unwrap_or_else(|| thinning_gap(series.params.b()));
    let thinned = series.thinned(0, gap);
    let half = thinned.len() / 2;
    let (w1, w2) = thinned.split_at(half);
    if w1.is_empty() || w2.is_empty() {
        return Err(Error::InsufficientData(format!(
            "{} thinned points cannot fill two windows",
            thinned.len()
        )));
    }
    if thinned.len() < design.min_effective {
        return Err(Error::InsufficientData(format!(
            "{} thinned points (gap {gap}), need at least {}",
            thinned.len(),
            design.min_effective
        )));
    }
    let (d1, d2, d12, threshold) = window_triple(law, w1, w2, grid, calib)?;
    Ok(VerificationReport::new("stationarity", d1.max(d2).max(d12).as_f64(), threshold.as_f64())
        .with_samples(w1.len() + w2.len())
        .with_seed(series.stream.seed)
        .with_params(&series.params)
        .with_component("d_window1", d1.as_f64())
        .with_component("d_window2", d2.as_f64())
        .with_component("d_between", d12.as_f64())
        .with_component("gap", gap as f64)
        .with_component("window1_len", w1.len() as f64)
        .with_component("window2_len", w2.len() as f64)
        .with_component("level", calib.level))
}

/// Independent replicate series on child streams of `stream`.
pub fn simulate_ensemble<T: Scalar>(
    sampler: &LevySampler<'_, T>,
    steps: usize,
    replicates: usize,
    start: Start<T>,
    stream: StreamId,
) -> Result<Vec<Ar1Series<T>>> {
    (0..replicates as u64)
        .into_par_iter()
        .map(|r| match start {
            Start::Stationary => simulate_ar1(sampler, steps, stream.child(r)),
            Start::Fixed(x0) => nonstationary_start_ar1(sampler, steps, x0, stream.child(r)),
        })
        .collect()
}

/// Marginal stationarity across independent replicates: the cross-section
/// at time `early` and the one at time `late` are each compared with the
/// stationary CF and with each other. Replicates are independent, so the
/// i.i.d. calibration is exact up to the Gaussian limit.
pub fn check_stationarity_ensemble<T: Scalar>(
    law: &SemiStableLaw<T>,
    replicates: &[Ar1Series<T>],
    early: usize,
    late: usize,
    grid: &[T],
    calib: &CalibrationConfig,
) -> Result<VerificationReport> {
    if replicates.is_empty() {
        return Err(Error::InsufficientData("no replicate series".into()));
    }
    let mut w1 = Vec::with_capacity(replicates.len());
    let mut w2 = Vec::with_capacity(replicates.len());
    for s in replicates {
        match (s.values.get(early), s.values.get(late)) {
            (Some(&x), Some(&y)) => {
                w1.push(x);
                w2.push(y);
            }
            _ => {
                return Err(Error::InsufficientData(format!(
                    "series of length {} has no index {}",
                    s.values.len(),
                    early.max(late)
                )))
            }
        }
    }
    let (d1, d2, d12, threshold) = window_triple(law, &w1, &w2, grid, calib)?;
    let first = &replicates[0];
    Ok(
        VerificationReport::new("stationarity_ensemble", d1.max(d2).max(d12).as_f64(), threshold.as_f64())
            .with_samples(2 * w1.len())
            .with_seed(first.stream.seed)
            .with_params(&first.params)
            .with_component("d_early", d1.as_f64())
            .with_component("d_late", d2.as_f64())
            .with_component("d_between", d12.as_f64())
            .with_component("early_index", early as f64)
            .with_component("late_index", late as f64)
            .with_component("replicates", replicates.len() as f64)
            .with_component("level", calib.level),
    )
}

/// Settings of [`check_semiselfsimilar`].
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarDesign<T> {
    /// Epoch to test; `None` uses the law's `a = b^{-alpha}`.
    pub epoch: Option<T>,
    /// Also compare the joint law at `(t0, 2 t0)` against its rescaled copy.
    pub joint: bool,
    pub grid: Vec<T>,
}

impl<T: Scalar> SelfSimilarDesign<T> {
    pub fn new(grid: Vec<T>) -> Self {
        Self {
            epoch: None,
            joint: true,
            grid,
        }
    }
}

fn draw_pairs<T: Scalar>(
    sampler: &LevySampler<'_, T>,
    s: T,
    scale: T,
    joint: bool,
    n: usize,
    stream: StreamId,
) -> Result<Vec<[T; 2]>> {
    let chunks: Result<Vec<Vec<[T; 2]>>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            let mut rng = stream.child(k as u64).rng();
            (0..len)
                .map(|_| {
                    let z1 = sampler.sample_increment(s, &mut rng)?;
                    let z2 = if joint {
                        z1 + sampler.sample_increment(s, &mut rng)?
                    } else {
                        T::zero()
                    };
                    Ok([scale * z1, scale * z2])
                })
                .collect()
        })
        .collect();
    Ok(chunks?.into_iter().flatten().collect())
}

/// Two-sample test of `Z(a t0) = a^H Z(t0)` in law with `H = 1/alpha`.
///
/// The one-dimensional marginals are compared on `design.grid`; with
/// `design.joint` the pairs `(Z(a t0), Z(2 a t0))` and
/// `a^H (Z(t0), Z(2 t0))` are also compared at the frequency pairs
/// `(u, u)` and `(u, -u)` for every fourth grid point.
pub fn check_semiselfsimilar<T: Scalar>(
    sampler: &LevySampler<'_, T>,
    t0: T,
    n_paths: usize,
    design: &SelfSimilarDesign<T>,
    calib: &CalibrationConfig,
    stream: StreamId,
) -> Result<VerificationReport> {
    if !(t0 > T::zero()) || !t0.is_finite() {
        return Err(Error::range("t0", format!("t0 = {t0} must be positive")));
    }
    if n_paths < 10_000 {
        return Err(Error::range("n_paths", format!("n_paths = {n_paths} must be at least 10000")));
    }
    let law = sampler.law();
    let p = law.params();
    let epoch = design.epoch.unwrap_or(p.a());
    if !(epoch > T::zero()) || !epoch.is_finite() {
        return Err(Error::range("epoch", format!("epoch = {epoch} must be positive")));
    }
    let scale = epoch.powf(p.hurst());
    let s = epoch * t0;

    let lhs = draw_pairs(sampler, s, T::one(), design.joint, n_paths, stream.child(0))?;
    let rhs = draw_pairs(sampler, t0, scale, design.joint, n_paths, stream.child(1))?;

    let mut points: Vec<[T; 2]> = design.grid.iter().map(|&u| [u, T::zero()]).collect();
    let n_marginal = points.len();
    if design.joint {
        for &u in design.grid.iter().step_by(4) {
            points.push([u, u]);
            points.push([u, -u]);
        }
    }
    let e1 = joint_empirical_cf(&lhs, &points)?;
    let e2 = joint_empirical_cf(&rhs, &points)?;
    let d_marginal = sup_distance(&e1.re[..n_marginal], &e1.im[..n_marginal], &e2.re[..n_marginal], &e2.im[..n_marginal]);
    let d_joint = sup_distance(&e1.re[n_marginal..], &e1.im[n_marginal..], &e2.re[n_marginal..], &e2.im[n_marginal..]);

    // joint CF of (Z(s), Z(2s)) at (u1, u2) is exp(s psi(u1 + u2) + s psi(u2))
    let null_cf = |w: [T; 2]| (s * (law.psi(w[0] + w[1]) + law.psi(w[1]))).exp();
    let threshold = calibrate_threshold(
        null_cf,
        &points,
        NullStatistic::TwoSample {
            n1: n_paths,
            n2: n_paths,
        },
        calib,
    )?;
    let statistic = d_marginal.max(d_joint);
    Ok(VerificationReport::new("semiselfsimilar", statistic.as_f64(), threshold.as_f64())
        .with_samples(2 * n_paths)
        .with_seed(stream.seed)
        .with_params(p)
        .with_component("epoch", epoch.as_f64())
        .with_component("hurst", p.hurst().as_f64())
        .with_component("t0", t0.as_f64())
        .with_component("d_marginal", d_marginal.as_f64())
        .with_component("d_joint", d_joint.as_f64())
        .with_component("level", calib.level)
        .with_notes(if design.joint {
            "marginal at a*t0 plus joint pair (a*t0, 2a*t0)"
        } else {
            "marginal at a*t0 only"
        }))
}

/// Which law the sampler fidelity check targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FidelityTarget<T> {
    /// `Z(t)` against `exp(t psi(u))`.
    Increment(T),
    /// `b Z(a - 1)` against `exp((a - 1) psi(b u))`.
    Innovation,
}

/// Empirical CF of `n` sampler draws against the exact CF. The threshold
/// is `4/sqrt(n)` plus the exact CF gap between the truncated scheme and the
/// true law. With `finer_delta`, a second run at that cutoff is made and
/// the change in distance is recorded as `empirical_bias_gap`.
pub fn check_sampler_fidelity<T: Scalar>(
    sampler: &LevySampler<'_, T>,
    target: FidelityTarget<T>,
    n: usize,
    grid: &[T],
    stream: StreamId,
    finer_delta: Option<T>,
) -> Result<VerificationReport> {
    if n == 0 {
        return Err(Error::EmptyInput("sample count"));
    }
    let law = sampler.law();
    let p = law.params();
    let (name, t, span) = match target {
        FidelityTarget::Increment(t) => ("sampler_increment", t, T::one()),
        FidelityTarget::Innovation => ("sampler_innovation", p.innovation_time(), p.b()),
    };
    let exact = |u: T| real((t * law.psi(span * u)).exp());

    let run = |smp: &LevySampler<'_, T>, id: StreamId| -> Result<T> {
        let draws: Result<Vec<Vec<T>>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|k| {
                let mut rng = id.child(k as u64).rng();
                (0..CHUNK.min(n - k * CHUNK))
                    .map(|_| match target {
                        FidelityTarget::Increment(t) => smp.sample_increment(t, &mut rng),
                        FidelityTarget::Innovation => smp.sample_innovation(&mut rng),
                    })
                    .collect()
            })
            .collect();
        let xs: Vec<T> = draws?.into_iter().flatten().collect();
        Ok(cf_sup_distance(&empirical_cf(&xs, grid)?, exact))
    };

    let distance = run(sampler, stream)?;
    let bias = sampler.scheme().cf_bias(law, t, span, grid);
    let noise = T::lit(4.0) / T::of_usize(n).sqrt();
    let mut report = VerificationReport::new(name, distance.as_f64(), (noise + bias).as_f64())
        .with_samples(n)
        .with_seed(stream.seed)
        .with_params(p)
        .with_component("delta", sampler.scheme().delta.as_f64())
        .with_component("noise_allowance", noise.as_f64())
        .with_component("bias", bias.as_f64())
        .with_component("time", t.as_f64());
    if let Some(fine) = finer_delta {
        let scheme = TruncationScheme::build(law, fine)?;
        let fine_sampler = LevySampler::new(law, scheme);
        let fine_distance = run(&fine_sampler, stream.child(u64::MAX))?;
        report = report
            .with_component("finer_delta", fine.as_f64())
            .with_component("finer_distance", fine_distance.as_f64())
            .with_component("empirical_bias_gap", (distance - fine_distance).as_f64());
    }
    Ok(report)
}
