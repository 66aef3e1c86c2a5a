//! Null-distribution thresholds for sup-distance CF statistics.
//!
//! Under the null every sample set is i.i.d. from a symmetric law with real
//! CF `phi`, so `sqrt(n) (ecf - phi)` on a finite set of frequencies is
//! asymptotically Gaussian with
//! `Cov(cos<w,X>, cos<v,X>) = (phi(w-v) + phi(w+v))/2 - phi(w) phi(v)`,
//! `Cov(sin<w,X>, sin<v,X>) = (phi(w-v) - phi(w+v))/2`
//! and no cos/sin cross terms. Replicates of the statistic are drawn from
//! that limit and the requested quantile is returned.

use crate::error::{Error, Result};
use crate::sampler::StreamId;
use crate::scalar::Scalar;

/// Shape of the statistic being calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullStatistic {
    /// `sup |ecf - phi|` for one sample of size `n`.
    OneSample { n: usize },
    /// `sup |ecf_1 - ecf_2|` for independent samples.
    TwoSample { n1: usize, n2: usize },
    /// `max(sup|ecf_1 - phi|, sup|ecf_2 - phi|, sup|ecf_1 - ecf_2|)`.
    WindowTriple { n1: usize, n2: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationConfig {
    pub n_boot: usize,
    /// Quantile of the null distribution used as threshold, e.g. 0.95.
    pub level: f64,
    pub stream: StreamId,
}

impl CalibrationConfig {
    pub fn new(stream: StreamId) -> Self {
        Self {
            n_boot: 4000,
            level: 0.95,
            stream,
        }
    }
}

/// Lower-triangular `L` with `L L^T ~= A` for a symmetric positive
/// semidefinite `A`; directions with (numerically) zero variance are dropped.
fn psd_factor<T: Scalar>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let m = a.len();
    let max_diag = a.iter().enumerate().map(|(i, r)| r[i]).fold(T::zero(), T::max);
    let tol = max_diag * T::lit(1e-12);
    let mut l = vec![vec![T::zero(); m]; m];
    for j in 0..m {
        let d = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<T>();
        if d <= tol {
            continue;
        }
        let root = d.sqrt();
        l[j][j] = root;
        for i in j + 1..m {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<T>();
            l[i][j] = s / root;
        }
    }
    l
}

fn apply<T: Scalar>(l: &[Vec<T>], z: &[T], out: &mut [T]) {
    for (i, row) in l.iter().enumerate() {
        out[i] = row[..=i].iter().zip(z).map(|(&a, &b)| a * b).sum();
    }
}

/// The `level` quantile of the statistic under the null law with CF
/// `null_cf`, estimated from `n_boot >= 200` Gaussian-limit replicates.
pub fn calibrate_threshold<T, const D: usize, F>(
    null_cf: F,
    points: &[[T; D]],
    statistic: NullStatistic,
    config: &CalibrationConfig,
) -> Result<T>
where
    T: Scalar,
    F: Fn([T; D]) -> T,
{
    if config.n_boot < 200 {
        return Err(Error::range("n_boot", format!("n_boot = {} must be at least 200", config.n_boot)));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::range("level", format!("level = {} must lie in (0, 1)", config.level)));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput("frequency grid"));
    }
    let (n1, n2) = match statistic {
        NullStatistic::OneSample { n } => (n, 1),
        NullStatistic::TwoSample { n1, n2 } | NullStatistic::WindowTriple { n1, n2 } => (n1, n2),
    };
    if n1 == 0 || n2 == 0 {
        return Err(Error::range("n_samples", "sample sizes must be positive"));
    }

    let m = points.len();
    let add = |w: &[T; D], v: &[T; D], sign: T| {
        let mut out = [T::zero(); D];
        for k in 0..D {
            out[k] = w[k] + sign * v[k];
        }
        out
    };
    let phi: Vec<T> = points.iter().map(|w| null_cf(*w)).collect();
    let mut cov_c = vec![vec![T::zero(); m]; m];
    let mut cov_s = vec![vec![T::zero(); m]; m];
    let half = T::lit(0.5);
    for i in 0..m {
        for j in 0..=i {
            let minus = null_cf(add(&points[i], &points[j], -T::one()));
            let plus = null_cf(add(&points[i], &points[j], T::one()));
            let cc = half * (minus + plus) - phi[i] * phi[j];
            let ss = half * (minus - plus);
            cov_c[i][j] = cc;
            cov_c[j][i] = cc;
            cov_s[i][j] = ss;
            cov_s[j][i] = ss;
        }
    }
    let l_c = psd_factor(&cov_c);
    let l_s = psd_factor(&cov_s);

    let s1 = T::one() / T::of_usize(n1).sqrt();
    let s2 = T::one() / T::of_usize(n2).sqrt();
    let mut rng = config.stream.rng();
    let mut z = vec![T::zero(); m];
    let mut g = [vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m], vec![T::zero(); m]];
    let draws = match statistic {
        NullStatistic::OneSample { .. } => 1,
        _ => 2,
    };
    let mut stats = Vec::with_capacity(config.n_boot);
    for _ in 0..config.n_boot {
        for d in 0..draws {
            for (k, l) in [&l_c, &l_s].into_iter().enumerate() {
                for zi in z.iter_mut() {
                    *zi = T::sample_std_normal(&mut rng);
                }
                apply(l, &z, &mut g[2 * d + k]);
            }
        }
        let sup = |f: &dyn Fn(usize) -> (T, T)| (0..m).map(|i| {
            let (a, b) = f(i);
            a.hypot(b)
        }).fold(T::zero(), T::max);
        let stat = match statistic {
            NullStatistic::OneSample { .. } => sup(&|i| (g[0][i] * s1, g[1][i] * s1)),
            NullStatistic::TwoSample { .. } => {
                sup(&|i| (g[0][i] * s1 - g[2][i] * s2, g[1][i] * s1 - g[3][i] * s2))
            }
            NullStatistic::WindowTriple { .. } => {
                let d1 = sup(&|i| (g[0][i] * s1, g[1][i] * s1));
                let d2 = sup(&|i| (g[2][i] * s2, g[3][i] * s2));
                let d12 = sup(&|i| (g[0][i] * s1 - g[2][i] * s2, g[1][i] * s1 - g[3][i] * s2));
                d1.max(d2).max(d12)
            }
        };
        stats.push(stat);
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let rank = ((config.level * config.n_boot as f64).ceil() as usize).clamp(1, config.n_boot);
    Ok(stats[rank - 1])
}
