//! Approximate sampling of the semi-stable Levy process.
//!
//! Jumps larger than `delta` form a compound Poisson process; the jumps
//! below `delta` are replaced by a Brownian component of matching variance.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SemiStableLaw;
use crate::quadrature::integrate;
use crate::scalar::Scalar;

/// Default lower bound on `sqrt(sigma2_delta) / delta`.
pub const DEFAULT_QUALITY_FLOOR: f64 = 3.0;

/// Default jump truncation level.
pub const DEFAULT_DELTA: f64 = 0.01;

const MAX_REJECTIONS: usize = 1_000_000;

/// Address of an independent random stream: a seed plus a ChaCha stream
/// number. Distinct `(seed, stream)` pairs never share output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream: u64,
}

impl StreamId {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Derived stream for the `k`-th subtask.
    pub fn child(&self, k: u64) -> Self {
        // splitmix64 finalizer over (stream, k)
        let mut z = self
            .stream
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Self {
            seed: self.seed,
            stream: z ^ (z >> 31),
        }
    }
}

/// Intensities of the truncated simulation scheme at cutoff `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TruncationScheme<T> {
    pub delta: T,
    /// Rate of jumps with `|x| > delta`.
    pub lambda_delta: T,
    /// Variance per unit time of the jumps with `|x| <= delta`.
    pub sigma2_delta: T,
}

impl<T: Scalar> TruncationScheme<T> {
    /// Builds the scheme with the default quality floor of 3.
    pub fn build(law: &SemiStableLaw<T>, delta: T) -> Result<Self> {
        Self::build_with_floor(law, delta, T::lit(DEFAULT_QUALITY_FLOOR))
    }

    /// `lambda = 2c [d^{-a}/a + eps Re(d^{-a+iw}/(a-iw))]`,
    /// `sigma2 = 2c [d^{2-a}/(2-a) + eps Re(d^{2-a+iw}/(2-a+iw))]`.
    pub fn build_with_floor(law: &SemiStableLaw<T>, delta: T, quality_floor: T) -> Result<Self> {
        if !delta.is_finite() || delta <= T::zero() {
            return Err(Error::range("delta", format!("delta = {delta} must be positive")));
        }
        let p = law.params();
        let (alpha, eps, c) = (p.alpha(), p.eps_pert(), p.c());
        let omega = law.omega();
        let two = T::lit(2.0);
        let ln_d = delta.ln();
        let rot = Complex::new((omega * ln_d).cos(), (omega * ln_d).sin());

        let tail = delta.powf(-alpha);
        let lambda_delta = two * c * (tail / alpha + eps * (rot * tail / Complex::new(alpha, -omega)).re);

        let body = delta.powf(two - alpha);
        let sigma2_delta =
            two * c * (body / (two - alpha) + eps * (rot * body / Complex::new(two - alpha, omega)).re);

        if !(lambda_delta > T::zero() && lambda_delta.is_finite() && sigma2_delta > T::zero() && sigma2_delta.is_finite()) {
            return Err(Error::Internal(format!(
                "degenerate truncation intensities lambda = {lambda_delta}, sigma2 = {sigma2_delta}"
            )));
        }
        let ratio = sigma2_delta.sqrt() / delta;
        if ratio < quality_floor {
            return Err(Error::Accuracy {
                ratio: ratio.as_f64(),
                floor: quality_floor.as_f64(),
            });
        }
        Ok(Self {
            delta,
            lambda_delta,
            sigma2_delta,
        })
    }

    pub fn quality_ratio(&self) -> T {
        self.sigma2_delta.sqrt() / self.delta
    }

    /// Exponent of the scheme minus the true exponent at frequency `v`:
    /// `2c int_0^delta (1 - cos vx - v^2 x^2 / 2) theta(ln x) x^{-1-alpha} dx`.
    pub fn exponent_defect(&self, law: &SemiStableLaw<T>, v: T) -> T {
        let p = law.params();
        let (alpha, eps, c) = (p.alpha(), p.eps_pert(), p.c());
        let omega = law.omega();
        let v = v.abs();
        if v == T::zero() {
            return T::zero();
        }
        let two = T::lit(2.0);
        let x1 = self.delta.min(T::one() / v);
        let phase = omega * x1.ln();
        let rot = Complex::new(phase.cos(), phase.sin());
        let y2 = (v * x1) * (v * x1);
        let mut power = y2 / two;
        let mut series = T::zero();
        for k in 2..40usize {
            let kk = T::of_usize(k);
            power = power * y2 / ((two * kk - T::one()) * two * kk);
            let m = two * kk - alpha;
            let moment = T::one() / m + eps * (rot / Complex::new(m, omega)).re;
            let term = power * moment;
            series = if k % 2 == 0 { series - term } else { series + term };
            if term.abs() <= T::epsilon() * series.abs() {
                break;
            }
        }
        let mut total = series * x1.powf(-alpha);
        if x1 < self.delta {
            let f = |x: T| {
                let y = v * x;
                (T::one() - y.cos() - y * y / two) * law.theta(x.ln()) * x.powf(-(T::one() + alpha))
            };
            let mut breaks = vec![x1];
            let mut k = (v * x1 / T::PI()).floor() + T::one();
            while k * T::PI() < v * self.delta && breaks.len() < 10_000 {
                breaks.push(k * T::PI() / v);
                k = k + T::one();
            }
            breaks.push(self.delta);
            if let Ok(r) = integrate(f, &breaks, law.quad_config()) {
                total = total + r.value;
            }
        }
        two * c * total
    }

    /// `max_u |exp(t psi_scheme(span u)) - exp(t psi(span u))|` over `grid`:
    /// the exact CF error of the truncated scheme at time `t`.
    pub fn cf_bias(&self, law: &SemiStableLaw<T>, t: T, span: T, grid: &[T]) -> T {
        grid.iter()
            .map(|&u| {
                let v = span * u;
                let psi = law.psi(v);
                ((t * (psi + self.exponent_defect(law, v))).exp() - (t * psi).exp()).abs()
            })
            .fold(T::zero(), T::max)
    }
}

/// A realization of the Levy process on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SamplePath<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    pub stream: StreamId,
    pub scheme: TruncationScheme<T>,
}

/// Sampler for increments of `Z` under a fixed truncation scheme.
#[derive(Debug, Clone)]
pub struct LevySampler<'a, T> {
    law: &'a SemiStableLaw<T>,
    scheme: TruncationScheme<T>,
    innovation_count: Option<Poisson<f64>>,
}

impl<'a, T: Scalar> LevySampler<'a, T> {
    pub fn new(law: &'a SemiStableLaw<T>, scheme: TruncationScheme<T>) -> Self {
        let rate = (law.params().innovation_time() * scheme.lambda_delta).as_f64();
        Self {
            law,
            scheme,
            innovation_count: Poisson::new(rate).ok(),
        }
    }

    pub fn law(&self) -> &'a SemiStableLaw<T> {
        self.law
    }

    pub fn scheme(&self) -> &TruncationScheme<T> {
        &self.scheme
    }

    /// One jump from the normalized Levy measure restricted to `|x| > delta`:
    /// a Pareto(alpha, delta) proposal accepted with probability
    /// `theta(ln x) / (1 + eps)`, then a fair random sign.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T> {
        let p = self.law.params();
        let inv_alpha = T::one() / p.alpha();
        let ln_delta = self.scheme.delta.ln();
        let eps = p.eps_pert();
        let envelope = T::one() + eps;
        for _ in 0..MAX_REJECTIONS {
            let s = ln_delta - T::sample_open01(rng).ln() * inv_alpha;
            let accepted = eps == T::zero() || T::sample_open01(rng) * envelope <= self.law.theta(s);
            if accepted {
                let magnitude = s.exp();
                return Ok(if rng.random::<bool>() { magnitude } else { -magnitude });
            }
        }
        Err(Error::Internal(format!(
            "jump rejection sampler exceeded {MAX_REJECTIONS} proposals"
        )))
    }

    fn increment_with<R: Rng + ?Sized>(&self, t: T, count: Option<&Poisson<f64>>, rng: &mut R) -> Result<T> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::range("t", format!("t = {t} must be non-negative")));
        }
        if t == T::zero() {
            return Ok(T::zero());
        }
        let mut total = (t * self.scheme.sigma2_delta).sqrt() * T::sample_std_normal(rng);
        let n = match count {
            Some(dist) => dist.sample(rng) as u64,
            None => {
                let mean = (t * self.scheme.lambda_delta).as_f64();
                Poisson::new(mean)
                    .map_err(|e| Error::Internal(format!("Poisson({mean}): {e}")))?
                    .sample(rng) as u64
            }
        };
        for _ in 0..n {
            total = total + self.sample_jump(rng)?;
        }
        Ok(total)
    }

    /// `Z(t)`: Gaussian small-jump part plus a Poisson number of large jumps.
    pub fn sample_increment<R: Rng + ?Sized>(&self, t: T, rng: &mut R) -> Result<T> {
        self.increment_with(t, None, rng)
    }

    /// AR(1) innovation `b Z(a - 1)`.
    pub fn sample_innovation<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T> {
        let p = self.law.params();
        let z = self.increment_with(p.innovation_time(), self.innovation_count.as_ref(), rng)?;
        Ok(p.b() * z)
    }

    /// Path of `Z` on `times` (sorted, starting at 0), built from independent
    /// increments over consecutive gaps.
    pub fn sample_path(&self, times: &[T], stream: StreamId) -> Result<SamplePath<T>> {
        validate_times(times)?;
        let mut rng = stream.rng();
        let mut values = Vec::with_capacity(times.len());
        values.push(T::zero());
        let mut level = T::zero();
        for w in times.windows(2) {
            level = level + self.sample_increment(w[1] - w[0], &mut rng)?;
            values.push(level);
        }
        Ok(SamplePath {
            times: times.to_vec(),
            values,
            stream,
            scheme: self.scheme,
        })
    }
}

fn validate_times<T: Scalar>(times: &[T]) -> Result<()> {
    match times.first() {
        None => return Err(Error::Order("time grid is empty".into())),
        Some(&t0) if t0 != T::zero() => {
            return Err(Error::Order(format!("time grid must start at 0, got {t0}")))
        }
        _ => {}
    }
    for (i, w) in times.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::Order(format!(
                "times must be finite and strictly increasing: t[{}] = {}, t[{}] = {}",
                i,
                w[0],
                i + 1,
                w[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::quadrature::{integrate, QuadConfig};
    use approx::assert_abs_diff_eq;

    fn law(alpha: f64, b: f64, eps: f64) -> SemiStableLaw<f64> {
        SemiStableLaw::new(ModelParams::new(alpha, b, eps, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn cauchy_intensities() {
        // lambda = 2 / delta, sigma2 = 2 delta for alpha = 1, c = 1
        let s = TruncationScheme::build(&law(1.0, 0.5, 0.0), 0.1).unwrap();
        assert_abs_diff_eq!(s.lambda_delta, 20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma2_delta, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn intensities_match_quadrature() {
        let l = law(1.3, 0.4, 0.5);
        let delta = 0.05;
        let s = TruncationScheme::build(&l, delta).unwrap();
        let cfg = QuadConfig::default();
        let logs: Vec<f64> = (0..=400).map(|k| delta.ln() + 0.05 * k as f64).collect();
        // tail mass in s = ln x, truncated where e^{-alpha s} is negligible
        let tail = integrate(|s: f64| l.levy_density(s.exp()).unwrap() * s.exp(), &logs, &cfg).unwrap().value;
        assert_abs_diff_eq!(s.lambda_delta, 2.0 * tail, epsilon = 1e-6);
        let small: Vec<f64> = (0..=600).map(|k| delta.ln() - 0.05 * (600 - k) as f64).collect();
        let body = integrate(|s: f64| l.levy_density(s.exp()).unwrap() * (3.0 * s).exp(), &small, &cfg).unwrap().value;
        assert_abs_diff_eq!(s.sigma2_delta, 2.0 * body, epsilon = 1e-9);
    }

    #[test]
    fn intensities_monotone_in_delta() {
        let l = law(0.9, 0.5, 0.9);
        let mut prev: Option<TruncationScheme<f64>> = None;
        for &d in &[0.001, 0.003, 0.01, 0.03] {
            let s = TruncationScheme::build(&l, d).unwrap();
            if let Some(p) = prev {
                assert!(s.lambda_delta < p.lambda_delta);
                assert!(s.sigma2_delta > p.sigma2_delta);
            }
            prev = Some(s);
        }
    }

    #[test]
    fn coarse_delta_rejected() {
        let l = law(1.0, 0.5, 0.0);
        assert!(matches!(TruncationScheme::build(&l, 1.0), Err(Error::Accuracy { .. })));
        assert!(matches!(TruncationScheme::build(&l, 0.0), Err(Error::Range { field: "delta", .. })));
        assert!(TruncationScheme::build_with_floor(&l, 1.0, 1.0).is_ok());
    }

    #[test]
    fn jump_magnitudes_follow_pareto() {
        let l = law(1.5, 0.5, 0.0);
        let s = LevySampler::new(&l, TruncationScheme::build(&l, 0.01).unwrap());
        let mut rng = StreamId::new(3, 0).rng();
        let n = 40_000;
        let jumps: Vec<f64> = (0..n).map(|_| s.sample_jump(&mut rng).unwrap()).collect();
        let median = 0.01 * 2f64.powf(1.0 / 1.5);
        let below = jumps.iter().filter(|x| x.abs() < median).count() as f64 / n as f64;
        assert!((below - 0.5).abs() < 0.01, "{below}");
        let positive = jumps.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64;
        assert!((positive - 0.5).abs() < 0.01, "{positive}");
        assert!(jumps.iter().all(|x| x.abs() > 0.01));
    }

    #[test]
    fn modulated_jumps_follow_measure() {
        // P(|J| in (delta, 2 delta)) = nu(delta, 2 delta) / nu(delta, inf)
        let l = law(1.0, 0.5, 0.9);
        let delta = 0.01;
        let scheme = TruncationScheme::build(&l, delta).unwrap();
        let s = LevySampler::new(&l, scheme);
        let cfg = QuadConfig::default();
        let mass = integrate(|x: f64| l.levy_density(x).unwrap(), &[delta, 2.0 * delta], &cfg).unwrap().value;
        let expected = 2.0 * mass / scheme.lambda_delta;
        let mut rng = StreamId::new(4, 0).rng();
        let n = 40_000;
        let hits = (0..n)
            .filter(|_| s.sample_jump(&mut rng).unwrap().abs() < 2.0 * delta)
            .count() as f64
            / n as f64;
        assert!((hits - expected).abs() < 0.01, "{hits} vs {expected}");
    }

    #[test]
    fn zero_time_increment_is_zero() {
        let l = law(1.0, 0.5, 0.5);
        let s = LevySampler::new(&l, TruncationScheme::build(&l, 0.01).unwrap());
        let mut rng = StreamId::new(0, 0).rng();
        assert_eq!(s.sample_increment(0.0, &mut rng).unwrap(), 0.0);
        assert!(matches!(s.sample_increment(-1.0, &mut rng), Err(Error::Range { field: "t", .. })));
    }

    #[test]
    fn cauchy_increment_cf() {
        let l = law(1.0, 0.5, 0.0);
        let s = LevySampler::new(&l, TruncationScheme::build(&l, 0.01).unwrap());
        let mut rng = StreamId::new(5, 0).rng();
        let n = 40_000;
        let mean_cos = (0..n).map(|_| s.sample_increment(1.0, &mut rng).unwrap().cos()).sum::<f64>() / n as f64;
        assert!((mean_cos - (-PI_F).exp()).abs() < 4.0 / (n as f64).sqrt(), "{mean_cos}");
    }
    const PI_F: f64 = std::f64::consts::PI;

    #[test]
    fn innovation_time() {
        let p = ModelParams::new(0.5, 0.9, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(p.innovation_time(), 0.054093, epsilon = 1e-6);
    }

    #[test]
    fn path_validation() {
        let l = law(1.0, 0.5, 0.5);
        let s = LevySampler::new(&l, TruncationScheme::build(&l, 0.01).unwrap());
        let id = StreamId::new(1, 1);
        let single = s.sample_path(&[0.0], id).unwrap();
        assert_eq!(single.values, vec![0.0]);
        assert!(matches!(s.sample_path(&[], id), Err(Error::Order(_))));
        assert!(matches!(s.sample_path(&[0.5, 1.0], id), Err(Error::Order(_))));
        assert!(matches!(s.sample_path(&[0.0, 1.0, 1.0], id), Err(Error::Order(_))));
    }

    #[test]
    fn paths_are_reproducible() {
        let l = law(1.2, 0.5, 0.5);
        let s = LevySampler::new(&l, TruncationScheme::build(&l, 0.01).unwrap());
        let times = [0.0, 0.5, 1.0, 2.0];
        let a = s.sample_path(&times, StreamId::new(9, 2)).unwrap();
        let b = s.sample_path(&times, StreamId::new(9, 2)).unwrap();
        let c = s.sample_path(&times, StreamId::new(9, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn child_streams_differ() {
        let id = StreamId::new(1, 0);
        assert_ne!(id.child(0), id.child(1));
        assert_ne!(id.child(0).child(0), id.child(0));
        assert_eq!(id.child(5), id.child(5));
    }

    #[test]
    fn defect_is_small_and_vanishes_at_zero() {
        let l = law(1.0, 0.5, 0.5);
        let s = TruncationScheme::build(&l, 0.01).unwrap();
        assert_eq!(s.exponent_defect(&l, 0.0), 0.0);
        // leading term -2c u^4 m_4 / 24 for the stable part
        let u: f64 = 2.0;
        let stable = TruncationScheme::build(&law(1.0, 0.5, 0.0), 0.01).unwrap();
        let lead = -2.0 * u.powi(4) * 0.01f64.powi(3) / 3.0 / 24.0;
        assert_abs_diff_eq!(stable.exponent_defect(&law(1.0, 0.5, 0.0), u), lead, epsilon = 1e-3 * lead.abs());
        assert!(s.cf_bias(&l, 1.0, 1.0, &[0.5, 5.0, 20.0]) < 1e-6);
    }

    #[test]
    fn defect_series_matches_quadrature_branch() {
        // u delta = 50 forces the quadrature branch; compare with direct quadrature
        let l = law(1.0, 0.5, 0.5);
        let s = TruncationScheme::build(&l, 0.1).unwrap();
        let u: f64 = 500.0;
        let x0: f64 = 1e-4;
        let f = |x: f64| (1.0 - (u * x).cos() - (u * x).powi(2) / 2.0) * l.levy_density(x).unwrap();
        let breaks: Vec<f64> = (0..=400).map(|k| x0 + (0.1 - x0) * k as f64 / 400.0).collect();
        let direct = 2.0 * integrate(f, &breaks, &QuadConfig::default()).unwrap().value;
        // below x0 only the u^4 term matters
        let phase = l.omega() * x0.ln();
        let m4 = x0.powi(3) * (1.0 / 3.0 + 0.5 * (Complex::new(phase.cos(), phase.sin()) / Complex::new(3.0, l.omega())).re);
        let head = -2.0 * u.powi(4) * m4 / 24.0;
        let got = s.exponent_defect(&l, u);
        assert!((got - direct - head).abs() < 1e-6 * direct.abs(), "{got} vs {direct} + {head}");
    }
}
