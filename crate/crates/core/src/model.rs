//! The symmetric semi-stable family with a log-periodic Levy density.
//!
//! The Levy measure is `nu(dx) = c * theta(ln|x|) * |x|^{-1-alpha} dx` with
//! `theta(s) = 1 + eps_pert * cos(omega * s)` and `omega = 2 pi / ln(1/b)`.
//! Because `theta` has period `ln(1/b)`, the measure satisfies
//! `nu(B) = a * nu(B / b)` with `a = b^{-alpha}`, which makes the law
//! semi-stable with span `b` and epoch `a`. Symmetry keeps the
//! characteristic function real and strictly positive.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::scalar::Scalar;
use crate::special::one_minus_cos_mellin;

/// Validated parameters of one symmetric semi-stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawParams<T>",
    into = "RawParams<T>",
    bound = "T: Scalar"
)]
pub struct ModelParams<T> {
    alpha: T,
    b: T,
    eps_pert: T,
    c: T,
    a: T,
    omega: T,
    hurst: T,
}

/// Unvalidated parameter tuple, the serialized form of [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct RawParams<T> {
    pub alpha: T,
    pub b: T,
    pub eps_pert: T,
    pub c: T,
}

impl<T: Scalar> TryFrom<RawParams<T>> for ModelParams<T> {
    type Error = Error;

    fn try_from(raw: RawParams<T>) -> Result<Self> {
        ModelParams::new(raw.alpha, raw.b, raw.eps_pert, raw.c)
    }
}

impl<T: Scalar> From<ModelParams<T>> for RawParams<T> {
    fn from(p: ModelParams<T>) -> Self {
        RawParams {
            alpha: p.alpha,
            b: p.b,
            eps_pert: p.eps_pert,
            c: p.c,
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Validates the raw tuple and fills in `a = b^{-alpha}`,
    /// `omega = 2 pi / ln(1/b)` and `H = 1/alpha`.
    pub fn new(alpha: T, b: T, eps_pert: T, c: T) -> Result<Self> {
        let two = T::lit(2.0);
        if !alpha.is_finite() || alpha <= T::zero() || alpha > two {
            return Err(Error::range("alpha", format!("alpha = {alpha} must lie in (0, 2)")));
        }
        if alpha == two {
            let msg = if eps_pert != T::zero() {
                "alpha = 2 is the Gaussian endpoint, which has no Levy jump part to modulate; eps_pert must be 0 there and the jump construction needs alpha < 2".to_string()
            } else {
                "alpha = 2 (Gaussian) is outside the jump construction; alpha must lie in (0, 2)".to_string()
            };
            return Err(Error::range("alpha", msg));
        }
        if !b.is_finite() || b <= T::zero() || b >= T::one() {
            return Err(Error::range("b", format!("b = {b} must lie in (0, 1)")));
        }
        if !eps_pert.is_finite() || eps_pert < T::zero() || eps_pert >= T::one() {
            return Err(Error::range("eps_pert", format!("eps_pert = {eps_pert} must lie in [0, 1)")));
        }
        if !c.is_finite() || c <= T::zero() {
            return Err(Error::range("c", format!("c = {c} must be positive")));
        }
        let a = b.powf(-alpha);
        let omega = T::TAU() / (-b.ln());
        Ok(Self {
            alpha,
            b,
            eps_pert,
            c,
            a,
            omega,
            hurst: T::one() / alpha,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn eps_pert(&self) -> T {
        self.eps_pert
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// Epoch `a = b^{-alpha} > 1`.
    pub fn a(&self) -> T {
        self.a
    }

    /// Angular frequency of the log-periodic modulation.
    pub fn omega(&self) -> T {
        self.omega
    }

    /// Semi-selfsimilarity exponent `H = 1/alpha`.
    pub fn hurst(&self) -> T {
        self.hurst
    }

    /// Time argument `a - 1` of the AR(1) innovation `b Z(a - 1)`.
    pub fn innovation_time(&self) -> T {
        self.a - T::one()
    }

    pub fn is_stable(&self) -> bool {
        self.eps_pert == T::zero()
    }

    pub fn raw(&self) -> RawParams<T> {
        (*self).into()
    }
}

/// Value of the Levy exponent at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ExponentValue<T> {
    pub u: T,
    pub psi: T,
}

/// Which route evaluates the Levy exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evaluator {
    /// Closed form through the complex Gamma function.
    Closed,
    /// Adaptive quadrature of the Levy-Khintchine integral.
    Quadrature,
}

/// A law of the family, with the constants of the closed form cached.
///
/// Normally built by [`SemiStableLaw::new`]; [`SemiStableLaw::with_omega`]
/// builds the same log-periodic construction at an arbitrary modulation
/// frequency, which is semi-stable only when `omega` matches the span.
#[derive(Debug, Clone)]
pub struct SemiStableLaw<T> {
    params: ModelParams<T>,
    omega: T,
    k_alpha: T,
    k_beta: Complex<T>,
    quad: QuadConfig<T>,
}

/// Below this `y = |u| x` the integrand `1 - cos y` is replaced by its
/// three-term Taylor polynomial, integrated exactly.
const SERIES_CUTOFF: f64 = 0.01;

impl<T: Scalar> SemiStableLaw<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        Self::with_omega(params, params.omega)
    }

    pub fn with_omega(params: ModelParams<T>, omega: T) -> Result<Self> {
        if !omega.is_finite() || omega <= T::zero() {
            return Err(Error::range("omega", format!("omega = {omega} must be positive")));
        }
        let alpha = params.alpha;
        let beta = Complex::new(alpha, -omega);
        // poles of K sit at beta = 0 and beta = 2, 3, ...; alpha in (0, 2) and
        // omega != 0 keep beta clear of all of them
        let k_beta = one_minus_cos_mellin(beta);
        if !k_beta.re.is_finite() || !k_beta.im.is_finite() {
            return Err(Error::Domain(format!(
                "closed-form constant K({alpha} - {omega}i) is not finite"
            )));
        }
        let k_alpha = one_minus_cos_mellin(Complex::new(alpha, T::zero())).re;
        Ok(Self {
            params,
            omega,
            k_alpha,
            k_beta,
            quad: QuadConfig::default(),
        })
    }

    pub fn with_quad_config(mut self, quad: QuadConfig<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn quad_config(&self) -> &QuadConfig<T> {
        &self.quad
    }

    /// Log-periodic modulation `theta(s) = 1 + eps_pert cos(omega s)`.
    pub fn theta(&self, s: T) -> T {
        T::one() + self.params.eps_pert * (self.omega * s).cos()
    }

    /// Levy density `c theta(ln|x|) / |x|^{1+alpha}`.
    pub fn levy_density(&self, x: T) -> Result<T> {
        if x == T::zero() || !x.is_finite() {
            return Err(Error::Domain(format!("Levy density undefined at x = {x}")));
        }
        let ax = x.abs();
        Ok(self.params.c * self.theta(ax.ln()) * ax.powf(-(T::one() + self.params.alpha)))
    }

    /// `psi(u) = -2c |u|^alpha [K(alpha) + eps Re(K(alpha - i omega) |u|^{-i omega})]`.
    pub fn exponent_closed(&self, u: T) -> ExponentValue<T> {
        ExponentValue { u, psi: self.psi(u) }
    }

    /// Closed-form exponent as a bare number.
    pub fn psi(&self, u: T) -> T {
        if u == T::zero() {
            return T::zero();
        }
        let p = &self.params;
        let au = u.abs();
        let phase = -self.omega * au.ln();
        let modulated = self.k_beta * Complex::new(phase.cos(), phase.sin());
        -T::lit(2.0) * p.c * au.powf(p.alpha) * (self.k_alpha + p.eps_pert * modulated.re)
    }

    /// Levy-Khintchine integral evaluated by adaptive quadrature.
    ///
    /// In `y = |u| x` the exponent is `-2c |u|^alpha I` with
    /// `I = int_0^inf (1 - cos y) theta(ln y - ln|u|) y^{-1-alpha} dy`.
    /// `I` is split into `y < 0.01` (Taylor series, exact), `[0.01, Y]`
    /// (adaptive, breakpoints at `y = 1`, `y = |u|`, every multiple of pi and
    /// every modulation period) and `y > Y` (exact non-oscillatory part
    /// minus an asymptotic expansion of the oscillatory part).
    pub fn exponent_quadrature(&self, u: T) -> Result<ExponentValue<T>> {
        if u == T::zero() {
            return Ok(ExponentValue { u, psi: T::zero() });
        }
        let p = &self.params;
        let two = T::lit(2.0);
        let alpha = p.alpha;
        let eps = p.eps_pert;
        let omega = self.omega;
        let au = u.abs();
        let shift = au.ln();
        let scale = two * p.c * au.powf(alpha);

        let y0 = T::lit(SERIES_CUTOFF);
        let s0 = y0.ln();
        let series = self.modulated_exp_integral(two - alpha, None, Some(s0), shift) / two
            - self.modulated_exp_integral(T::lit(4.0) - alpha, None, Some(s0), shift) / T::lit(24.0)
            + self.modulated_exp_integral(T::lit(6.0) - alpha, None, Some(s0), shift) / T::lit(720.0);

        let q_mod = Complex::new(-(T::one() + alpha), omega);
        let n_terms = 40usize;
        let y_min = T::lit(5.0) * (q_mod.norm() + T::of_usize(n_terms));
        let y_max = (y_min / T::PI()).ceil().max(T::lit(20.0)) * T::PI();

        let mut breaks = vec![y0, T::one(), y_max];
        if au > y0 && au < y_max {
            breaks.push(au);
        }
        let mut k = T::one();
        while k * T::PI() < y_max {
            breaks.push(k * T::PI());
            k = k + T::one();
        }
        if eps > T::zero() {
            let period = T::TAU() / omega;
            let j_lo = ((s0 - shift) / period).ceil();
            let j_hi = ((y_max.ln() - shift) / period).floor();
            if (j_hi - j_lo).to_f64().unwrap_or(f64::INFINITY) < 20_000.0 {
                let mut j = j_lo;
                while j <= j_hi {
                    breaks.push((shift + j * period).exp());
                    j = j + T::one();
                }
            }
        }

        let one_plus_alpha = T::one() + alpha;
        let integrand = |y: T| {
            let s = y.ln();
            let half_sin = (y * T::lit(0.5)).sin();
            two * half_sin * half_sin * (-one_plus_alpha * s).exp() * (T::one() + eps * (omega * (s - shift)).cos())
        };
        let quad = QuadConfig {
            abs_tol: self.quad.abs_tol / scale,
            rel_tol: self.quad.rel_tol,
            accept_tol: self.quad.accept_tol / scale,
            max_subdivisions: self.quad.max_subdivisions,
        };
        let body = integrate(integrand, &breaks, &quad)?;

        let tail_flat = self.modulated_exp_integral(-alpha, Some(y_max.ln()), None, shift);
        let i = Complex::new(T::zero(), T::one());
        let j_real = oscillatory_tail(i, Complex::new(-one_plus_alpha, T::zero()), y_max, n_terms);
        let mut tail_osc = j_real.re;
        if eps > T::zero() {
            let rot = Complex::new((omega * shift).cos(), -(omega * shift).sin());
            let j_sum = oscillatory_tail(i, q_mod, y_max, n_terms) + oscillatory_tail(-i, q_mod, y_max, n_terms);
            tail_osc = tail_osc + eps * (rot * j_sum).re / two;
        }

        let total = series + body.value + tail_flat - tail_osc;
        let err_psi = scale * body.error;
        if err_psi > self.quad.accept_tol.max(self.quad.rel_tol * scale * total.abs()) || !total.is_finite() {
            return Err(Error::Convergence {
                error_estimate: err_psi.as_f64(),
                subdivisions: body.subdivisions,
            });
        }
        Ok(ExponentValue { u, psi: -scale * total })
    }

    /// `int e^{k s} theta(s - shift) ds` over `[lo, hi]`; an open end means
    /// the corresponding infinity, which needs `k > 0` below and `k < 0` above.
    fn modulated_exp_integral(&self, k: T, lo: Option<T>, hi: Option<T>, shift: T) -> T {
        let eps = self.params.eps_pert;
        let omega = self.omega;
        let antiderivative = |s: T| {
            let e = (k * s).exp();
            let phase = omega * (s - shift);
            let rot = Complex::new(phase.cos(), phase.sin()) / Complex::new(k, omega);
            e / k + eps * e * rot.re
        };
        let upper = hi.map(antiderivative).unwrap_or(T::zero());
        let lower = lo.map(antiderivative).unwrap_or(T::zero());
        upper - lower
    }

    /// Exponent by the chosen route.
    pub fn exponent(&self, u: T, route: Evaluator) -> Result<T> {
        match route {
            Evaluator::Closed => Ok(self.psi(u)),
            Evaluator::Quadrature => self.exponent_quadrature(u).map(|e| e.psi),
        }
    }

    /// Characteristic function of `Z(t)`, `exp(t psi(u))`.
    pub fn cf(&self, u: T, t: T) -> Result<T> {
        if !(t >= T::zero()) {
            return Err(Error::range("t", format!("t = {t} must be non-negative")));
        }
        Ok((t * self.psi(u)).exp())
    }

    /// Stationary marginal characteristic function `f(u) = exp(psi(u))`.
    pub fn marginal_cf(&self, u: T) -> T {
        self.psi(u).exp()
    }

    /// `max_u |psi(u) - a psi(b u)|`, the functional equation
    /// `f(u) = f(bu)^a` on the exponent scale.
    pub fn semistable_residual(&self, grid: &[T], route: Evaluator) -> Result<T> {
        self.scaling_residual(grid, self.params.a, self.params.b, route)
    }

    /// `max_u |psi(u) - epoch psi(span u)|` for an arbitrary pair; stable laws
    /// satisfy it whenever `epoch span^alpha = 1`.
    pub fn scaling_residual(&self, grid: &[T], epoch: T, span: T, route: Evaluator) -> Result<T> {
        if grid.is_empty() {
            return Err(Error::EmptyInput("frequency grid"));
        }
        let one = |u: T| -> Result<T> {
            let lhs = self.exponent(u, route)?;
            let rhs = self.exponent(span * u, route)?;
            Ok((lhs - epoch * rhs).abs())
        };
        let values: Vec<Result<T>> = match route {
            Evaluator::Closed => grid.iter().map(|&u| one(u)).collect(),
            Evaluator::Quadrature => grid.par_iter().map(|&u| one(u)).collect(),
        };
        values
            .into_iter()
            .try_fold(T::zero(), |acc, v| v.map(|v| if v > acc || v.is_nan() { v } else { acc }))
    }

    /// Residual of the scaling equation at epoch `epoch` with the span
    /// `epoch^{-1/alpha}` that the exponent `H = 1/alpha` implies.
    pub fn epoch_residual(&self, grid: &[T], epoch: T, route: Evaluator) -> Result<T> {
        let span = epoch.powf(-self.params.hurst);
        self.scaling_residual(grid, epoch, span, route)
    }

    /// Exponent of the SSD(b) factor, `psi_0(u) = (a - 1) psi(b u)`, so that
    /// `f(u) = f(b u) exp(psi_0(u))`.
    pub fn ssd_factor_exponent(&self, u: T) -> T {
        (self.params.a - T::one()) * self.psi(self.params.b * u)
    }
}

/// Asymptotic expansion of `int_Y^inf e^{lambda y} y^q dy` for purely
/// imaginary `lambda` and `Re q < 0`:
/// `-e^{lambda Y} sum_k (-1)^k (d/dy)^k y^q |_Y / lambda^{k+1}`.
fn oscillatory_tail<T: Scalar>(lambda: Complex<T>, q: Complex<T>, y: T, max_terms: usize) -> Complex<T> {
    let inv_lambda = Complex::new(T::one(), T::zero()) / lambda;
    let mut deriv = (q * y.ln()).exp();
    let mut lam_pow = inv_lambda;
    let mut sum = Complex::new(T::zero(), T::zero());
    let mut sign = T::one();
    for k in 0..max_terms {
        let term = deriv * lam_pow * sign;
        sum = sum + term;
        if term.norm() <= T::epsilon() * T::lit(0.01) * sum.norm() {
            break;
        }
        deriv = deriv * (q - T::of_usize(k)) / y;
        lam_pow = lam_pow * inv_lambda;
        sign = -sign;
    }
    -(lambda * y).exp() * sum
}

/// `count` points spaced evenly in `ln u` over `[lo, hi]`.
pub fn log_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (l, h) = (lo.ln(), hi.ln());
            let step = (h - l) / T::of_usize(count - 1);
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i == count - 1 => hi,
                    i => (l + step * T::of_usize(i)).exp(),
                })
                .collect()
        }
    }
}

/// `count` points spaced evenly over `[lo, hi]`.
pub fn linear_grid<T: Scalar>(lo: T, hi: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::of_usize(count - 1);
            (0..count).map(|i| lo + step * T::of_usize(i)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn law(alpha: f64, b: f64, eps: f64, c: f64) -> SemiStableLaw<f64> {
        SemiStableLaw::new(ModelParams::new(alpha, b, eps, c).unwrap()).unwrap()
    }

    #[test]
    fn derived_parameters() {
        let p = ModelParams::new(1.0, 0.5, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(p.a(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.hurst(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.omega(), 2.0 * PI / 2f64.ln(), epsilon = 1e-12);
        for &(alpha, b) in &[(0.3f64, 0.1f64), (1.7, 0.95), (1.0, 0.5)] {
            let p = ModelParams::new(alpha, b, 0.2, 1.0).unwrap();
            assert_abs_diff_eq!(p.a() * b.powf(alpha), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let field = |r: Result<ModelParams<f64>>| match r {
            Err(Error::Range { field, .. }) => field,
            other => panic!("expected range error, got {other:?}"),
        };
        assert_eq!(field(ModelParams::new(1.0, 1.2, 0.0, 1.0)), "b");
        assert_eq!(field(ModelParams::new(2.5, 0.5, 0.0, 1.0)), "alpha");
        assert_eq!(field(ModelParams::new(2.0, 0.5, 0.3, 1.0)), "alpha");
        assert_eq!(field(ModelParams::new(1.0, 0.5, 1.0, 1.0)), "eps_pert");
        assert_eq!(field(ModelParams::new(1.0, 0.5, 0.0, 0.0)), "c");
        assert_eq!(field(ModelParams::new(f64::NAN, 0.5, 0.0, 1.0)), "alpha");
    }

    #[test]
    fn serde_round_trip_validates() {
        let p = ModelParams::new(1.2, 0.4, 0.3, 2.0).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: ModelParams<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<ModelParams<f64>>(r#"{"alpha":1.0,"b":1.5,"eps_pert":0.0,"c":1.0}"#).is_err());
        assert!(serde_json::from_str::<ModelParams<f64>>(r#"{"alpha":1.0,"b":0.5,"eps_pert":0.0,"c":1.0,"x":1}"#).is_err());
    }

    #[test]
    fn cauchy_anchor() {
        // int_0^inf (1 - cos y) / y^2 dy = pi / 2
        let l = law(1.0, 0.5, 0.0, 1.0);
        assert_abs_diff_eq!(l.psi(1.0), -PI, epsilon = 1e-12);
        assert_abs_diff_eq!(l.exponent_quadrature(1.0).unwrap().psi, -PI, epsilon = 1e-8);
        assert_abs_diff_eq!(l.psi(-3.0), -3.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn half_stable_anchor() {
        // int_0^inf (1 - cos y) y^{-3/2} dy = sqrt(2 pi)
        let l = law(0.5, 0.5, 0.0, 1.0);
        let expected = -2.0 * (2.0 * PI).sqrt() * 4f64.sqrt();
        assert_abs_diff_eq!(l.psi(4.0), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(l.exponent_quadrature(4.0).unwrap().psi, expected, epsilon = 1e-8);
    }

    #[test]
    fn stable_exponent_is_power_law() {
        let l = law(1.3, 0.5, 0.0, 0.7);
        let slope = (l.psi(10.0) / l.psi(0.1)).ln() / 100f64.ln();
        assert_abs_diff_eq!(slope, 1.3, epsilon = 1e-12);
    }

    #[test]
    fn exponent_even_and_vanishes_at_zero() {
        let l = law(1.4, 0.3, 0.8, 1.5);
        assert_eq!(l.psi(0.0), 0.0);
        for &u in &[0.01, 0.7, 3.0, 45.0] {
            assert_eq!(l.psi(u), l.psi(-u));
            assert!(l.psi(u) < 0.0);
        }
    }

    #[test]
    fn evaluators_agree() {
        let l = law(1.0, 0.5, 0.9, 1.0);
        for &u in &[-50.0, -7.3, -0.02, 0.001, 0.5, 1.0, 2.0, 13.0, 50.0] {
            let q = l.exponent_quadrature(u).unwrap().psi;
            assert_abs_diff_eq!(q, l.psi(u), epsilon = 1e-9);
        }
    }

    #[test]
    fn functional_equation_holds() {
        let grid = log_grid(1e-2, 50.0, 200);
        for &(alpha, b, eps) in &[(0.5, 0.3, 0.9), (1.0, 0.5, 0.5), (1.5, 0.9, 0.3)] {
            let l = law(alpha, b, eps, 1.0);
            assert!(l.semistable_residual(&grid, Evaluator::Closed).unwrap() < 1e-8);
            assert!(l.semistable_residual(&grid, Evaluator::Quadrature).unwrap() < 1e-6);
        }
    }

    #[test]
    fn perturbed_frequency_breaks_equation() {
        let p = ModelParams::new(1.0, 0.5, 0.5, 1.0).unwrap();
        let l = SemiStableLaw::with_omega(p, 1.1 * p.omega()).unwrap();
        let r = l.semistable_residual(&log_grid(1e-2, 50.0, 200), Evaluator::Closed).unwrap();
        assert!(r > 1e-3, "residual {r}");
    }

    #[test]
    fn stable_law_scales_at_every_epoch() {
        let l = law(1.2, 0.5, 0.0, 1.0);
        let grid = log_grid(0.1, 10.0, 30);
        for &e in &[3.0, std::f64::consts::E, 7.5] {
            assert!(l.epoch_residual(&grid, e, Evaluator::Closed).unwrap() < 1e-10);
        }
        let m = law(1.2, 0.5, 0.9, 1.0);
        assert!(m.epoch_residual(&grid, std::f64::consts::E, Evaluator::Closed).unwrap() > 1e-3);
    }

    #[test]
    fn levy_measure_scaling() {
        // nu(A) = a nu(b^{-1} A) on A = (1, 2)
        let l = law(0.8, 0.5, 0.6, 1.0);
        let a = l.params().a();
        let cfg = QuadConfig::default();
        let dens = |x: f64| l.levy_density(x).unwrap();
        let lhs = integrate(dens, &[1.0, 2.0], &cfg).unwrap().value;
        let rhs = integrate(dens, &[2.0, 4.0], &cfg).unwrap().value;
        assert_abs_diff_eq!(lhs, a * rhs, epsilon = 1e-9);
        assert!(matches!(l.levy_density(0.0), Err(Error::Domain(_))));
        assert_eq!(l.levy_density(-1.5).unwrap(), l.levy_density(1.5).unwrap());
    }

    #[test]
    fn modulation_is_log_periodic() {
        let l = law(1.0, 0.3, 0.7, 1.0);
        let period = -l.params().b().ln();
        for &s in &[-3.0, 0.0, 0.4, 5.0] {
            assert_abs_diff_eq!(l.theta(s), l.theta(s + period), epsilon = 1e-12);
        }
    }

    #[test]
    fn cf_rejects_negative_time() {
        let l = law(1.0, 0.5, 0.5, 1.0);
        assert!(matches!(l.cf(1.0, -0.1), Err(Error::Range { field: "t", .. })));
        assert_eq!(l.cf(3.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn grids() {
        let g = log_grid(0.1, 10.0, 3);
        assert_abs_diff_eq!(g[1], 1.0, epsilon = 1e-14);
        assert_eq!(linear_grid(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
