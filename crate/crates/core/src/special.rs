//! Complex special functions needed by the closed-form Levy exponent.

use num_complex::Complex;

use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Logarithm of the Gamma function for complex `z` off the non-positive
/// integers, via the Lanczos approximation (g = 7, n = 9).
///
/// The imaginary part is only defined modulo 2*pi; callers exponentiate.
pub fn ln_gamma<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    if z.re < half {
        // Shift right: ln G(z) = ln G(z + 1) - ln z.
        return ln_gamma(z + T::one()) - z.ln();
    }
    let z = z - T::one();
    let mut acc = Complex::new(T::lit(LANCZOS_COEFFS[0]), T::zero());
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc = acc + Complex::new(T::lit(c), T::zero()) / (z + T::of_usize(i));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_two_pi = T::lit(0.918_938_533_204_672_8);
    (z + half) * t.ln() - t + acc.ln() + half_ln_two_pi
}

pub fn gamma<T: Scalar>(z: Complex<T>) -> Complex<T> {
    ln_gamma(z).exp()
}

/// `ln cos z`, stable for large `|Im z|` where `cos z` itself overflows.
pub fn ln_cos<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    let i_x = Complex::new(T::zero(), x);
    let two = T::lit(2.0);
    // cos z = e^{|y|}/2 * (e^{-i x sgn y} + e^{-2|y|} e^{i x sgn y})
    let (lead, tail) = if y >= T::zero() {
        ((-i_x).exp(), i_x.exp() * (-two * y).exp())
    } else {
        (i_x.exp(), (-i_x).exp() * (two * y).exp())
    };
    (lead + tail).ln() + Complex::new(y.abs() - T::LN_2(), T::zero())
}

/// `K(beta) = int_0^inf (1 - cos y) y^{-1-beta} dy` for `0 < Re beta < 2`,
/// i.e. `Gamma(2 - beta) cos(pi beta / 2) / (beta (1 - beta))`, with the
/// removable singularity at `beta = 1` filled in by `pi / 2`.
pub fn one_minus_cos_mellin<T: Scalar>(beta: Complex<T>) -> Complex<T> {
    let one = T::one();
    let pi = T::PI();
    let half = T::lit(0.5);
    if beta.im == T::zero() {
        let b = beta.re;
        let d = one - b;
        // cos(pi b / 2) / (1 - b) = sin(pi d / 2) / d
        let ratio = if d.abs() < T::lit(1e-4) {
            let x = pi * half * d;
            pi * half * (one - x * x / T::lit(6.0) + x * x * x * x / T::lit(120.0))
        } else {
            (pi * half * d).sin() / d
        };
        let g = gamma(Complex::new(T::lit(2.0) - b, T::zero())).re;
        return Complex::new(g * ratio / b, T::zero());
    }
    let log_k = ln_gamma(Complex::new(T::lit(2.0), T::zero()) - beta) + ln_cos(beta * (pi * half))
        - beta.ln()
        - (Complex::new(one, T::zero()) - beta).ln();
    log_k.exp()
}
