use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Empirical characteristic function `(1/n) sum_j exp(i u x_j)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EmpiricalCf<T> {
    pub grid: Vec<T>,
    pub re: Vec<T>,
    pub im: Vec<T>,
    pub n_samples: usize,
}

impl<T: Scalar> EmpiricalCf<T> {
    pub fn value(&self, i: usize) -> Complex<T> {
        Complex::new(self.re[i], self.im[i])
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

/// Empirical CF of vector samples at vector frequencies, `exp(i <w, x_j>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEmpiricalCf<T, const D: usize> {
    pub points: Vec<[T; D]>,
    pub re: Vec<T>,
    pub im: Vec<T>,
    pub n_samples: usize,
}

fn accumulate<T: Scalar, I: Iterator<Item = T>>(phases: I, n: usize) -> (T, T) {
    let (mut c, mut s) = (T::zero(), T::zero());
    for ph in phases {
        let (si, co) = ph.sin_cos();
        c = c + co;
        s = s + si;
    }
    let n = T::of_usize(n);
    (c / n, s / n)
}

pub fn empirical_cf<T: Scalar>(samples: &[T], grid: &[T]) -> Result<EmpiricalCf<T>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite sample".into()));
    }
    let n = samples.len();
    let (re, im) = grid
        .iter()
        .map(|&u| accumulate(samples.iter().map(|&x| u * x), n))
        .unzip();
    Ok(EmpiricalCf {
        grid: grid.to_vec(),
        re,
        im,
        n_samples: n,
    })
}

pub fn joint_empirical_cf<T: Scalar, const D: usize>(
    samples: &[[T; D]],
    points: &[[T; D]],
) -> Result<JointEmpiricalCf<T, D>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    if samples.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Domain("non-finite sample".into()));
    }
    let n = samples.len();
    let (re, im) = points
        .iter()
        .map(|w| {
            accumulate(
                samples
                    .iter()
                    .map(|x| w.iter().zip(x).fold(T::zero(), |acc, (&wi, &xi)| acc + wi * xi)),
                n,
            )
        })
        .unzip();
    Ok(JointEmpiricalCf {
        points: points.to_vec(),
        re,
        im,
        n_samples: n,
    })
}

/// `max_i |(re1_i, im1_i) - (re2_i, im2_i)|`.
pub fn sup_distance<T: Scalar>(re1: &[T], im1: &[T], re2: &[T], im2: &[T]) -> T {
    re1.iter()
        .zip(im1)
        .zip(re2.iter().zip(im2))
        .map(|((&a, &b), (&c, &d))| (a - c).hypot(b - d))
        .fold(T::zero(), T::max)
}

/// `max_u |ecf(u) - target(u)|` over the ECF's grid.
pub fn cf_sup_distance<T: Scalar, F: Fn(T) -> Complex<T>>(ecf: &EmpiricalCf<T>, target: F) -> T {
    ecf.grid
        .iter()
        .enumerate()
        .map(|(i, &u)| (ecf.value(i) - target(u)).norm())
        .fold(T::zero(), T::max)
}

/// Two-sample distance between ECFs on the same grid.
pub fn two_sample_distance<T: Scalar>(a: &EmpiricalCf<T>, b: &EmpiricalCf<T>) -> Result<T> {
    if a.grid != b.grid {
        return Err(Error::Domain("ECFs evaluated on different grids".into()));
    }
    Ok(sup_distance(&a.re, &a.im, &b.re, &b.im))
}
