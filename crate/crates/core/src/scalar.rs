//! Floating-point abstraction shared by every module.
//!
//! All numerical code is written against [`Scalar`]; `f64` is the type the
//! tolerances in this crate are tuned for, `f32` works with looser ones.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Open01, StandardNormal};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar usable by the model, samplers and statistics.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self;

    /// Lossy conversion used at I/O boundaries.
    fn as_f64(self) -> f64;

    /// Uniform draw on the open interval (0, 1).
    fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Standard normal draw.
    fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn of_usize(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            #[inline]
            fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn open01_never_hits_endpoints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let u = f32::sample_open01(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn literals_round_trip() {
        assert_eq!(f64::lit(0.1), 0.1);
        assert_eq!(<f32 as Scalar>::lit(0.5), 0.5f32);
        assert_eq!(<f64 as Scalar>::of_usize(7), 7.0);
    }
}
