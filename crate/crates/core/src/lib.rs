//! Symmetric semi-stable laws with log-periodic Levy measure, the Levy
//! processes they generate, the stationary AR(1) scheme
//! `X_n = b X_{n-1} + eps_n` with semi-stable marginals, and the statistics
//! used to check all of it.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! tolerances throughout are calibrated for.

pub mod ar1;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod sampler;
pub mod scalar;
pub mod special;
pub mod verification;

pub use error::{Error, Result};
pub use model::{log_grid, linear_grid, Evaluator, RawParams};
pub use scalar::Scalar;

pub type ModelParams = model::ModelParams<f64>;
pub type SemiStableLaw = model::SemiStableLaw<f64>;
pub type ExponentValue = model::ExponentValue<f64>;
pub type QuadConfig = quadrature::QuadConfig<f64>;
pub type TruncationScheme = sampler::TruncationScheme<f64>;
pub type LevySampler<'a> = sampler::LevySampler<'a, f64>;
pub type SamplePath = sampler::SamplePath<f64>;
pub type Ar1Series = ar1::Ar1Series<f64>;
pub type EmpiricalCf = verification::EmpiricalCf<f64>;

pub use sampler::StreamId;
pub use verification::VerificationReport;

/// Single-precision aliases.
pub mod f32 {
    pub type ModelParams = crate::model::ModelParams<f32>;
    pub type SemiStableLaw = crate::model::SemiStableLaw<f32>;
    pub type TruncationScheme = crate::sampler::TruncationScheme<f32>;
    pub type LevySampler<'a> = crate::sampler::LevySampler<'a, f32>;
    pub type Ar1Series = crate::ar1::Ar1Series<f32>;
    pub type EmpiricalCf = crate::verification::EmpiricalCf<f32>;
}
