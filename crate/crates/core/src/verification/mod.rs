//! Empirical characteristic functions, calibrated CF-distance tests, and the
//! structural checks built on them.

mod calibrate;
mod checks;
mod ecf;
mod report;

pub use calibrate::{calibrate_threshold, CalibrationConfig, NullStatistic};
pub use checks::{
    check_cross_evaluator, check_functional_equation, check_sampler_fidelity, check_semiselfsimilar,
    check_ssd_factor, check_ssd_factor_scaled, check_stationarity, check_stationarity_ensemble,
    simulate_ensemble, FidelityTarget, SelfSimilarDesign, StationarityDesign,
};
pub use ecf::{
    cf_sup_distance, empirical_cf, joint_empirical_cf, sup_distance, two_sample_distance, EmpiricalCf,
    JointEmpiricalCf,
};
pub use report::{ParamsEcho, VerificationReport};

/// Default frequency grid: 40 log-spaced points on `[0.05, 20]`.
pub fn default_grid<T: crate::Scalar>() -> Vec<T> {
    crate::model::log_grid(T::lit(0.05), T::lit(20.0), 40)
}
