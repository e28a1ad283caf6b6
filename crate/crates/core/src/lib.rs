//! The Pseudo-Lindley distribution: density evaluation and sampling,
//! method-of-moments estimation, the asymptotic covariance of the estimator
//! pair, Wald tests built on it, and a Monte Carlo study harness.
//!
//! Replication loops run on rayon with the default `parallel` feature and
//! fall back to plain iterators without it. Results are identical either way.

pub mod asymptotics;
pub mod distribution;
pub mod error;
pub mod estimation;
pub mod inference;
pub mod par;
pub mod rng;
pub mod simulation;

pub use asymptotics::{
    coefficients, covariance, covariance_mc_oracle, estimator_sampling_mc, eval_influence,
    plug_in_covariance, AsymptoticCoefficients, Component, CovarianceMatrix, SamplingLaw,
};
pub use distribution::{lindley_pdf, Params, QuantileSettings, Sampler};
pub use error::{Error, Result};
pub use estimation::{estimate_moments, fit, summarize, ParamEstimate, SampleSummary};
pub use inference::{
    chi2_2_sf, confidence_intervals, joint_wald_test, normal_cdf, normal_quantile, wald_test,
    ConfidenceIntervals, Hypothesis, Reference, SigmaAt, TestResult, Which,
};
pub use rng::RngStream;
pub use simulation::{
    emit_table, run_experiment, run_experiment_on, run_replication, SimConfig, SimReport, SimRow,
    TableFormat,
};
