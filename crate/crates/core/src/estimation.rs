//! Sample moments and closed-form method-of-moments estimators.
//!
//! With `η̂ = √(X̄² − S²)` and `λ̂ = X̄√2 − η̂` the estimators are
//! `θ̂ = √2 / λ̂` and `β̂ = λ̂ / η̂`. The variance uses the `1/n` convention.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Biased (`1/n`) variance.
    pub var: f64,
    pub min: f64,
}

impl SampleSummary {
    /// Build a summary from precomputed moments, e.g. population moments.
    pub fn from_moments(n: usize, mean: f64, var: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need at least 2 observations, got {n}")));
        }
        if !mean.is_finite() || !var.is_finite() || var < 0.0 {
            return Err(Error::Domain(format!(
                "invalid moments: mean = {mean}, var = {var}"
            )));
        }
        Ok(Self {
            n,
            mean,
            var,
            min: 0.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    pub theta_hat: f64,
    pub beta_hat: f64,
    pub eta_hat: f64,
    pub lambda_hat: f64,
    pub n: usize,
    /// `false` when `β̂ ≤ 1`, i.e. the estimate lies outside the parameter space.
    pub beta_in_range: bool,
}

/// Two-pass mean and `1/n` variance.
pub fn summarize(data: &[f64]) -> Result<SampleSummary> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 observations, got {n}")));
    }
    let mut min = f64::INFINITY;
    let mut sum = 0.0;
    for (i, &x) in data.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::Domain(format!(
                "observation {} is {x}; values must be finite and nonnegative",
                i + 1
            )));
        }
        min = min.min(x);
        sum += x;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let (mut ss, mut comp) = (0.0, 0.0);
    for &x in data {
        let d = x - mean;
        ss += d * d;
        comp += d;
    }
    let var = ((ss - comp * comp / nf) / nf).max(0.0);
    Ok(SampleSummary { n, mean, var, min })
}

pub fn estimate_moments(s: &SampleSummary) -> Result<ParamEstimate> {
    if !(s.mean > 0.0) {
        return Err(Error::Domain(format!("sample mean must be positive, got {}", s.mean)));
    }
    let gap = s.mean * s.mean - s.var;
    if !(gap > 0.0) {
        return Err(Error::DegenerateSample { gap });
    }
    let eta_hat = gap.sqrt();
    let lambda_hat = s.mean * SQRT_2 - eta_hat;
    let theta_hat = SQRT_2 / lambda_hat;
    let beta_hat = lambda_hat / eta_hat;
    Ok(ParamEstimate {
        theta_hat,
        beta_hat,
        eta_hat,
        lambda_hat,
        n: s.n,
        beta_in_range: beta_hat > 1.0,
    })
}

pub fn fit(data: &[f64]) -> Result<ParamEstimate> {
    estimate_moments(&summarize(data)?)
}
