//! The Pseudo-Lindley law with density
//!
//! ```text
//! f(x; θ, β) = θ (β − 1 + θx) e^{−θx} / β,   x ≥ 0,  θ > 0,  β > 1
//! ```
//!
//! Quantiles are computed by bisection on the cdf. Two independent samplers
//! are provided: inversion of uniforms through the quantile, and an exact
//! Exponential(θ) / Gamma(2, θ) mixture obtained by expanding the density as
//! `((β−1)/β)·θe^{−θx} + (1/β)·θ²x e^{−θx}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Parameters `(θ, β)` of a Pseudo-Lindley law. Construction enforces `θ > 0`, `β > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    theta: f64,
    beta: f64,
}

/// Tuning for the bracketing + bisection quantile solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSettings {
    pub abs_tolerance: f64,
    pub max_bracket_doublings: u32,
    pub max_bisections: u32,
}

impl Default for QuantileSettings {
    fn default() -> Self {
        Self {
            abs_tolerance: 1e-12,
            max_bracket_doublings: 128,
            max_bisections: 200,
        }
    }
}

impl QuantileSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tolerance > 0.0) || !self.abs_tolerance.is_finite() {
            return Err(Error::Domain(format!(
                "quantile tolerance must be positive, got {}",
                self.abs_tolerance
            )));
        }
        if self.max_bracket_doublings == 0 || self.max_bisections == 0 {
            return Err(Error::Domain("quantile iteration budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Random variate generation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    /// Quantile inversion of open-interval uniforms.
    #[default]
    Inverse,
    /// Exponential / Gamma(2) mixture.
    Mixture,
}

impl std::str::FromStr for Sampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse" => Ok(Sampler::Inverse),
            "mixture" => Ok(Sampler::Mixture),
            other => Err(Error::Domain(format!("unknown sampler `{other}`"))),
        }
    }
}

impl Params {
    pub fn new(theta: f64, beta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
        }
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must exceed 1 and be finite, got {beta}")));
        }
        Ok(Self { theta, beta })
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Density. At `x = 0` this is the right limit `θ(β−1)/β`.
    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let (t, b) = (self.theta, self.beta);
        t * (b - 1.0 + t * x) * (-t * x).exp() / b
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let (t, b) = (self.theta, self.beta);
        t.ln() + (b - 1.0 + t * x).ln() - t * x - b.ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (t, b) = (self.theta, self.beta);
        // 1 − (1 + θx/β) e^{−θx}, written to avoid cancellation near 0
        let tx = t * x;
        -(-tx).exp_m1() - (tx / b) * (-tx).exp()
    }

    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let (t, b) = (self.theta, self.beta);
        (b + t * x) * (-t * x).exp() / b
    }

    /// Inverse cdf by bracketing and bisection.
    pub fn quantile(&self, u: f64, settings: &QuantileSettings) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile level must lie in (0, 1), got {u}")));
        }
        settings.validate()?;

        // Upper tail is compared through the survival function so that
        // levels close to 1 keep full precision.
        let upper_tail = u > 0.5;
        let tail = 1.0 - u;
        let below = |x: f64| {
            if upper_tail {
                self.survival(x) > tail
            } else {
                self.cdf(x) < u
            }
        };

        let mut hi = (self.mean() + 40.0 * self.variance().sqrt()).max(1.0);
        let mut doublings = 0;
        while below(hi) {
            if doublings == settings.max_bracket_doublings {
                return Err(Error::Convergence(format!(
                    "no upper bracket for u = {u} after {doublings} doublings"
                )));
            }
            hi *= 2.0;
            doublings += 1;
        }

        let mut lo = 0.0;
        for _ in 0..settings.max_bisections {
            if hi - lo <= settings.abs_tolerance {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo <= settings.abs_tolerance {
            return Ok(0.5 * (lo + hi));
        }
        Err(Error::Convergence(format!(
            "bisection for u = {u} stopped at width {:e} > {:e}",
            hi - lo,
            settings.abs_tolerance
        )))
    }

    /// `E[X^k] = k! (β + k) / (θ^k β)`.
    pub fn raw_moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::Domain("moment order must be at least 1".into()));
        }
        let (t, b) = (self.theta, self.beta);
        let factorial: f64 = (1..=k).map(f64::from).product();
        let value = factorial * (b + f64::from(k)) / (t.powi(k as i32) * b);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Overflow(format!("moment of order {k} is not representable")))
        }
    }

    pub fn mean(&self) -> f64 {
        (self.beta + 1.0) / (self.theta * self.beta)
    }

    pub fn variance(&self) -> f64 {
        let tb = self.theta * self.beta;
        ((self.beta + 1.0).powi(2) - 2.0) / (tb * tb)
    }

    /// `n` draws by quantile inversion with default solver settings.
    pub fn sample_inverse(&self, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
        self.sample_inverse_with(rng, n, &QuantileSettings::default())
    }

    pub fn sample_inverse_with(
        &self,
        rng: &mut RngStream,
        n: usize,
        settings: &QuantileSettings,
    ) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        (0..n)
            .map(|_| self.quantile(rng.next_open01(), settings))
            .collect()
    }

    /// `n` exact draws from the Exponential(θ) / Gamma(2, θ) mixture.
    pub fn sample_mixture(&self, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let exp_weight = (self.beta - 1.0) / self.beta;
        let scale = 1.0 / self.theta;
        Ok((0..n)
            .map(|_| {
                if rng.next_open01() < exp_weight {
                    -rng.next_open01().ln() * scale
                } else {
                    -(rng.next_open01().ln() + rng.next_open01().ln()) * scale
                }
            })
            .collect())
    }

    pub fn sample(&self, sampler: Sampler, rng: &mut RngStream, n: usize) -> Result<Vec<f64>> {
        match sampler {
            Sampler::Inverse => self.sample_inverse(rng, n),
            Sampler::Mixture => self.sample_mixture(rng, n),
        }
    }
}

/// The one-parameter Lindley density `θ²(1+x)e^{−θx}/(1+θ)`.
pub fn lindley_pdf(theta: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    theta * theta * (1.0 + x) * (-theta * x).exp() / (1.0 + theta)
}
