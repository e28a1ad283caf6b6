//! Wald tests and confidence intervals from the bivariate normal limit of
//! `√n(θ̂ − θ, β̂ − β)`.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{covariance, plug_in_covariance, CovarianceMatrix};
use crate::distribution::Params;
use crate::error::{Error, Result};
use crate::estimation::ParamEstimate;

/// Standard normal cdf through the complementary error function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse of [`normal_cdf`] by bisection.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    // Φ(±38.5) is 0 / 1 in double precision, so the root lies inside.
    let (mut lo, mut hi) = (-38.5f64, 38.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 || mid == lo || mid == hi {
            break;
        }
        let below = if p > 0.5 {
            normal_cdf(-mid) > 1.0 - p
        } else {
            normal_cdf(mid) < p
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Upper tail of the chi-square law with two degrees of freedom.
pub fn chi2_2_sf(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("chi-square statistic must be >= 0, got {t}")));
    }
    Ok((-0.5 * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    StandardNormal,
    ChiSquare2,
}

impl std::fmt::Display for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reference::StandardNormal => "N(0,1)",
            Reference::ChiSquare2 => "chi-square(2)",
        })
    }
}

/// Which null the test addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Theta,
    Beta,
    Joint,
}

impl std::str::FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(Which::Theta),
            "beta" => Ok(Which::Beta),
            "joint" => Ok(Which::Joint),
            other => Err(Error::Domain(format!("unknown hypothesis `{other}`"))),
        }
    }
}

/// Where the asymptotic covariance is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SigmaAt {
    /// At the hypothesised `(θ₀, β₀)`.
    #[default]
    Null,
    /// At the estimate `(θ̂, β̂)`; needs `β̂ > 1`.
    PlugIn,
}

impl std::str::FromStr for SigmaAt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "null" => Ok(SigmaAt::Null),
            "plug-in" | "plugin" => Ok(SigmaAt::PlugIn),
            other => Err(Error::Domain(format!("unknown covariance location `{other}`"))),
        }
    }
}

/// Two-sided null hypothesis about `(θ, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub null: Params,
    pub which: Which,
}

impl Hypothesis {
    pub fn new(theta0: f64, beta0: f64, which: Which) -> Result<Self> {
        Ok(Self {
            null: Params::new(theta0, beta0)?,
            which,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub level: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub reference: Reference,
    pub p_value: f64,
    pub decision: Option<Decision>,
}

impl TestResult {
    /// Attach a reject/accept decision at nominal `level`.
    pub fn at_level(mut self, level: f64) -> Self {
        self.decision = Some(Decision {
            level,
            reject: self.p_value < level,
        });
        self
    }
}

fn sigma_for(e: &ParamEstimate, h: &Hypothesis, at: SigmaAt) -> Result<CovarianceMatrix> {
    match at {
        SigmaAt::Null => Ok(covariance(&h.null)),
        SigmaAt::PlugIn => plug_in_covariance(e),
    }
}

/// Per-parameter two-sided z-test.
pub fn wald_test(e: &ParamEstimate, h: &Hypothesis, at: SigmaAt) -> Result<TestResult> {
    let sigma = sigma_for(e, h, at)?;
    let root_n = (e.n as f64).sqrt();
    let z = match h.which {
        Which::Theta => root_n * (e.theta_hat - h.null.theta()) / sigma.s11.sqrt(),
        Which::Beta => root_n * (e.beta_hat - h.null.beta()) / sigma.s22.sqrt(),
        Which::Joint => {
            return Err(Error::Domain("wald_test handles single parameters; use joint_wald_test".into()))
        }
    };
    let p_value = (2.0 * normal_cdf(-z.abs())).min(1.0);
    Ok(TestResult {
        statistic: z,
        reference: Reference::StandardNormal,
        p_value,
        decision: None,
    })
}

/// Wald quadratic form `T = n·dᵀΣ⁻¹d` referred to chi-square(2).
pub fn joint_wald_test(e: &ParamEstimate, h: &Hypothesis, at: SigmaAt) -> Result<TestResult> {
    let sigma = sigma_for(e, h, at)?;
    joint_statistic(e, &h.null, &sigma)
}

/// Joint test with an explicit covariance matrix.
pub fn joint_statistic(e: &ParamEstimate, null: &Params, sigma: &CovarianceMatrix) -> Result<TestResult> {
    let (i11, i22, i12) = sigma.inverse()?;
    let d1 = e.theta_hat - null.theta();
    let d2 = e.beta_hat - null.beta();
    let t = (e.n as f64 * (d1 * d1 * i11 + 2.0 * d1 * d2 * i12 + d2 * d2 * i22)).max(0.0);
    Ok(TestResult {
        statistic: t,
        reference: Reference::ChiSquare2,
        p_value: chi2_2_sf(t)?,
        decision: None,
    })
}

/// Dispatch on `h.which`.
pub fn test(e: &ParamEstimate, h: &Hypothesis, at: SigmaAt) -> Result<TestResult> {
    match h.which {
        Which::Joint => joint_wald_test(e, h, at),
        _ => wald_test(e, h, at),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceIntervals {
    pub level: f64,
    pub theta: Interval,
    pub beta: Interval,
    pub se_theta: f64,
    pub se_beta: f64,
}

/// Marginal normal intervals with plug-in covariance.
pub fn confidence_intervals(e: &ParamEstimate, level: f64) -> Result<ConfidenceIntervals> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Domain(format!("confidence level must lie in [0, 1), got {level}")));
    }
    let sigma = plug_in_covariance(e)?;
    let z = if level == 0.0 {
        0.0
    } else {
        normal_quantile(0.5 * (1.0 + level))?
    };
    let nf = e.n as f64;
    let se_theta = (sigma.s11 / nf).sqrt();
    let se_beta = (sigma.s22 / nf).sqrt();
    let around = |centre: f64, se: f64| Interval {
        lower: centre - z * se,
        upper: centre + z * se,
    };
    Ok(ConfidenceIntervals {
        level,
        theta: around(e.theta_hat, se_theta),
        beta: around(e.beta_hat, se_beta),
        se_theta,
        se_beta,
    })
}
