//! Asymptotic law of the moment estimators.
//!
//! Both estimators admit first-order expansions
//! `θ̂ − θ ≈ n⁻¹ Σ (H₁(Xⱼ) − E H₁)` and `β̂ − β ≈ n⁻¹ Σ (H₂(Xⱼ) − E H₂)`
//! with quadratic influence functions `Hᵢ(x) = aᵢx + bᵢx²`. The limiting
//! covariance of `√n(θ̂ − θ, β̂ − β)` is therefore the covariance matrix of
//! `(H₁(X), H₂(X))`, which is available in closed form from the raw moments
//! `E Xᵏ = k!(β+k)/(θᵏβ)` up to order four.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::distribution::{Params, Sampler};
use crate::error::{Error, Result};
use crate::estimation::{estimate_moments, summarize, ParamEstimate};
use crate::par;
use crate::rng::RngStream;

/// Which estimator an influence function belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// `H₁`, the influence function of `θ̂`.
    Theta,
    /// `H₂`, the influence function of `β̂`.
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    pub m: f64,
    pub m2: f64,
    pub sigma2: f64,
    /// `√(m² − σ²) = √2/(θβ)`
    pub eta: f64,
    /// `m√2 − η = √2/θ`
    pub lambda: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

impl AsymptoticCoefficients {
    pub fn influence(&self, which: Component, x: f64) -> f64 {
        let (a, b) = match which {
            Component::Theta => (self.a1, self.b1),
            Component::Beta => (self.a2, self.b2),
        };
        x * (a + b * x)
    }
}

/// Symmetric 2×2 covariance of `(H₁(X), H₂(X))`, ordered `(θ, β)`, together
/// with the first and second moments it was assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
    /// `E H₁(X)`
    pub gamma1: f64,
    /// `E H₂(X)`
    pub gamma2: f64,
    /// `E H₁(X)²`
    pub tau1_sq: f64,
    /// `E H₂(X)²`
    pub tau2_sq: f64,
    /// `E H₁(X)H₂(X)`
    pub c: f64,
}

impl CovarianceMatrix {
    pub fn det(&self) -> f64 {
        self.s11 * self.s22 - self.s12 * self.s12
    }

    pub fn is_psd(&self) -> bool {
        self.s11 >= 0.0 && self.s22 >= 0.0 && self.det() >= -1e-12 * self.s11 * self.s22
    }

    /// Closed-form inverse `[[s22, −s12], [−s12, s11]] / det`, returned as
    /// `(i11, i22, i12)`. Fails when the determinant is below `1e-12·s11·s22`.
    pub fn inverse(&self) -> Result<(f64, f64, f64)> {
        let det = self.det();
        if !(det > 1e-12 * self.s11 * self.s22) {
            return Err(Error::SingularCovariance { det });
        }
        Ok((self.s22 / det, self.s11 / det, -self.s12 / det))
    }

    /// Entry-wise relative deviation of `self` from `reference`, `(r11, r22, r12)`.
    pub fn relative_error(&self, reference: &CovarianceMatrix) -> (f64, f64, f64) {
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        (
            rel(self.s11, reference.s11),
            rel(self.s22, reference.s22),
            rel(self.s12, reference.s12),
        )
    }
}

pub fn coefficients(p: &Params) -> AsymptoticCoefficients {
    let (t, b) = (p.theta(), p.beta());
    let m = p.mean();
    let m2 = 2.0 * (b + 2.0) / (t * t * b);
    let sigma2 = p.variance();
    let eta = SQRT_2 / (t * b);
    let lambda = SQRT_2 / t;
    let eta3 = eta * eta * eta;
    AsymptoticCoefficients {
        m,
        m2,
        sigma2,
        eta,
        lambda,
        a1: 2.0 / (eta * lambda),
        b1: -1.0 / (SQRT_2 * eta * lambda * lambda),
        a2: -lambda * (eta * SQRT_2 + 2.0 * m) / eta3,
        b2: (lambda + eta) / (2.0 * eta3),
    }
}

pub fn eval_influence(c: &AsymptoticCoefficients, which: Component, x: f64) -> f64 {
    c.influence(which, x)
}

/// Closed-form asymptotic covariance of `√n(θ̂ − θ, β̂ − β)`.
pub fn covariance(p: &Params) -> CovarianceMatrix {
    let (t, b) = (p.theta(), p.beta());
    let k = coefficients(p);
    // E X^j for j = 1..4
    let e1 = (b + 1.0) / (t * b);
    let e2 = 2.0 * (b + 2.0) / (t * t * b);
    let e3 = 6.0 * (b + 3.0) / (t.powi(3) * b);
    let e4 = 24.0 * (b + 4.0) / (t.powi(4) * b);

    let gamma = |a: f64, bb: f64| a * e1 + bb * e2;
    let tau_sq = |a: f64, bb: f64| a * a * e2 + bb * bb * e4 + 2.0 * a * bb * e3;

    let gamma1 = gamma(k.a1, k.b1);
    let gamma2 = gamma(k.a2, k.b2);
    let tau1_sq = tau_sq(k.a1, k.b1);
    let tau2_sq = tau_sq(k.a2, k.b2);
    let c = k.a1 * k.a2 * e2 + (k.a1 * k.b2 + k.b1 * k.a2) * e3 + k.b1 * k.b2 * e4;

    CovarianceMatrix {
        s11: tau1_sq - gamma1 * gamma1,
        s22: tau2_sq - gamma2 * gamma2,
        s12: c - gamma1 * gamma2,
        gamma1,
        gamma2,
        tau1_sq,
        tau2_sq,
        c,
    }
}

/// Covariance evaluated at an estimate; requires `β̂ > 1`.
pub fn plug_in_covariance(e: &ParamEstimate) -> Result<CovarianceMatrix> {
    if !e.beta_in_range {
        return Err(Error::Domain(format!(
            "plug-in covariance needs beta_hat > 1, got {}",
            e.beta_hat
        )));
    }
    Ok(covariance(&Params::new(e.theta_hat, e.beta_hat)?))
}

/// Brute-force check of [`covariance`]: empirical moments of
/// `(H₁(X), H₂(X))` over `draws` inversion samples from one stream.
pub fn covariance_mc_oracle(p: &Params, draws: usize, rng: &mut RngStream) -> Result<CovarianceMatrix> {
    if draws < 10_000 {
        return Err(Error::Domain(format!("oracle needs at least 10^4 draws, got {draws}")));
    }
    let k = coefficients(p);
    let xs = p.sample_inverse(rng, draws)?;
    let nf = draws as f64;
    let (mut g1, mut g2, mut t1, mut t2, mut c) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in &xs {
        let h1 = k.influence(Component::Theta, x);
        let h2 = k.influence(Component::Beta, x);
        g1 += h1;
        g2 += h2;
        t1 += h1 * h1;
        t2 += h2 * h2;
        c += h1 * h2;
    }
    let (g1, g2) = (g1 / nf, g2 / nf);
    // centred second pass for the covariance entries
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for &x in &xs {
        let d1 = k.influence(Component::Theta, x) - g1;
        let d2 = k.influence(Component::Beta, x) - g2;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    Ok(CovarianceMatrix {
        s11: s11 / nf,
        s22: s22 / nf,
        s12: s12 / nf,
        gamma1: g1,
        gamma2: g2,
        tau1_sq: t1 / nf,
        tau2_sq: t2 / nf,
        c: c / nf,
    })
}

/// Outcome of [`estimator_sampling_mc`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingLaw {
    pub n: usize,
    pub reps: usize,
    /// Empirical covariance of the scaled deviations (only `s11`, `s22`,
    /// `s12` and the means `gamma1`, `gamma2` are meaningful).
    pub cov: CovarianceMatrix,
    /// `√n(θ̂ − θ, β̂ − β)` for each non-degenerate replication, in order.
    pub deviations: Vec<[f64; 2]>,
    pub degenerate: usize,
}

/// Simulate `reps` samples of size `n`, replication `r` drawing from stream
/// `base.stream_id() + r`, and collect the scaled estimation errors.
pub fn estimator_sampling_mc(
    p: &Params,
    n: usize,
    reps: usize,
    base: &RngStream,
    sampler: Sampler,
) -> Result<SamplingLaw> {
    if n < 50 || reps < 100 {
        return Err(Error::Domain(format!(
            "sampling study needs n >= 50 and reps >= 100, got n = {n}, reps = {reps}"
        )));
    }
    let root_n = (n as f64).sqrt();
    let outcomes: Vec<Result<Option<ParamEstimate>>> = par::map_indexed(reps, |r| {
        let mut rng = base.sibling(base.stream_id().wrapping_add(r as u64));
        let xs = p.sample(sampler, &mut rng, n)?;
        match estimate_moments(&summarize(&xs)?) {
            Ok(e) => Ok(Some(e)),
            Err(Error::DegenerateSample { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    });

    let mut deviations = Vec::with_capacity(reps);
    let mut degenerate = 0;
    for outcome in outcomes {
        match outcome? {
            Some(e) => deviations.push([
                root_n * (e.theta_hat - p.theta()),
                root_n * (e.beta_hat - p.beta()),
            ]),
            None => degenerate += 1,
        }
    }
    let cov = empirical_covariance(&deviations)?;
    Ok(SamplingLaw {
        n,
        reps,
        cov,
        deviations,
        degenerate,
    })
}

fn empirical_covariance(points: &[[f64; 2]]) -> Result<CovarianceMatrix> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two points for a covariance".into()));
    }
    let k = points.len() as f64;
    let m1 = points.iter().map(|p| p[0]).sum::<f64>() / k;
    let m2 = points.iter().map(|p| p[1]).sum::<f64>() / k;
    let (mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0);
    for p in points {
        let (d1, d2) = (p[0] - m1, p[1] - m2);
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
    }
    let (s11, s22, s12) = (s11 / k, s22 / k, s12 / k);
    Ok(CovarianceMatrix {
        s11,
        s22,
        s12,
        gamma1: m1,
        gamma2: m2,
        tau1_sq: s11 + m1 * m1,
        tau2_sq: s22 + m2 * m2,
        c: s12 + m1 * m2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(theta: f64, beta: f64) -> Params {
        Params::new(theta, beta).unwrap()
    }

    #[test]
    fn coefficients_at_two_two() {
        let k = coefficients(&p(2.0, 2.0));
        assert!((k.m - 0.75).abs() < 1e-15);
        assert!((k.m2 - 1.0).abs() < 1e-15);
        assert!((k.sigma2 - 0.4375).abs() < 1e-15);
        assert!((k.eta - SQRT_2 / 4.0).abs() < 1e-15);
        assert!((k.lambda - SQRT_2 / 2.0).abs() < 1e-15);
        for (got, want) in [(k.a1, 8.0), (k.b1, -4.0), (k.a2, -32.0), (k.b2, 12.0)] {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn lambda_at_theta_one() {
        let k = coefficients(&p(1.0, 2.0));
        assert!((k.eta - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((k.lambda - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn eta_lambda_identities() {
        for &(t, b) in &[(0.3, 1.2), (2.0, 2.0), (5.0, 40.0), (0.01, 3.0)] {
            let k = coefficients(&p(t, b));
            assert!(((k.eta * k.eta) / (k.m * k.m - k.sigma2) - 1.0).abs() < 1e-12);
            assert!((k.lambda / (k.m * SQRT_2 - k.eta) - 1.0).abs() < 1e-12);
            assert!((k.lambda * t / SQRT_2 - 1.0).abs() < 1e-12);
            assert!((k.eta * t * b / SQRT_2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn influence_values() {
        let k = coefficients(&p(2.0, 2.0));
        assert_eq!(eval_influence(&k, Component::Theta, 0.0), 0.0);
        assert!((eval_influence(&k, Component::Theta, 1.0) - 4.0).abs() < 1e-12);
        assert!((eval_influence(&k, Component::Beta, 1.0) + 20.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_at_two_two() {
        let s = covariance(&p(2.0, 2.0));
        let close = |a: f64, b: f64| (a - b).abs() < 1e-10;
        assert!(close(s.gamma1, 2.0));
        assert!(close(s.gamma2, -12.0));
        assert!(close(s.tau1_sq, 16.0));
        assert!(close(s.tau2_sq, 232.0));
        assert!(close(s.c, -52.0));
        assert!(close(s.s11, 12.0));
        assert!(close(s.s22, 88.0));
        assert!(close(s.s12, -28.0));
        assert!(close(s.det(), 272.0));
        let (i11, i22, i12) = s.inverse().unwrap();
        assert!(close(i11, 88.0 / 272.0));
        assert!(close(i22, 12.0 / 272.0));
        assert!(close(i12, 28.0 / 272.0));
    }

    #[test]
    fn gamma1_matches_influence_mean() {
        for &(t, b) in &[(0.5, 1.5), (2.0, 2.0), (3.0, 10.0)] {
            let d = p(t, b);
            let k = coefficients(&d);
            let direct = k.a1 * k.m + k.b1 * k.m2;
            assert!((direct - covariance(&d).gamma1).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn table_rmse_cross_check() {
        let s = covariance(&p(2.0, 2.0));
        let se = (s.s11 / 500.0).sqrt();
        assert!((se - 0.155).abs() < 0.001);
        assert!((se - 0.16).abs() < 0.01);
    }

    #[test]
    fn psd_and_cauchy_schwarz_on_grid() {
        for &t in &[0.1, 0.5, 1.0, 2.0, 7.0] {
            for &b in &[1.01, 1.5, 3.0, 20.0] {
                let s = covariance(&p(t, b));
                assert!(s.is_psd(), "({t}, {b}) -> {s:?}");
                assert!(s.s12.abs() <= (s.s11 * s.s22).sqrt() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn oracle_requires_enough_draws() {
        let mut r = RngStream::new(0, 0);
        assert!(covariance_mc_oracle(&p(2.0, 2.0), 999, &mut r).is_err());
    }

    #[test]
    fn plug_in_requires_beta_in_range() {
        let e = crate::estimation::fit(&[3.0; 5]).unwrap();
        assert!(plug_in_covariance(&e).is_err());
    }

    #[test]
    fn singular_matrix_detected() {
        let s = CovarianceMatrix {
            s11: 1.0,
            s22: 1.0,
            s12: 1.0,
            gamma1: 0.0,
            gamma2: 0.0,
            tau1_sq: 1.0,
            tau2_sq: 1.0,
            c: 1.0,
        };
        assert!(matches!(s.inverse(), Err(Error::SingularCovariance { .. })));
    }
}
