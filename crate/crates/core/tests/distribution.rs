mod common;

use common::*;
use proptest::prelude::*;
use pseudo_lindley::{lindley_pdf, Params, QuantileSettings, RngStream};

const THETAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const BETAS: [f64; 4] = [1.1, 2.0, 5.0, 20.0];

fn grid() -> impl Iterator<Item = Params> {
    THETAS
        .iter()
        .flat_map(|&t| BETAS.iter().map(move |&b| Params::new(t, b).unwrap()))
}

#[test]
fn pdf_integrates_to_one() {
    let s = QuantileSettings::default();
    for p in grid() {
        let x_max = p.quantile(1.0 - 1e-12, &s).unwrap();
        let total = integrate(&|x| p.pdf(x), 0.0, x_max, 200);
        assert!((total - 1.0).abs() < 1e-8, "{p:?}: {total}");
    }
}

#[test]
fn cdf_derivative_matches_pdf() {
    let h = 1e-5;
    for p in grid() {
        for i in 1..60 {
            let x = i as f64 * 0.1 / p.theta();
            let fd = (p.cdf(x + h) - p.cdf(x - h)) / (2.0 * h);
            assert!((fd - p.pdf(x)).abs() < 1e-6, "{p:?} x={x}");
        }
    }
}

#[test]
fn quadrature_moments_match_closed_form() {
    let s = QuantileSettings::default();
    for p in grid() {
        let x_max = p.quantile(1.0 - 1e-12, &s).unwrap();
        for k in 1..=4 {
            let q = integrate(&|x| x.powi(k as i32) * p.pdf(x), 0.0, x_max, 200);
            let exact = p.raw_moment(k).unwrap();
            assert!(rel(q, exact) < 1e-6, "{p:?} k={k}: {q} vs {exact}");
        }
    }
}

fn levels() -> Vec<f64> {
    let mut us = vec![1e-6, 1e-5, 1e-4, 1e-3, 0.01];
    us.extend((1..20).map(|i| i as f64 * 0.05));
    us.extend([0.99, 0.999, 1.0 - 1e-4, 1.0 - 1e-5, 1.0 - 1e-6]);
    us
}

#[test]
fn quantile_round_trip_and_monotone() {
    let s = QuantileSettings::default();
    for p in grid() {
        let mut last = 0.0;
        for u in levels() {
            let x = p.quantile(u, &s).unwrap();
            assert!((p.cdf(x) - u).abs() < 1e-10, "{p:?} u={u}");
            assert!(x >= last);
            last = x;
        }
    }
}

#[test]
fn cdf_nondecreasing() {
    for p in grid() {
        let mut last = 0.0;
        for i in 0..2000 {
            let c = p.cdf(i as f64 * 0.01);
            assert!(c >= last);
            last = c;
        }
    }
}

#[test]
fn lindley_reduction() {
    for &t in &[0.1, 0.5, 1.0, 2.0, 5.0] {
        let p = Params::new(t, 1.0 + t).unwrap();
        for i in 0..200 {
            let x = i as f64 * 0.05;
            let (a, b) = (p.pdf(x), lindley_pdf(t, x));
            assert!(rel(a, b) < 1e-14, "theta={t} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn mixture_decomposition_matches_pdf() {
    let mut r = RngStream::new(2024, 1);
    for _ in 0..100 {
        let t = 0.1 + 5.0 * r.next_open01();
        let b = 1.0 + 20.0 * r.next_open01();
        let x = 10.0 * r.next_open01() / t;
        let p = Params::new(t, b).unwrap();
        let e = (-t * x).exp();
        let mix = (b - 1.0) / b * t * e + t * t * x * e / b;
        assert!(rel(mix, p.pdf(x)) < 1e-14);
    }
}

#[test]
fn inverse_sampler_mean_and_ks() {
    let p = Params::new(2.0, 2.0).unwrap();
    let n = 100_000;
    let xs = p.sample_inverse(&mut RngStream::new(17, 0), n).unwrap();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let sd = 0.4375f64.sqrt();
    assert!((mean - 0.75).abs() < 4.0 * sd / (n as f64).sqrt());
    let d = ks_one_sample(&xs, |x| p.cdf(x));
    assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
}

#[test]
fn mixture_sampler_agrees_with_inverse_sampler() {
    let p = Params::new(2.0, 2.0).unwrap();
    let n = 100_000;
    let a = p.sample_inverse(&mut RngStream::new(5, 0), n).unwrap();
    let b = p.sample_mixture(&mut RngStream::new(5, 1), n).unwrap();
    let d = ks_two_sample(&a, &b);
    assert!(d < ks_two_sample_crit(n, n), "two-sample KS {d}");
    assert!(ks_one_sample(&b, |x| p.cdf(x)) < ks_one_sample_crit(n));
}

proptest! {
    #[test]
    fn scaling_law(t in 0.05f64..10.0, b in 1.001f64..50.0, c in 0.01f64..100.0, x in 0.0f64..20.0) {
        let p = Params::new(t, b).unwrap();
        let q = Params::new(t / c, b).unwrap();
        let lhs = p.pdf(x / c) / c;
        let rhs = q.pdf(x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn log_pdf_consistent(t in 0.05f64..10.0, b in 1.001f64..50.0, x in 0.0f64..30.0) {
        let p = Params::new(t, b).unwrap();
        let lp = p.log_pdf(x);
        prop_assert!((lp.exp() - p.pdf(x)).abs() <= 1e-12 * p.pdf(x).max(1e-300));
    }

    #[test]
    fn quantile_monotone_in_level(t in 0.05f64..10.0, b in 1.001f64..50.0, u in 0.001f64..0.998, du in 1e-6f64..1e-3) {
        let p = Params::new(t, b).unwrap();
        let s = QuantileSettings::default();
        prop_assert!(p.quantile(u, &s).unwrap() <= p.quantile(u + du, &s).unwrap());
    }
}
