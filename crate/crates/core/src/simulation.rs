//! Monte Carlo study of the moment estimators and the Wald tests.
//!
//! For every sample size the harness draws `replications` samples under the
//! true parameters, fits each one and tests the true parameters as the null.
//! Replication `r` of size index `k` uses stream `k·replications + r`, so a
//! report depends only on the configuration and never on scheduling.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distribution::{Params, Sampler};
use crate::error::{Error, Result};
use crate::estimation::{estimate_moments, summarize};
use crate::inference::{joint_wald_test, wald_test, Hypothesis, SigmaAt, Which};
use crate::par;
use crate::rng::RngStream;

/// Sample sizes of the reference study.
pub const DEFAULT_SIZES: [usize; 11] = [50, 200, 375, 400, 500, 700, 900, 1000, 1500, 2000, 2500];

pub const CSV_HEADER: &str =
    "n,mve_theta,mve_beta,rmse_theta,rmse_beta,reject_theta,reject_beta,reject_joint,degenerate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub theta: f64,
    pub beta: f64,
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub nominal_level: f64,
    pub sampler: Sampler,
    pub sigma_at: SigmaAt,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            theta: 2.0,
            beta: 2.0,
            sizes: DEFAULT_SIZES.to_vec(),
            replications: 1000,
            seed: 1,
            nominal_level: 0.05,
            sampler: Sampler::Inverse,
            sigma_at: SigmaAt::Null,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<Params> {
        let params = Params::new(self.theta, self.beta).map_err(|e| Error::Config(e.to_string()))?;
        if self.sizes.is_empty() {
            return Err(Error::Config("at least one sample size is required".into()));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 10) {
            return Err(Error::Config(format!("sample sizes must be >= 10, got {n}")));
        }
        if self.replications < 100 {
            return Err(Error::Config(format!(
                "replications must be >= 100, got {}",
                self.replications
            )));
        }
        if !(self.nominal_level > 0.0 && self.nominal_level < 1.0) {
            return Err(Error::Config(format!(
                "nominal level must lie in (0, 1), got {}",
                self.nominal_level
            )));
        }
        Ok(params)
    }
}

/// One replication's outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Replication {
    Fitted {
        theta_hat: f64,
        beta_hat: f64,
        /// `None` when the test could not be formed (plug-in covariance with `β̂ ≤ 1`).
        p_theta: Option<f64>,
        p_beta: Option<f64>,
        p_joint: Option<f64>,
    },
    /// Sample with `X̄² ≤ S²`.
    Degenerate,
}

/// Draw one sample of size `n`, fit it and test the true parameters.
pub fn run_replication(
    p: &Params,
    n: usize,
    rng: &mut RngStream,
    sampler: Sampler,
    sigma_at: SigmaAt,
) -> Result<Replication> {
    if n < 10 {
        return Err(Error::Domain(format!("replication sample size must be >= 10, got {n}")));
    }
    let xs = p.sample(sampler, rng, n)?;
    let est = match estimate_moments(&summarize(&xs)?) {
        Ok(e) => e,
        Err(Error::DegenerateSample { .. }) => return Ok(Replication::Degenerate),
        Err(e) => return Err(e),
    };
    let hyp = |which| Hypothesis {
        null: *p,
        which,
    };
    let p_theta = wald_test(&est, &hyp(Which::Theta), sigma_at).ok().map(|t| t.p_value);
    let p_beta = wald_test(&est, &hyp(Which::Beta), sigma_at).ok().map(|t| t.p_value);
    let p_joint = joint_wald_test(&est, &hyp(Which::Joint), sigma_at).ok().map(|t| t.p_value);
    Ok(Replication::Fitted {
        theta_hat: est.theta_hat,
        beta_hat: est.beta_hat,
        p_theta,
        p_beta,
        p_joint,
    })
}

/// Monte Carlo standard errors of a row's aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowErrors {
    pub mve_theta: f64,
    pub mve_beta: f64,
    pub rmse_theta: f64,
    pub rmse_beta: f64,
    pub reject_theta: f64,
    pub reject_beta: f64,
    pub reject_joint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n: usize,
    pub mve_theta: f64,
    pub mve_beta: f64,
    pub rmse_theta: f64,
    pub rmse_beta: f64,
    pub reject_theta: f64,
    pub reject_beta: f64,
    pub reject_joint: f64,
    pub degenerate: usize,
    /// Fitted replications without a p-value (plug-in mode only).
    #[serde(default)]
    pub untested: usize,
    #[serde(default)]
    pub mc_se: Option<RowErrors>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub rows: Vec<SimRow>,
    pub wall_time_secs: f64,
}

/// Run the study on the global pool (or sequentially without `parallel`).
pub fn run_experiment(config: &SimConfig) -> Result<SimReport> {
    run_experiment_on(config, None)
}

/// Run the study on a dedicated pool of `threads` workers.
pub fn run_experiment_on(config: &SimConfig, threads: Option<usize>) -> Result<SimReport> {
    let params = config.validate()?;
    let start = Instant::now();
    let reps = config.replications;
    let total = config.sizes.len() * reps;
    let base = RngStream::new(config.seed, 0);

    let outcomes = par::with_threads(threads, || {
        par::map_indexed(total, |idx| {
            let n = config.sizes[idx / reps];
            let mut rng = base.sibling(idx as u64);
            run_replication(&params, n, &mut rng, config.sampler, config.sigma_at)
        })
    })?;

    let mut rows = Vec::with_capacity(config.sizes.len());
    for (k, &n) in config.sizes.iter().enumerate() {
        let chunk = &outcomes[k * reps..(k + 1) * reps];
        let records = chunk.iter().cloned().collect::<Result<Vec<_>>>()?;
        rows.push(aggregate(n, &params, &records, config.nominal_level));
    }
    Ok(SimReport {
        config: config.clone(),
        rows,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    (mean, (var / k).sqrt())
}

fn rejection_rate(p_values: &[f64], level: f64) -> (f64, f64) {
    let k = p_values.len() as f64;
    let rate = p_values.iter().filter(|&&p| p < level).count() as f64 / k;
    (rate, (rate * (1.0 - rate) / k).sqrt())
}

fn aggregate(n: usize, truth: &Params, records: &[Replication], level: f64) -> SimRow {
    let mut thetas = Vec::with_capacity(records.len());
    let mut betas = Vec::with_capacity(records.len());
    let (mut pt, mut pb, mut pj) = (Vec::new(), Vec::new(), Vec::new());
    let mut degenerate = 0;
    let mut untested = 0;
    for rec in records {
        match *rec {
            Replication::Degenerate => degenerate += 1,
            Replication::Fitted {
                theta_hat,
                beta_hat,
                p_theta,
                p_beta,
                p_joint,
            } => {
                thetas.push(theta_hat);
                betas.push(beta_hat);
                if p_theta.is_none() || p_beta.is_none() || p_joint.is_none() {
                    untested += 1;
                }
                pt.extend(p_theta);
                pb.extend(p_beta);
                pj.extend(p_joint);
            }
        }
    }

    let sq_err = |xs: &[f64], truth: f64| xs.iter().map(|x| (x - truth).powi(2)).collect::<Vec<_>>();
    let (mve_theta, se_mve_theta) = mean_and_se(&thetas);
    let (mve_beta, se_mve_beta) = mean_and_se(&betas);
    let (mse_theta, se_mse_theta) = mean_and_se(&sq_err(&thetas, truth.theta()));
    let (mse_beta, se_mse_beta) = mean_and_se(&sq_err(&betas, truth.beta()));
    let rmse_theta = mse_theta.sqrt();
    let rmse_beta = mse_beta.sqrt();
    let (reject_theta, se_rt) = rejection_rate(&pt, level);
    let (reject_beta, se_rb) = rejection_rate(&pb, level);
    let (reject_joint, se_rj) = rejection_rate(&pj, level);

    SimRow {
        n,
        mve_theta,
        mve_beta,
        rmse_theta,
        rmse_beta,
        reject_theta,
        reject_beta,
        reject_joint,
        degenerate,
        untested,
        mc_se: Some(RowErrors {
            mve_theta: se_mve_theta,
            mve_beta: se_mve_beta,
            // delta method: se(√M) = se(M) / (2√M)
            rmse_theta: se_mse_theta / (2.0 * rmse_theta),
            rmse_beta: se_mse_beta / (2.0 * rmse_beta),
            reject_theta: se_rt,
            reject_beta: se_rb,
            reject_joint: se_rj,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Domain(format!("unknown format `{other}`"))),
        }
    }
}

/// `(n, value)` curves for plotting the convergence panels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub mve_theta: Vec<(usize, f64)>,
    pub mve_beta: Vec<(usize, f64)>,
    pub rmse_theta: Vec<(usize, f64)>,
    pub rmse_beta: Vec<(usize, f64)>,
}

impl Series {
    pub fn from_rows(rows: &[SimRow]) -> Self {
        let pick = |f: fn(&SimRow) -> f64| rows.iter().map(|r| (r.n, f(r))).collect();
        Self {
            mve_theta: pick(|r| r.mve_theta),
            mve_beta: pick(|r| r.mve_beta),
            rmse_theta: pick(|r| r.rmse_theta),
            rmse_beta: pick(|r| r.rmse_beta),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    #[serde(flatten)]
    report: SimReport,
    series: Series,
}

pub fn emit_table(rep: &SimReport, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => emit_csv(&rep.rows),
        TableFormat::Json => {
            let doc = JsonReport {
                report: rep.clone(),
                series: Series::from_rows(&rep.rows),
            };
            serde_json::to_string_pretty(&doc).expect("report serializes")
        }
    }
}

fn emit_csv(rows: &[SimRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.mve_theta,
            r.mve_beta,
            r.rmse_theta,
            r.rmse_beta,
            r.reject_theta,
            r.reject_beta,
            r.reject_joint,
            r.degenerate
        );
    }
    out
}

/// Long-format `series,n,value` CSV of the convergence curves.
pub fn emit_series_csv(rep: &SimReport) -> String {
    let s = Series::from_rows(&rep.rows);
    let mut out = String::from("series,n,value\n");
    for (name, pts) in [
        ("mve_theta", &s.mve_theta),
        ("mve_beta", &s.mve_beta),
        ("rmse_theta", &s.rmse_theta),
        ("rmse_beta", &s.rmse_beta),
    ] {
        for (n, v) in pts {
            let _ = writeln!(out, "{name},{n},{v}");
        }
    }
    out
}

/// Parse the CSV produced by [`emit_table`]. Standard errors are not part of
/// the CSV and come back as `None`.
pub fn parse_csv(text: &str) -> Result<Vec<SimRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Domain(format!("unexpected CSV header {other:?}")));
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 9 {
            return Err(Error::Domain(format!("line {}: expected 9 fields, got {}", i + 2, f.len())));
        }
        let bad = |what: &str| Error::Domain(format!("line {}: invalid {what}", i + 2));
        let num = |j: usize, what: &str| f[j].parse::<f64>().map_err(|_| bad(what));
        rows.push(SimRow {
            n: f[0].parse().map_err(|_| bad("n"))?,
            mve_theta: num(1, "mve_theta")?,
            mve_beta: num(2, "mve_beta")?,
            rmse_theta: num(3, "rmse_theta")?,
            rmse_beta: num(4, "rmse_beta")?,
            reject_theta: num(5, "reject_theta")?,
            reject_beta: num(6, "reject_beta")?,
            reject_joint: num(7, "reject_joint")?,
            degenerate: f[8].parse().map_err(|_| bad("degenerate"))?,
            untested: 0,
            mc_se: None,
        });
    }
    Ok(rows)
}

pub fn parse_json(text: &str) -> Result<SimReport> {
    serde_json::from_str::<JsonReport>(text)
        .map(|doc| doc.report)
        .map_err(|e| Error::Domain(format!("invalid report JSON: {e}")))
}
