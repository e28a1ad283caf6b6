//! `plindley`: evaluate, sample, fit and test Pseudo-Lindley data, and run
//! the Monte Carlo study.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 degenerate data,
//! 4 oracle validation failure.

mod data;
mod fmt;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pseudo_lindley::simulation::{emit_series_csv, DEFAULT_SIZES};
use pseudo_lindley::{
    confidence_intervals, covariance, covariance_mc_oracle, emit_table, estimate_moments,
    estimator_sampling_mc, inference, run_experiment_on, summarize, Error, Hypothesis, Params,
    QuantileSettings, RngStream, Sampler, SigmaAt, SimConfig, TableFormat, Which,
};

use crate::data::DataFile;
use crate::fmt::sig;

/// Machine-readable precision.
const MACHINE_DIGITS: usize = 15;
/// Human-readable precision.
const HUMAN_DIGITS: usize = 4;
/// Oracle tolerance enforced by `validate` at 10^6 draws or more.
const ORACLE_TOLERANCE: f64 = 0.10;
const ORACLE_FULL_DRAWS: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "plindley", version, about = "Pseudo-Lindley distribution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate pdf, cdf, survival, quantile or a raw moment.
    Dist(DistArgs),
    /// Draw a reproducible sample, one value per line under an `x` header.
    Sample(SampleArgs),
    /// Method-of-moments fit with plug-in standard errors and 95% intervals.
    Fit(FitArgs),
    /// Wald z-test for one parameter or the joint chi-square test.
    Test(TestArgs),
    /// Monte Carlo study of the estimators and tests across sample sizes.
    Simulate(SimulateArgs),
    /// Compare the closed-form asymptotic covariance with Monte Carlo oracles.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Pdf,
    LogPdf,
    Cdf,
    Survival,
    Quantile,
    Moment,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Inverse,
    Mixture,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Inverse => Sampler::Inverse,
            SamplerArg::Mixture => Sampler::Mixture,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Theta,
    Beta,
    Joint,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    Null,
    PlugIn,
}

impl From<SigmaArg> for SigmaAt {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::Null => SigmaAt::Null,
            SigmaArg::PlugIn => SigmaAt::PlugIn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct DistArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_enum)]
    what: What,
    /// Point for pdf, log-pdf, cdf and survival.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Level for quantile, in (0, 1).
    #[arg(long)]
    u: Option<f64>,
    /// Order for moment, k >= 1.
    #[arg(long)]
    k: Option<u32>,
}

#[derive(clap::Args)]
struct SampleArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "inverse")]
    sampler: SamplerArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(clap::Args)]
struct TestArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    theta0: f64,
    #[arg(long)]
    beta0: f64,
    #[arg(long, value_enum, default_value = "joint")]
    which: WhichArg,
    #[arg(long, value_enum, default_value = "null")]
    sigma_at: SigmaArg,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SIZES.to_vec())]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, value_enum, default_value = "inverse")]
    sampler: SamplerArg,
    #[arg(long, value_enum, default_value = "null")]
    sigma_at: SigmaArg,
    /// Worker threads; the global pool when omitted. Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `series,n,value` convergence curves to this file.
    #[arg(long)]
    series_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 2.0)]
    theta: f64,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    /// Draws for the influence-function covariance oracle.
    #[arg(long, default_value_t = ORACLE_FULL_DRAWS)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample size for the estimator sampling study.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Replications for the estimator sampling study.
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, value_enum, default_value = "inverse")]
    sampler: SamplerArg,
}

enum Failure {
    Usage(String),
    Degenerate(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Degenerate(_) => 3,
            Failure::Validation(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Degenerate(m) | Failure::Validation(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateSample { .. } => Failure::Degenerate(format!(
                "{e}; the moment estimators are undefined for this data"
            )),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Dist(a) => cmd_dist(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn read_data(path: &PathBuf) -> Result<Vec<f64>, Failure> {
    DataFile::read(path)
        .map(|d| d.values)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_dist(a: DistArgs) -> CmdResult {
    let p = Params::new(a.theta, a.beta)?;
    let need_x = || a.x.ok_or_else(|| Failure::Usage("--x is required".into()));
    let value = match a.what {
        What::Pdf => p.pdf(need_x()?),
        What::LogPdf => p.log_pdf(need_x()?),
        What::Cdf => p.cdf(need_x()?),
        What::Survival => p.survival(need_x()?),
        What::Quantile => {
            let u = a.u.ok_or_else(|| Failure::Usage("--u is required".into()))?;
            p.quantile(u, &QuantileSettings::default())?
        }
        What::Moment => {
            let k = a.k.ok_or_else(|| Failure::Usage("--k is required".into()))?;
            p.raw_moment(k)?
        }
    };
    println!("{}", sig(value, MACHINE_DIGITS));
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> CmdResult {
    let p = Params::new(a.theta, a.beta)?;
    let mut rng = RngStream::new(a.seed, 0);
    let xs = p.sample(a.sampler.into(), &mut rng, a.n as usize)?;
    let mut text = String::with_capacity(xs.len() * 20 + 2);
    text.push_str("x\n");
    for x in xs {
        text.push_str(&format!("{x}\n"));
    }
    write_output(a.out.as_ref(), &text)
}

fn cmd_fit(a: FitArgs) -> CmdResult {
    let values = read_data(&a.data)?;
    let summary = summarize(&values)?;
    let est = estimate_moments(&summary)?;
    let ci = if est.beta_in_range {
        Some(confidence_intervals(&est, 0.95)?)
    } else {
        None
    };
    match a.format {
        ReportFormat::Json => {
            let doc = json!({
                "summary": summary,
                "estimate": est,
                "confidence_intervals": ci,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        ReportFormat::Text => {
            let h = |v: f64| sig(v, HUMAN_DIGITS);
            println!("n            {}", summary.n);
            println!("mean         {}", h(summary.mean));
            println!("variance     {}", h(summary.var));
            println!("theta_hat    {}", h(est.theta_hat));
            println!("beta_hat     {}", h(est.beta_hat));
            println!("eta_hat      {}", h(est.eta_hat));
            println!("lambda_hat   {}", h(est.lambda_hat));
            println!("beta_in_range {}", est.beta_in_range);
            match ci {
                Some(ci) => {
                    println!("se(theta)    {}", h(ci.se_theta));
                    println!("se(beta)     {}", h(ci.se_beta));
                    println!("theta 95% CI [{}, {}]", h(ci.theta.lower), h(ci.theta.upper));
                    println!("beta 95% CI  [{}, {}]", h(ci.beta.lower), h(ci.beta.upper));
                }
                None => println!("beta_hat <= 1: standard errors and intervals unavailable"),
            }
        }
    }
    Ok(())
}

fn cmd_test(a: TestArgs) -> CmdResult {
    if !(a.level > 0.0 && a.level < 1.0) {
        return Err(Failure::Usage(format!("--level must lie in (0, 1), got {}", a.level)));
    }
    let which = match a.which {
        WhichArg::Theta => Which::Theta,
        WhichArg::Beta => Which::Beta,
        WhichArg::Joint => Which::Joint,
    };
    let h = Hypothesis::new(a.theta0, a.beta0, which)?;
    let values = read_data(&a.data)?;
    let est = estimate_moments(&summarize(&values)?)?;
    let result = inference::test(&est, &h, a.sigma_at.into())?.at_level(a.level);
    let reject = result.decision.map(|d| d.reject).unwrap_or(false);
    match a.format {
        ReportFormat::Json => {
            let doc = json!({ "estimate": est, "hypothesis": h, "result": result });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        }
        ReportFormat::Text => {
            println!("statistic  {}", sig(result.statistic, MACHINE_DIGITS));
            println!("reference  {}", result.reference);
            println!("p_value    {}", sig(result.p_value, MACHINE_DIGITS));
            println!(
                "decision   {} at level {}",
                if reject { "reject" } else { "accept" },
                a.level
            );
        }
    }
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let config = SimConfig {
        theta: a.theta,
        beta: a.beta,
        sizes: a.sizes,
        replications: a.reps,
        seed: a.seed,
        nominal_level: a.level,
        sampler: a.sampler.into(),
        sigma_at: a.sigma_at.into(),
    };
    let report = run_experiment_on(&config, a.threads)?;
    let format = match a.format {
        TableArg::Csv => TableFormat::Csv,
        TableArg::Json => TableFormat::Json,
    };
    write_output(a.out.as_ref(), &emit_table(&report, format))?;
    if let Some(path) = a.series_out.as_ref() {
        write_output(Some(path), &emit_series_csv(&report))?;
    }
    Ok(())
}

fn cmd_validate(a: ValidateArgs) -> CmdResult {
    let p = Params::new(a.theta, a.beta)?;
    let exact = covariance(&p);
    let mut rng = RngStream::new(a.seed, 0);
    let oracle = covariance_mc_oracle(&p, a.draws, &mut rng)?;
    let sampling = estimator_sampling_mc(&p, a.n, a.reps, &RngStream::new(a.seed, 1), a.sampler.into())?;

    let h = |v: f64| sig(v, HUMAN_DIGITS);
    println!("covariance of (H1(X), H2(X)) at theta = {}, beta = {}", a.theta, a.beta);
    println!("entry  closed-form  oracle({} draws)  rel.err  sampling(n={}, reps={})", a.draws, a.n, a.reps);
    let (r11, r22, r12) = oracle.relative_error(&exact);
    let rows = [
        ("s11", exact.s11, oracle.s11, r11, sampling.cov.s11),
        ("s22", exact.s22, oracle.s22, r22, sampling.cov.s22),
        ("s12", exact.s12, oracle.s12, r12, sampling.cov.s12),
    ];
    for (name, e, o, r, s) in rows {
        println!("{name:<6} {:<12} {:<17} {:<8} {}", h(e), h(o), h(r), h(s));
    }
    println!("degenerate replications: {}", sampling.degenerate);

    let worst = r11.max(r22).max(r12);
    if a.draws < ORACLE_FULL_DRAWS {
        eprintln!(
            "warning: {} draws is below {ORACLE_FULL_DRAWS}; oracle tolerances are Monte Carlo limited and not enforced",
            a.draws
        );
        return Ok(());
    }
    if worst > ORACLE_TOLERANCE {
        return Err(Failure::Validation(format!(
            "oracle mismatch: worst relative error {} exceeds {ORACLE_TOLERANCE}",
            h(worst)
        )));
    }
    Ok(())
}
