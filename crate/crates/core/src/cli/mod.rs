//! Command-line front end. Text mode prints CSV tables or short summaries;
//! `--json` prints a versioned [`RunReport`]. Exit codes: 0 pass or info,
//! 1 numerical failure or failed check, 2 usage error.

mod commands;
mod report;

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;

pub use report::{human, plain, RunReport, Status, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(name = "plaplace", version, about = "Numerical checks for the critical p-Laplace equation on R^n")]
pub struct Cli {
    /// Print a JSON report instead of text or CSV
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomly sampled point
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual, rigidity tensor and v-profile checks for a bubble
    VerifyBubble(VerifyBubbleArgs),
    /// Classify (n, p, alpha, energy exponent); always prints JSON
    Classify(ClassifyArgs),
    /// Annulus energies of a bubble over log-spaced radii
    EnergyScan(EnergyScanArgs),
    /// Gradient-estimate ratios and the exterior lower bound for a bubble
    GradCheck(GradCheckArgs),
    /// Traceless part of the Jacobian of v at sampled points
    TensorCheck(TensorCheckArgs),
    /// Both sides of the integral estimate for V with a cutoff
    KeyEstimate(KeyEstimateArgs),
    /// Integrate the radial equation from a center value
    RadialSolve(RadialSolveArgs),
    /// Classification table over a p grid and a list of alphas
    Raster(RasterArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Dimension
    #[arg(long)]
    pub n: usize,
    /// Exponent of the p-Laplacian, 1 < p < n
    #[arg(long)]
    pub p: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyBubbleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Multiply the bubble by 1 + a sin|x|
    #[arg(long)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Growth exponent in u(x) <= C|x|^alpha
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Exponent k in E(A_R) = O(R^k)
    #[arg(long, allow_negative_numbers = true)]
    pub energy_exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Kinetic,
    Potential,
    Total,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnergyScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 10.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1e4)]
    pub r_max: f64,
    #[arg(long, default_value_t = 16)]
    pub per_decade: usize,
    #[arg(long, value_enum, default_value_t = Which::Total)]
    pub which: Which,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GradCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Defaults to a quarter of (p-1)/(n-p)
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub r_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub r_max: f64,
    #[arg(long, default_value_t = 4)]
    pub per_decade: usize,
    /// Largest radius of the exterior lower-bound series
    #[arg(long, default_value_t = 1e4)]
    pub exterior_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TensorCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KeyEstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Plateau radius of the cutoff
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0.25)]
    pub delta: f64,
    /// Power of the cutoff, at least 2
    #[arg(long, default_value_t = 2.0)]
    pub l: f64,
    #[arg(long)]
    pub perturb: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RadialSolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Center value; defaults to that of the bubble with lambda = 1
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub max_step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RasterArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    /// Number of p cells, sampled at interval midpoints
    #[arg(long, default_value_t = 50)]
    pub p_count: usize,
    /// Comma-separated growth exponents
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub alpha: Vec<f64>,
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub(crate) enum Failure {
    Usage(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e)
    }
}

/// What a command produced: the report and its text-mode rendering.
pub(crate) struct Produced {
    pub report: RunReport,
    pub text: String,
    pub notes: String,
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyBubble(_) => "verify-bubble",
        Command::Classify(_) => "classify",
        Command::EnergyScan(_) => "energy-scan",
        Command::GradCheck(_) => "grad-check",
        Command::TensorCheck(_) => "tensor-check",
        Command::KeyEstimate(_) => "key-estimate",
        Command::RadialSolve(_) => "radial-solve",
        Command::Raster(_) => "raster",
    }
}

fn inputs_of(c: &Command, seed: u64) -> serde_json::Value {
    let mut v = match c {
        Command::VerifyBubble(a) => serde_json::to_value(a),
        Command::Classify(a) => serde_json::to_value(a),
        Command::EnergyScan(a) => serde_json::to_value(a),
        Command::GradCheck(a) => serde_json::to_value(a),
        Command::TensorCheck(a) => serde_json::to_value(a),
        Command::KeyEstimate(a) => serde_json::to_value(a),
        Command::RadialSolve(a) => serde_json::to_value(a),
        Command::Raster(a) => serde_json::to_value(a),
    }
    .unwrap_or(serde_json::Value::Null);
    if matches!(c, Command::VerifyBubble(_) | Command::TensorCheck(_)) {
        if let Some(obj) = v.as_object_mut() {
            obj.insert("seed".into(), seed.into());
        }
    }
    v
}

/// Parses `args` (program name first) and runs the selected subcommand.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Output { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Output { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let name = command_name(&cli.command);
    let inputs = inputs_of(&cli.command, cli.seed);
    let result = match &cli.command {
        Command::VerifyBubble(a) => commands::verify_bubble(a, cli.seed),
        Command::Classify(a) => commands::classify(a),
        Command::EnergyScan(a) => commands::energy_scan(a),
        Command::GradCheck(a) => commands::grad_check(a),
        Command::TensorCheck(a) => commands::tensor_check(a, cli.seed),
        Command::KeyEstimate(a) => commands::key_estimate(a),
        Command::RadialSolve(a) => commands::radial_solve(a),
        Command::Raster(a) => commands::raster(a),
    };
    match result {
        Ok(mut produced) => {
            produced.report.inputs = inputs;
            let code = if produced.report.status == Status::Fail { 1 } else { 0 };
            let json_only = matches!(cli.command, Command::Classify(_));
            if cli.json || json_only {
                Output { code, stdout: produced.report.to_json(), stderr: produced.notes }
            } else {
                Output { code, stdout: produced.text, stderr: produced.notes }
            }
        }
        Err(Failure::Usage(msg)) => Output { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Numerical(e)) => {
            let results = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            let report = RunReport::new(name, inputs, results, Status::Fail, serde_json::Value::Null);
            if cli.json {
                Output { code: 1, stdout: report.to_json(), stderr: String::new() }
            } else {
                Output { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") }
            }
        }
    }
}
