//! JSON reports: stable field order, no timestamps, embedded config hash.
//! Identical config and inputs produce byte-identical output.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::descriptor::SpectrumDescriptor;

/// Everything that determines a run; hashed into the report.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    pub spectrum: Option<SpectrumDescriptor>,
    pub returns: bool,
    pub oracle: bool,
    pub knots: usize,
    pub tol: f64,
    pub seed: u64,
    pub lower: Option<String>,
    pub upper: Option<String>,
}

impl RunConfig {
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hex::encode(hasher.finalize())
    }
}

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub version: &'static str,
    pub config_hash: String,
    #[serde(flatten)]
    pub body: T,
}

/// Emits the report JSON to stdout or `--out`, plus a short human summary on
/// stderr.
pub fn emit<T: Serialize>(
    config: &RunConfig,
    body: T,
    out: Option<&str>,
    summary: &str,
) -> Result<()> {
    let report = Report {
        command: config.command.clone(),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.hash(),
        body,
    };
    let mut json = serde_json::to_string_pretty(&report).context("report serialization")?;
    json.push('\n');
    match out {
        Some(path) => std::fs::write(path, json).with_context(|| format!("cannot write {path}"))?,
        None => print!("{json}"),
    }
    eprintln!("{summary}");
    Ok(())
}

#[derive(Serialize)]
pub struct EvalBody {
    pub n: usize,
    pub upper_bound: bool,
    pub excess: f64,
    pub values: EvalValues,
    pub max_discrepancy: f64,
    pub within_tolerance: bool,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct EvalValues {
    pub quantile: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cdf: Option<f64>,
    pub kusuoka: f64,
    pub infimum: f64,
}

#[derive(Serialize)]
pub struct ViolationBody {
    pub alpha: f64,
    pub tail_integral: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Serialize)]
pub struct DualCheckBody {
    pub n: usize,
    pub feasible: bool,
    pub mean: f64,
    pub violations: Vec<ViolationBody>,
    pub bound: f64,
    pub risk: f64,
    pub slack: f64,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct StepForm {
    pub breaks: Vec<f64>,
    pub levels: Vec<f64>,
}

#[derive(Serialize)]
pub struct ConvertBody {
    pub step: StepForm,
    pub atoms: Vec<(f64, f64)>,
    pub upper_bound: bool,
    pub excess: f64,
    pub round_trip_residual: f64,
}

#[derive(Serialize)]
pub struct HingeBody {
    pub knot: f64,
    pub weight: f64,
    pub level: f64,
}

#[derive(Serialize)]
pub struct InfrepBody {
    pub n: usize,
    pub f0: Vec<HingeBody>,
    pub expectation: f64,
    pub conjugate_integral: f64,
    pub objective: f64,
    pub risk: f64,
    pub gap: f64,
    pub upper_bound: bool,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
pub struct CrossCheck {
    pub quantile: f64,
    pub kusuoka: f64,
    pub max_discrepancy: f64,
}

#[derive(Serialize)]
pub struct OracleBody {
    pub weights: Vec<f64>,
    pub value: f64,
}

#[derive(Serialize)]
pub struct OptimizeBody {
    pub assets: Vec<String>,
    pub n_scenarios: usize,
    pub weights: Vec<f64>,
    pub knots: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub gap: f64,
    pub upper_bound: bool,
    pub cross_check: CrossCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleBody>,
    pub notes: Vec<String>,
}
