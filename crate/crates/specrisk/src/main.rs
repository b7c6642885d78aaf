//! `specrisk`: spectral risk evaluation and scenario portfolio optimization
//! on CSV data, with machine-readable JSON reports.
//!
//! Exit codes: 0 success, 1 validation error, 2 infeasible set or solver
//! failure.

mod descriptor;
mod input;
mod report;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

use descriptor::SpectrumDescriptor;
use report::RunConfig;
use spectral_risk::conjugate::{build_f0, conjugate_integral};
use spectral_risk::optimize::{grid_search_oracle, minimize_spectral, ScenarioProblem};
use spectral_risk::risk::{
    check_feasible, dual_bound, spectral_risk, spectral_risk_cdf, spectral_risk_kusuoka,
};
use spectral_risk::{DualVariate, EmpiricalDistribution, Error as RiskError, StepSpectrum};

#[derive(Parser)]
#[command(name = "specrisk", version, about = "Spectral risk measures on scenario data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Spectrum descriptor JSON file.
    #[arg(long, value_name = "PATH", conflicts_with = "alpha")]
    spectrum: Option<String>,
    /// Shorthand for the AVaR spectrum at this level.
    #[arg(long, value_name = "X")]
    alpha: Option<f64>,
    /// Inputs are returns; losses are their negatives.
    #[arg(long)]
    returns: bool,
    /// Number of cells when discretizing closed-form densities.
    #[arg(long, value_name = "N", default_value_t = 32)]
    knots: usize,
    /// Cross-check tolerance reported as `within_tolerance`.
    #[arg(long, value_name = "X", default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized validation (recorded for reproducibility).
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the spectral risk of a sample column through all
    /// representations.
    Eval {
        /// CSV of samples (optional `prob` column).
        samples: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Check a dual density for convex-order feasibility and report its
    /// bound against the risk.
    DualCheck {
        /// CSV of samples (optional `prob` column).
        samples: String,
        /// CSV with the dual density, aligned row-wise with the samples.
        dual: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Convert a spectrum descriptor between step and mixture forms.
    Convert {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Build the explicit minimizer of the infimum representation and
    /// report its duality gap.
    Infrep {
        /// CSV of samples (optional `prob` column).
        samples: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Minimize portfolio spectral risk over the scenario matrix.
    Optimize {
        /// CSV with a header of asset names, one scenario per row
        /// (optional `prob` column).
        scenarios: String,
        /// Validate against the exhaustive grid oracle (at most 3 assets).
        #[arg(long)]
        oracle: bool,
        /// Comma-separated per-asset lower bounds.
        #[arg(long, value_name = "L1,L2,...")]
        lower: Option<String>,
        /// Comma-separated per-asset upper bounds.
        #[arg(long, value_name = "U1,U2,...")]
        upper: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

/// 2 for infeasibility/solver failure, 1 for validation problems.
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(risk_err) = cause.downcast_ref::<RiskError>() {
            match risk_err {
                RiskError::Infeasible
                | RiskError::Unbounded
                | RiskError::PivotLimit
                | RiskError::InfeasibleWeights(_)
                | RiskError::InconsistentBounds(_) => return 2,
                _ => return 1,
            }
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval { samples, common } => cmd_eval(&samples, &common),
        Command::DualCheck {
            samples,
            dual,
            common,
        } => cmd_dual_check(&samples, &dual, &common),
        Command::Convert { common } => cmd_convert(&common),
        Command::Infrep { samples, common } => cmd_infrep(&samples, &common),
        Command::Optimize {
            scenarios,
            oracle,
            lower,
            upper,
            common,
        } => cmd_optimize(&scenarios, oracle, lower, upper, &common),
    }
}

fn descriptor_for(common: &CommonOpts) -> Result<SpectrumDescriptor> {
    match (&common.spectrum, common.alpha) {
        (Some(path), None) => SpectrumDescriptor::from_path(path),
        (None, Some(alpha)) => Ok(SpectrumDescriptor::Avar { alpha }),
        (None, None) => bail!("either --spectrum or --alpha is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn config_for(command: &str, inputs: &[&str], common: &CommonOpts, oracle: bool) -> RunConfig {
    RunConfig {
        command: command.to_string(),
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        spectrum: None,
        returns: common.returns,
        oracle,
        knots: common.knots,
        tol: common.tol,
        seed: common.seed,
        lower: None,
        upper: None,
    }
}

fn load_distribution(path: &str, negate: bool) -> Result<EmpiricalDistribution> {
    let samples = input::read_samples(path)?;
    let values: Vec<f64> = if negate {
        samples.values.iter().map(|v| -v).collect()
    } else {
        samples.values
    };
    EmpiricalDistribution::from_samples(&values, samples.probs.as_deref())
        .with_context(|| format!("invalid sample data in {path}"))
}

fn majorant_note(s: &StepSpectrum, notes: &mut Vec<String>) {
    if s.is_majorant() {
        notes.push(format!(
            "spectrum is a discretized majorant (integral excess {:.3e}); values are upper bounds",
            s.excess()
        ));
    }
}

fn cmd_eval(samples: &str, common: &CommonOpts) -> Result<()> {
    let descriptor = descriptor_for(common)?;
    let spectrum = descriptor.resolve(common.knots)?;
    let d = load_distribution(samples, common.returns)?;

    let mut notes = Vec::new();
    majorant_note(&spectrum, &mut notes);

    let quantile = spectral_risk(&d, &spectrum);
    let cdf = if d.min_support() >= 0.0 {
        Some(spectral_risk_cdf(&d, &spectrum)?)
    } else {
        notes.push("support has negative values; cdf representation skipped".to_string());
        None
    };
    let measure = spectrum.to_kusuoka();
    let kusuoka = spectral_risk_kusuoka(&d, &measure);
    let infimum = build_f0(&d, &measure).expectation(&d);

    let mut present = vec![quantile, kusuoka, infimum];
    present.extend(cdf);
    let mut max_discrepancy = 0.0f64;
    for (i, a) in present.iter().enumerate() {
        for b in &present[i + 1..] {
            max_discrepancy = max_discrepancy.max((a - b).abs());
        }
    }

    let mut config = config_for("eval", &[samples], common, false);
    config.spectrum = Some(descriptor);
    let summary = format!(
        "risk {quantile:.6} across {} representations, max discrepancy {max_discrepancy:.3e}",
        present.len()
    );
    report::emit(
        &config,
        report::EvalBody {
            n: d.len(),
            upper_bound: spectrum.is_majorant(),
            excess: spectrum.excess(),
            values: report::EvalValues {
                quantile,
                cdf,
                kusuoka,
                infimum,
            },
            max_discrepancy,
            within_tolerance: max_discrepancy <= common.tol,
            notes,
        },
        common.out.as_deref(),
        &summary,
    )
}

fn cmd_dual_check(samples: &str, dual: &str, common: &CommonOpts) -> Result<()> {
    let descriptor = descriptor_for(common)?;
    let spectrum = descriptor.resolve(common.knots)?;
    let raw = input::read_samples(samples)?;
    let z_raw = input::read_dual(dual)?;
    if z_raw.len() != raw.values.len() {
        bail!(
            "{dual} has {} rows but {samples} has {}",
            z_raw.len(),
            raw.values.len()
        );
    }

    let mut notes = Vec::new();
    majorant_note(&spectrum, &mut notes);
    let sign = if common.returns { -1.0 } else { 1.0 };
    let weights = raw
        .probs
        .clone()
        .unwrap_or_else(|| vec![1.0; raw.values.len()]);

    // merge duplicate sample values, averaging the dual density with the
    // scenario weights so E[YZ] is preserved
    let mut triples: Vec<(f64, f64, f64)> = raw
        .values
        .iter()
        .zip(&weights)
        .zip(&z_raw)
        .map(|((&y, &w), &z)| (sign * y, w, z))
        .collect();
    triples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut values = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    let mut zs: Vec<f64> = Vec::new();
    for (y, w, z) in triples {
        match values.last() {
            Some(&last) if last == y => {
                let total = *probs.last().unwrap() + w;
                let merged_z = (zs.last().unwrap() * probs.last().unwrap() + z * w) / total;
                *probs.last_mut().unwrap() = total;
                *zs.last_mut().unwrap() = merged_z;
            }
            _ => {
                values.push(y);
                probs.push(w);
                zs.push(z);
            }
        }
    }
    if values.len() != raw.values.len() {
        notes.push(format!(
            "merged {} duplicate sample values; dual entries averaged",
            raw.values.len() - values.len()
        ));
    }

    let d = EmpiricalDistribution::from_samples(&values, Some(&probs))
        .with_context(|| format!("invalid sample data in {samples}"))?;
    let zv = DualVariate::new(&zs, d.probs()).context("invalid dual density")?;
    let check = check_feasible(&zv, &spectrum);
    let bound = dual_bound(&d, &zv)?;
    let risk = spectral_risk(&d, &spectrum);

    let mut config = config_for("dual-check", &[samples, dual], common, false);
    config.spectrum = Some(descriptor);
    let summary = format!(
        "dual is {}; bound {bound:.6} vs risk {risk:.6}",
        if check.feasible { "feasible" } else { "infeasible" }
    );
    report::emit(
        &config,
        report::DualCheckBody {
            n: d.len(),
            feasible: check.feasible,
            mean: check.mean,
            violations: check
                .violations
                .iter()
                .map(|v| report::ViolationBody {
                    alpha: v.alpha,
                    tail_integral: v.tail_integral,
                    bound: v.bound,
                    slack: v.slack(),
                })
                .collect(),
            bound,
            risk,
            slack: risk - bound,
            notes,
        },
        common.out.as_deref(),
        &summary,
    )
}

fn cmd_convert(common: &CommonOpts) -> Result<()> {
    let descriptor = descriptor_for(common)?;
    let spectrum = descriptor.resolve(common.knots)?;
    let measure = spectrum.to_kusuoka();

    // round trip both ways; the residual must vanish
    let back = StepSpectrum::from_kusuoka(&measure);
    let mut residual = 0.0f64;
    for (a, b) in spectrum.breaks().iter().zip(back.breaks()) {
        residual = residual.max((a - b).abs());
    }
    for (a, b) in spectrum.levels().iter().zip(back.levels()) {
        residual = residual.max((a - b).abs());
    }
    if spectrum.breaks().len() != back.breaks().len() {
        residual = f64::INFINITY;
    }
    let again = back.to_kusuoka();
    if again.atoms().len() != measure.atoms().len() {
        residual = f64::INFINITY;
    } else {
        for (a, b) in measure.atoms().iter().zip(again.atoms()) {
            residual = residual.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
    }

    let mut config = config_for("convert", &[], common, false);
    config.spectrum = Some(descriptor);
    let summary = format!(
        "{} cells <-> {} atoms, round-trip residual {residual:.3e}",
        spectrum.levels().len(),
        measure.atoms().len()
    );
    report::emit(
        &config,
        report::ConvertBody {
            step: report::StepForm {
                breaks: spectrum.breaks().to_vec(),
                levels: spectrum.levels().to_vec(),
            },
            atoms: measure.atoms().to_vec(),
            upper_bound: spectrum.is_majorant(),
            excess: spectrum.excess(),
            round_trip_residual: residual,
        },
        common.out.as_deref(),
        &summary,
    )
}

fn cmd_infrep(samples: &str, common: &CommonOpts) -> Result<()> {
    let descriptor = descriptor_for(common)?;
    let spectrum = descriptor.resolve(common.knots)?;
    let d = load_distribution(samples, common.returns)?;

    let mut notes = Vec::new();
    majorant_note(&spectrum, &mut notes);

    let measure = spectrum.to_kusuoka();
    let f0 = build_f0(&d, &measure);
    let expectation = f0.expectation(&d);
    let integral = conjugate_integral(&f0, &spectrum)?;
    let objective = expectation + integral;
    let risk = spectral_risk(&d, &spectrum);

    let mut config = config_for("infrep", &[samples], common, false);
    config.spectrum = Some(descriptor);
    let summary = format!(
        "f0 with {} hinges attains {objective:.6} vs risk {risk:.6}",
        f0.terms().len()
    );
    report::emit(
        &config,
        report::InfrepBody {
            n: d.len(),
            f0: f0
                .terms()
                .iter()
                .map(|t| report::HingeBody {
                    knot: t.knot,
                    weight: t.weight,
                    level: t.level,
                })
                .collect(),
            expectation,
            conjugate_integral: integral,
            objective,
            risk,
            gap: (objective - risk).abs(),
            upper_bound: spectrum.is_majorant(),
            notes,
        },
        common.out.as_deref(),
        &summary,
    )
}

fn cmd_optimize(
    scenarios: &str,
    oracle: bool,
    lower: Option<String>,
    upper: Option<String>,
    common: &CommonOpts,
) -> Result<()> {
    let descriptor = descriptor_for(common)?;
    let spectrum = descriptor.resolve(common.knots)?;
    let data = input::read_scenarios(scenarios)?;
    let sign = if common.returns { -1.0 } else { 1.0 };
    let rows: Vec<Vec<f64>> = data
        .rows
        .iter()
        .map(|row| row.iter().map(|v| sign * v).collect())
        .collect();

    let mut notes = Vec::new();
    majorant_note(&spectrum, &mut notes);

    let mut problem = ScenarioProblem::new(&rows, data.probs.as_deref(), spectrum.clone())
        .with_context(|| format!("invalid scenario data in {scenarios}"))?;
    if lower.is_some() || upper.is_some() {
        let d = problem.n_assets();
        let lo = match &lower {
            Some(text) => input::parse_bounds(text, d, "lower")?,
            None => vec![0.0; d],
        };
        let hi = match &upper {
            Some(text) => input::parse_bounds(text, d, "upper")?,
            None => vec![1.0; d],
        };
        problem = problem.with_bounds(&lo, &hi)?;
    }

    let solution = minimize_spectral(&problem)?;

    // representation cross-check at the optimum
    let loss = problem.loss_distribution(&solution.weights)?;
    let quantile = spectral_risk(&loss, &spectrum);
    let kusuoka = spectral_risk_kusuoka(&loss, &spectrum.to_kusuoka());
    let max_discrepancy = (quantile - kusuoka)
        .abs()
        .max((quantile - solution.value).abs());

    let oracle_body = if oracle {
        if problem.n_assets() <= 3 {
            let (weights, value) = grid_search_oracle(&problem, 1e-3)?;
            Some(report::OracleBody { weights, value })
        } else {
            notes.push("oracle skipped: more than 3 assets".to_string());
            None
        }
    } else {
        None
    };

    let mut config = config_for("optimize", &[scenarios], common, oracle);
    config.spectrum = Some(descriptor);
    config.lower = lower;
    config.upper = upper;
    let summary = format!(
        "optimal value {:.6} at weights {:?} after {} pivots",
        solution.value, solution.weights, solution.iterations
    );
    report::emit(
        &config,
        report::OptimizeBody {
            assets: data.assets,
            n_scenarios: problem.n_scenarios(),
            weights: solution.weights,
            knots: solution.knots,
            value: solution.value,
            iterations: solution.iterations,
            gap: solution.gap,
            upper_bound: spectrum.is_majorant(),
            cross_check: report::CrossCheck {
                quantile,
                kusuoka,
                max_discrepancy,
            },
            oracle: oracle_body,
            notes,
        },
        common.out.as_deref(),
        &summary,
    )
}
