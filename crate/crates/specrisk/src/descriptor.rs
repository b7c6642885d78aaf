//! JSON spectrum descriptors.
//!
//! Interchange forms:
//! `{"kind":"step","breaks":[...],"levels":[...]}` (optional `"normalize":true`),
//! `{"kind":"avar","alpha":x}`,
//! `{"kind":"mixture","atoms":[[alpha,mass],...]}`,
//! and `{"kind":"power","exponent":k}` for the bounded density
//! `(k+1) u^k`, which is discretized to an upper step majorant with
//! `--knots` cells.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use spectral_risk::{KusuokaMeasure, StepSpectrum};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumDescriptor {
    Step {
        breaks: Vec<f64>,
        levels: Vec<f64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        normalize: bool,
    },
    Avar {
        alpha: f64,
    },
    Mixture {
        atoms: Vec<(f64, f64)>,
    },
    Power {
        exponent: f64,
    },
}

impl SpectrumDescriptor {
    pub fn from_path(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read spectrum file {path}"))?;
        serde_json::from_str(&text).with_context(|| format!("malformed spectrum JSON in {path}"))
    }

    /// Builds the step spectrum; `knots` controls the discretization of
    /// closed-form densities.
    pub fn resolve(&self, knots: usize) -> Result<StepSpectrum> {
        match self {
            Self::Step {
                breaks,
                levels,
                normalize,
            } => {
                let s = if *normalize {
                    StepSpectrum::normalized(breaks, levels)
                } else {
                    StepSpectrum::new(breaks, levels)
                };
                Ok(s.context("invalid step spectrum")?)
            }
            Self::Avar { alpha } => Ok(StepSpectrum::avar(*alpha).context("invalid AVaR level")?),
            Self::Mixture { atoms } => {
                let m = KusuokaMeasure::new(atoms).context("invalid mixture atoms")?;
                Ok(StepSpectrum::from_kusuoka(&m))
            }
            Self::Power { exponent } => {
                let k = *exponent;
                if !k.is_finite() || k < 0.0 {
                    bail!("power exponent must be finite and nonnegative, got {k}");
                }
                let s = StepSpectrum::discretize_upper(|u| (k + 1.0) * u.powf(k), knots)
                    .context("discretization of the power density failed")?;
                Ok(s)
            }
        }
    }
}
