//! The spectral risk functional and its representations.
//!
//! On a finite discrete distribution the quantile function and a step
//! spectrum are both step functions of the probability level, so the
//! defining integral `int_0^1 F^{-1}(alpha) sigma(alpha) dalpha` is a finite
//! sum over the merged grid of cumulative probabilities and spectrum breaks.
//! The other representations (cdf integral, AVaR tail average, mixture of
//! AVaRs, dual supremum over feasible densities, and the infimum over
//! convex functions in [`crate::conjugate`]) are evaluated the same way and
//! agree with the quantile integral exactly up to summation error.

use crate::distributions::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::spectra::{KusuokaMeasure, StepSpectrum};

/// Absolute tolerance for dual feasibility checks (mean and convex-order
/// constraints). Inputs arrive through floating-point CSV, so exact
/// comparisons would reject legitimate duals.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A scenario-wise dual density: one value of `Z` per support point of a
/// reference distribution, with matching probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVariate {
    z: Vec<f64>,
    probs: Vec<f64>,
}

impl DualVariate {
    pub fn new(z: &[f64], probs: &[f64]) -> Result<Self> {
        if z.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: z.len(),
                right: probs.len(),
            });
        }
        if z.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &v in z {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
        }
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::NegativeProbability(
                probs.iter().copied().find(|&p| p < 0.0 || p.is_nan()).unwrap_or(f64::NAN),
            ));
        }
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(Self {
            z: z.to_vec(),
            probs: probs.iter().map(|&p| p / total).collect(),
        })
    }

    /// Values of `Z` against the reference scenarios.
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.z.iter().zip(&self.probs).map(|(z, p)| z * p).sum()
    }

    /// The law of `Z` as a distribution (duplicates merged); feasibility
    /// only depends on this law.
    pub fn law(&self) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(&self.z, Some(&self.probs))
            .expect("dual variate entries are finite with positive total mass")
    }
}

/// One failing level of the convex-order check: the tail integral of `Z`'s
/// quantile exceeded the spectrum's tail integral at `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityViolation {
    pub alpha: f64,
    /// `(1 - alpha) * AVaR_alpha(Z)`.
    pub tail_integral: f64,
    /// `tau_sigma(alpha)`, the admissible bound.
    pub bound: f64,
}

impl FeasibilityViolation {
    pub fn slack(&self) -> f64 {
        self.tail_integral - self.bound
    }
}

/// Outcome of [`check_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCheck {
    pub feasible: bool,
    /// `E Z`; must equal one for feasibility.
    pub mean: f64,
    pub violations: Vec<FeasibilityViolation>,
}

/// Spectral risk of `d` under spectrum `s`: the quantile integral
/// `int_0^1 F^{-1}(alpha) sigma(alpha) dalpha`, evaluated exactly as a sum
/// over the merged grid of cumulative probabilities and spectrum breaks.
///
/// With a majorant spectrum (`excess > 0`) on a nonnegative-support
/// distribution, the result is an upper bound for the underlying density's
/// risk, not a coherent risk value.
pub fn spectral_risk(d: &EmpiricalDistribution, s: &StepSpectrum) -> f64 {
    let cum = d.cumulative();
    let values = d.values();
    let breaks = s.breaks();
    let levels = s.levels();

    let mut total = 0.0;
    let mut lo = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while lo < 1.0 {
        let hi = cum[i].min(breaks[j + 1]);
        if hi > lo {
            total += (hi - lo) * values[i] * levels[j];
        }
        if cum[i] <= hi {
            i += 1;
        }
        if breaks[j + 1] <= hi {
            j += 1;
        }
        lo = hi;
    }
    total
}

/// Spectral risk through the cdf: for `Y >= 0`,
/// `R_sigma(Y) = int_0^inf tau_sigma(F(q)) dq`. The composition is a step
/// function of `q`, so the integral is again a finite sum.
pub fn spectral_risk_cdf(d: &EmpiricalDistribution, s: &StepSpectrum) -> Result<f64> {
    if d.min_support() < 0.0 {
        return Err(Error::NegativeSupport);
    }
    let values = d.values();
    let cum = d.cumulative();
    // tau(0) = 1 on [0, v_1), tau(c_i) on [v_i, v_{i+1}), tau(1) = 0 beyond.
    let mut total = values[0] * s.integral();
    for i in 0..values.len() - 1 {
        total += (values[i + 1] - values[i]) * s.integral_between(cum[i], 1.0);
    }
    Ok(total)
}

/// Average Value-at-Risk at level `alpha`: the tail average
/// `(1/(1-alpha)) int_alpha^1 F^{-1}(p) dp`, with `AVaR_1 = esssup`.
pub fn avar(d: &EmpiricalDistribution, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidLevel(alpha));
    }
    if alpha == 1.0 {
        return Ok(d.max_support());
    }
    Ok(d.tail_quantile_integral(alpha)? / (1.0 - alpha))
}

/// AVaR through the variational formula
/// `inf_q q + (1/(1-alpha)) E (Y - q)_+`, whose infimum is attained at the
/// `alpha`-quantile. Returns `(value, q*)`; no numeric search is involved.
pub fn avar_ru(d: &EmpiricalDistribution, alpha: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidAvarLevel(alpha));
    }
    let q = d.quantile(alpha)?;
    let expected_excess: f64 = d
        .values()
        .iter()
        .zip(d.probs())
        .map(|(&v, &p)| (v - q).max(0.0) * p)
        .sum();
    Ok((q + expected_excess / (1.0 - alpha), q))
}

/// Spectral risk as a mixture of AVaRs, `sum_i mass_i AVaR_{loc_i}(Y)`.
pub fn spectral_risk_kusuoka(d: &EmpiricalDistribution, m: &KusuokaMeasure) -> f64 {
    m.atoms()
        .iter()
        .map(|&(loc, mass)| mass * avar(d, loc).expect("atom locations lie in [0,1)"))
        .sum()
}

/// Expectation `E[Y * sigma(U)]` for the coupling that assigns the uniform
/// cell `((i-1)/n, i/n]` to scenario `perm[i]` of an equally weighted
/// distribution. The supremum over couplings is the spectral risk, attained
/// when `perm` sorts the scenarios (comonotone coupling).
pub fn comonotone_value(
    d: &EmpiricalDistribution,
    s: &StepSpectrum,
    perm: &[usize],
) -> Result<f64> {
    let n = d.len();
    let p = 1.0 / n as f64;
    if d.probs().iter().any(|&pi| (pi - p).abs() > 1e-12) {
        return Err(Error::UnequalProbs);
    }
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &k in perm {
        if k >= n || seen[k] {
            return Err(Error::NotAPermutation(n));
        }
        seen[k] = true;
    }
    let values = d.values();
    let mut total = 0.0;
    for (i, &k) in perm.iter().enumerate() {
        let cell = s.integral_between(i as f64 / n as f64, (i + 1) as f64 / n as f64);
        total += values[k] * cell;
    }
    Ok(total)
}

/// The comonotone dual density: scenario `i` of `d` carries the average of
/// `sigma` over its probability cell. This density is always feasible and
/// attains the dual supremum, `E[Y Z] = R_sigma(Y)`.
pub fn comonotone_dual(d: &EmpiricalDistribution, s: &StepSpectrum) -> DualVariate {
    let cum = d.cumulative();
    let probs = d.probs();
    let mut z = Vec::with_capacity(d.len());
    let mut lo = 0.0;
    for (i, &hi) in cum.iter().enumerate() {
        z.push(s.integral_between(lo, hi) / probs[i]);
        lo = hi;
    }
    DualVariate {
        z,
        probs: probs.to_vec(),
    }
}

/// Convex-order feasibility of a dual density `Z` against spectrum `s`:
/// `E Z = 1` and `(1-alpha) AVaR_alpha(Z) <= tau_sigma(alpha)` for all
/// `alpha`.
///
/// Both sides of the ordering constraint are piecewise linear in `alpha`
/// with kinks only at `Z`'s cumulative probabilities and the spectrum's
/// breaks, so checking the merged grid is exact: a dense sweep cannot find
/// violations the grid misses (see the unit test below).
pub fn check_feasible(zv: &DualVariate, s: &StepSpectrum) -> FeasibilityCheck {
    let mean = zv.mean();
    let law = zv.law();

    let mut grid: Vec<f64> = law
        .cumulative()
        .iter()
        .chain(s.breaks())
        .copied()
        .collect();
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut violations = Vec::new();
    for &alpha in &grid {
        let tail = law
            .tail_quantile_integral(alpha)
            .expect("grid points lie in [0,1]");
        let bound = s.integral_between(alpha, 1.0);
        if tail > bound + FEASIBILITY_TOL {
            violations.push(FeasibilityViolation {
                alpha,
                tail_integral: tail,
                bound,
            });
        }
    }
    let feasible = violations.is_empty() && (mean - 1.0).abs() <= FEASIBILITY_TOL;
    FeasibilityCheck {
        feasible,
        mean,
        violations,
    }
}

/// The dual objective `E[Y Z] = sum_i p_i y_i z_i` for a density coupled
/// scenario-wise with `d`. For feasible `Z` this never exceeds the spectral
/// risk.
pub fn dual_bound(d: &EmpiricalDistribution, zv: &DualVariate) -> Result<f64> {
    if zv.z.len() != d.len() {
        return Err(Error::LengthMismatch {
            left: d.len(),
            right: zv.z.len(),
        });
    }
    if d.probs()
        .iter()
        .zip(&zv.probs)
        .any(|(&a, &b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::ScenarioMismatch);
    }
    Ok(d.values()
        .iter()
        .zip(d.probs())
        .zip(&zv.z)
        .map(|((&y, &p), &z)| p * y * z)
        .sum())
}
