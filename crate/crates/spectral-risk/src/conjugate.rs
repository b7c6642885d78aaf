//! Piecewise-linear convex functions and their exact convex conjugates.
//!
//! The working family is the hinge ansatz
//!
//! ```text
//! f(y) = offset + mu0 * y + sum_i mu_i * ( q_i + (y - q_i)_+ / (1 - alpha_i) )
//! ```
//!
//! which is closed under the operations the infimum representation of
//! spectral risk needs: pointwise evaluation, vertical shifts, conjugation
//! and affine re-parameterization. The conjugate of such a function is
//! finite exactly on the closure of its slope range and piecewise linear
//! there, so it is stored as an exact table of slope breakpoints: grids
//! appear only in test oracles, never in the production path.

use crate::distributions::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::spectra::{KusuokaMeasure, StepSpectrum};

/// Relative slack accepted when a queried slope sits on the boundary of the
/// conjugate domain; cumulative slope sums computed along different
/// groupings may differ by a few ulps.
const BOUNDARY_TOL: f64 = 1e-9;

/// One hinge `mu * (q + (y - q)_+ / (1 - alpha))` of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeTerm {
    /// Knot `q` where the hinge activates.
    pub knot: f64,
    /// Positive multiplier `mu`.
    pub weight: f64,
    /// Tail level `alpha` in `[0, 1)`; the hinge slope is `mu / (1 - alpha)`.
    pub level: f64,
}

impl HingeTerm {
    pub fn new(knot: f64, weight: f64, level: f64) -> Result<Self> {
        if !knot.is_finite() {
            return Err(Error::NonFinite(knot));
        }
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::InvalidWeight(weight));
        }
        if !level.is_finite() || !(0.0..1.0).contains(&level) {
            return Err(Error::InvalidLevel(level));
        }
        Ok(Self {
            knot,
            weight,
            level,
        })
    }

    /// Slope contributed once the hinge is active.
    fn slope(&self) -> f64 {
        self.weight / (1.0 - self.level)
    }
}

/// Convex piecewise-linear function in hinge-ansatz form. Convexity is
/// automatic: all hinge slopes are positive, so the total slope is
/// nondecreasing in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearConvex {
    base_slope: f64,
    offset: f64,
    terms: Vec<HingeTerm>,
}

impl PiecewiseLinearConvex {
    /// Ansatz function with the given base slope `mu0 >= 0` and hinge terms.
    /// Terms are sorted by knot; coincident `(knot, level)` pairs merge by
    /// summing weights.
    pub fn new(base_slope: f64, terms: Vec<HingeTerm>) -> Result<Self> {
        if !base_slope.is_finite() || base_slope < 0.0 {
            return Err(Error::InvalidBaseSlope(base_slope));
        }
        let mut sorted = Vec::with_capacity(terms.len());
        for t in terms {
            // re-validate: callers may build HingeTerm literals directly
            sorted.push(HingeTerm::new(t.knot, t.weight, t.level)?);
        }
        sorted.sort_by(|a, b| a.knot.total_cmp(&b.knot).then(a.level.total_cmp(&b.level)));
        let mut merged: Vec<HingeTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.knot == t.knot && last.level == t.level => {
                    last.weight += t.weight;
                }
                _ => merged.push(t),
            }
        }
        Ok(Self {
            base_slope,
            offset: 0.0,
            terms: merged,
        })
    }

    /// The linear function `f(y) = slope * y`.
    pub fn linear(slope: f64) -> Result<Self> {
        Self::new(slope, Vec::new())
    }

    /// The single-hinge function `q + (y - q)_+ / (1 - alpha)` that attains
    /// the AVaR infimum.
    pub fn hinge(knot: f64, level: f64) -> Result<Self> {
        Self::new(0.0, vec![HingeTerm::new(knot, 1.0, level)?])
    }

    pub fn base_slope(&self) -> f64 {
        self.base_slope
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &[HingeTerm] {
        &self.terms
    }

    /// Smallest slope, `f'(-inf)`.
    pub fn min_slope(&self) -> f64 {
        self.base_slope
    }

    /// Largest slope, `f'(+inf)`.
    pub fn max_slope(&self) -> f64 {
        self.base_slope + self.terms.iter().map(HingeTerm::slope).sum::<f64>()
    }

    /// Exact evaluation of the ansatz formula.
    pub fn eval(&self, y: f64) -> f64 {
        let hinges: f64 = self
            .terms
            .iter()
            .map(|t| t.weight * (t.knot + (y - t.knot).max(0.0) / (1.0 - t.level)))
            .sum();
        self.offset + self.base_slope * y + hinges
    }

    /// `E f(Y)` under a finite distribution.
    pub fn expectation(&self, d: &EmpiricalDistribution) -> f64 {
        d.values()
            .iter()
            .zip(d.probs())
            .map(|(&y, &p)| p * self.eval(y))
            .sum()
    }

    /// The vertically shifted function `f - a`. Its conjugate is `f* + a`,
    /// which [`conjugate`](Self::conjugate) reproduces exactly at every
    /// slope breakpoint.
    pub fn shift(&self, a: f64) -> Self {
        let mut shifted = self.clone();
        shifted.offset -= a;
        shifted
    }

    /// Exact Legendre-Fenchel conjugate `f*(x) = sup_y (x y - f(y))`,
    /// finite on the slope range `[min_slope, max_slope]`.
    ///
    /// Breakpoints are the cumulative slopes; between consecutive
    /// breakpoints the supremum is attained at the knot separating them, so
    /// `f*` has that knot as its derivative there.
    pub fn conjugate(&self) -> ConjugateTable {
        // group coincident knots: they produce one breakpoint gap
        let mut knots: Vec<f64> = Vec::with_capacity(self.terms.len());
        let mut jumps: Vec<f64> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match knots.last() {
                Some(&k) if k == t.knot => *jumps.last_mut().unwrap() += t.slope(),
                _ => {
                    knots.push(t.knot);
                    jumps.push(t.slope());
                }
            }
        }
        let constant: f64 =
            self.offset + self.terms.iter().map(|t| t.weight * t.knot).sum::<f64>();

        let mut breakpoints = Vec::with_capacity(knots.len() + 1);
        let mut values = Vec::with_capacity(knots.len() + 1);
        breakpoints.push(self.base_slope);
        values.push(-constant);
        let mut slope = self.base_slope;
        for (k, jump) in knots.iter().zip(&jumps) {
            slope += jump;
            breakpoints.push(slope);
            values.push(slope * k - self.eval(*k));
        }
        ConjugateTable {
            breakpoints,
            values,
            segment_slopes: knots,
        }
    }
}

/// Exact conjugate of a [`PiecewiseLinearConvex`]: finite, convex and
/// piecewise linear on `[breakpoints[0], breakpoints[last]]`, `+inf`
/// outside. `segment_slopes[k]` is the derivative between breakpoints `k`
/// and `k + 1` (the knot of the primal function where the supremum is
/// attained).
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateTable {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    segment_slopes: Vec<f64>,
}

impl ConjugateTable {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segment_slopes(&self) -> &[f64] {
        &self.segment_slopes
    }

    /// The interval where the conjugate is finite.
    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// `f*(x)`, or an error when `x` lies outside the finite domain.
    /// Boundary queries are accepted within a relative tolerance because
    /// slope sums computed along different groupings may differ by ulps.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slack = BOUNDARY_TOL * hi.abs().max(lo.abs()).max(1.0);
        if x < lo - slack || x > hi + slack {
            return Err(Error::OutsideConjugateDomain(x, lo, hi));
        }
        let x = x.clamp(lo, hi);
        let j = self.breakpoints.partition_point(|&b| b <= x);
        if j == 0 {
            return Ok(self.values[0]);
        }
        if x == self.breakpoints[j - 1] {
            return Ok(self.values[j - 1]);
        }
        Ok(self.values[j - 1] + self.segment_slopes[j - 1] * (x - self.breakpoints[j - 1]))
    }

    /// Biconjugate `f**(y) = sup_x (x y - f*(x))`: the supremum over the
    /// finite domain is attained at a breakpoint, and reproduces `f`.
    pub fn biconjugate_at(&self, y: f64) -> f64 {
        self.breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| x * y - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Conjugate of `g(x) = a + b x + gamma * f(lambda x + c)` derived from
    /// the conjugate of `f`:
    /// `g*(y) = -a - c (y - b) / lambda + gamma * f*((y - b) / (lambda gamma))`.
    /// The domain maps affinely, `x -> b + lambda * gamma * x`.
    pub fn affine_transform(
        &self,
        a: f64,
        b: f64,
        gamma: f64,
        lambda: f64,
        c: f64,
    ) -> Result<ConjugateTable> {
        if gamma <= 0.0 || lambda == 0.0 || !gamma.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidTransform);
        }
        let mut breakpoints: Vec<f64> = self
            .breakpoints
            .iter()
            .map(|&s| b + lambda * gamma * s)
            .collect();
        let mut values: Vec<f64> = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&s, &v)| -a - c * gamma * s + gamma * v)
            .collect();
        let mut segment_slopes: Vec<f64> = self
            .segment_slopes
            .iter()
            .map(|&q| (q - c) / lambda)
            .collect();
        if lambda < 0.0 {
            breakpoints.reverse();
            values.reverse();
            segment_slopes.reverse();
        }
        Ok(ConjugateTable {
            breakpoints,
            values,
            segment_slopes,
        })
    }
}

/// The conjugate-against-spectrum integral
/// `int_0^1 f*(sigma(p)) dp = sum_i (a_i - a_{i-1}) f*(level_i)`, exact.
/// Errors identify the first spectrum level outside the conjugate domain.
pub fn conjugate_integral(f: &PiecewiseLinearConvex, s: &StepSpectrum) -> Result<f64> {
    let table = f.conjugate();
    let breaks = s.breaks();
    let mut total = 0.0;
    for (i, &level) in s.levels().iter().enumerate() {
        total += (breaks[i + 1] - breaks[i]) * table.value_at(level)?;
    }
    Ok(total)
}

/// The explicit minimizer of the infimum representation: one hinge per
/// mixture atom, with knot at the corresponding quantile of `d`,
///
/// ```text
/// f0(y) = sum_i mass_i * ( q(loc_i) + (y - q(loc_i))_+ / (1 - loc_i) ).
/// ```
///
/// It satisfies `E f0(Y) = sum_i mass_i AVaR_{loc_i}(Y)` and
/// `int_0^1 f0*(sigma(p)) dp = 0`, closing the duality gap. An atom at zero
/// contributes the full-range hinge `q_min + (y - q_min)_+`, which equals
/// `y` on the support, so the construction is uniform across atoms.
pub fn build_f0(d: &EmpiricalDistribution, m: &KusuokaMeasure) -> PiecewiseLinearConvex {
    let terms = m
        .atoms()
        .iter()
        .map(|&(loc, mass)| {
            HingeTerm::new(
                d.quantile(loc).expect("atom locations lie in [0,1)"),
                mass,
                loc,
            )
            .expect("measure atoms are valid hinge parameters")
        })
        .collect();
    PiecewiseLinearConvex::new(0.0, terms).expect("hinges built from a valid measure")
}
