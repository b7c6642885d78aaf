//! Finite discrete loss distributions with exact quantile and cdf evaluation.
//!
//! The quantile follows the left-continuous convention
//! `F^{-1}(alpha) = inf { y : P(Y <= y) >= alpha }`, the cdf is the
//! right-continuous step function `F(y) = P(Y <= y)`. Both are evaluated
//! exactly from cached cumulative probabilities, so tail integrals of the
//! quantile function reduce to finite sums over probability cells.

use crate::error::{Error, Result};

/// A finite discrete distribution: strictly increasing support values with
/// positive probabilities summing to one.
///
/// Construction canonicalizes the input: duplicate support values are merged
/// by summing their weights, zero-weight entries are dropped and weights are
/// renormalized. The cumulative probabilities are cached with the final entry
/// forced to exactly 1 so that `quantile(1.0)` never falls off the table.
///
/// Values are immutable after construction; concurrent reads are safe.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Builds a distribution from raw samples and optional nonnegative
    /// weights. Missing weights mean equal weights `1/n`. Weights may sum to
    /// anything positive; they are renormalized to probabilities.
    pub fn from_samples(values: &[f64], probs: Option<&[f64]>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        for &v in values {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
        }
        let weights: Vec<f64> = match probs {
            Some(p) => {
                if p.len() != values.len() {
                    return Err(Error::LengthMismatch {
                        left: values.len(),
                        right: p.len(),
                    });
                }
                for &w in p {
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::NegativeProbability(w));
                    }
                }
                p.to_vec()
            }
            None => vec![1.0 / values.len() as f64; values.len()],
        };
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }

        let mut pairs: Vec<(f64, f64)> = values
            .iter()
            .zip(weights.iter())
            .filter(|(_, &w)| w > 0.0)
            .map(|(&v, &w)| (v, w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged_values = Vec::with_capacity(pairs.len());
        let mut merged_probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            match merged_values.last() {
                Some(&last) if last == v => *merged_probs.last_mut().unwrap() += w,
                _ => {
                    merged_values.push(v);
                    merged_probs.push(w);
                }
            }
        }

        for p in &mut merged_probs {
            *p /= total;
        }
        let mut cumulative = Vec::with_capacity(merged_probs.len());
        let mut acc = 0.0;
        for &p in &merged_probs {
            acc += p;
            cumulative.push(acc);
        }
        // The rounding error of the running sum must not leave alpha = 1
        // without a matching cell.
        *cumulative.last_mut().unwrap() = 1.0;

        Ok(Self {
            values: merged_values,
            probs: merged_probs,
            cumulative,
        })
    }

    /// Equal-weight distribution over the given samples.
    pub fn uniform(values: &[f64]) -> Result<Self> {
        Self::from_samples(values, None)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one atom by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Cached right endpoints of the probability cells; the last entry is
    /// exactly 1.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn min_support(&self) -> f64 {
        self.values[0]
    }

    pub fn max_support(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(self.probs.iter())
            .map(|(v, p)| v * p)
            .sum()
    }

    /// Left-continuous quantile `inf { y : F(y) >= alpha }`.
    ///
    /// Comparison against the cumulative table uses `>=` with no epsilon so
    /// ties resolve exactly as the infimum definition prescribes.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidLevel(alpha));
        }
        let idx = self.cumulative.partition_point(|&c| c < alpha);
        Ok(self.values[idx.min(self.values.len() - 1)])
    }

    /// Right-continuous cdf `P(Y <= y)`.
    pub fn cdf(&self, y: f64) -> f64 {
        let count = self.values.partition_point(|&v| v <= y);
        if count == 0 {
            0.0
        } else {
            self.cumulative[count - 1]
        }
    }

    /// Exact tail integral of the quantile function,
    /// `G(alpha) = int_alpha^1 F^{-1}(p) dp`, as a finite sum over the
    /// probability cells that intersect `[alpha, 1]`.
    pub fn tail_quantile_integral(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidLevel(alpha));
        }
        let mut total = 0.0;
        let mut lo = 0.0f64;
        for (i, &hi) in self.cumulative.iter().enumerate() {
            if hi > alpha {
                total += self.values[i] * (hi - lo.max(alpha));
            }
            lo = hi;
        }
        Ok(total)
    }
}
