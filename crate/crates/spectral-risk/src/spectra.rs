//! Spectrum representation and algebra.
//!
//! A spectrum is a nondecreasing, nonnegative density on `[0, 1]` that
//! integrates to one. We work with step spectra (piecewise-constant on
//! half-open cells `[a_{i-1}, a_i)`), which are closed under the mixture
//! conversion both ways: every step spectrum corresponds to a finite atomic
//! measure on `[0, 1)` (its Kusuoka measure) and back.
//!
//! [`StepSpectrum::discretize_upper`] builds a step majorant of a bounded
//! nondecreasing density. The majorant is not rescaled to integrate to one,
//! since rescaling would break the pointwise domination that makes risk
//! values computed from it upper bounds; the integral excess over one is
//! carried on the spectrum itself.

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Nondecreasing, nonnegative step density on `[0, 1]`.
///
/// `sigma(u) = levels[i]` on `[breaks[i], breaks[i+1])`. Canonical form:
/// zero-length cells are dropped and consecutive equal levels are merged, so
/// the stored levels are strictly increasing. A proper spectrum integrates to
/// exactly one; a majorant from [`StepSpectrum::discretize_upper`] integrates
/// to `1 + excess` with `excess >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSpectrum {
    breaks: Vec<f64>,
    levels: Vec<f64>,
    excess: f64,
}

/// Finite atomic probability measure on `[0, 1)`, the mixture weights of the
/// AVaR representation. Atom locations are strictly increasing and all masses
/// are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct KusuokaMeasure {
    atoms: Vec<(f64, f64)>,
}

impl StepSpectrum {
    /// Validated step spectrum. The integral over `[0, 1]` must already equal
    /// one (within 1e-12); use [`StepSpectrum::normalized`] to rescale
    /// arbitrary positive levels instead.
    pub fn new(breaks: &[f64], levels: &[f64]) -> Result<Self> {
        let (breaks, levels) = canonicalize(breaks, levels)?;
        let integral = cell_integral(&breaks, &levels, 0.0, 1.0);
        if (integral - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(integral));
        }
        Ok(Self {
            breaks,
            levels,
            excess: 0.0,
        })
    }

    /// Step spectrum with levels rescaled so the integral is exactly one.
    pub fn normalized(breaks: &[f64], levels: &[f64]) -> Result<Self> {
        let (breaks, mut levels) = canonicalize(breaks, levels)?;
        let integral = cell_integral(&breaks, &levels, 0.0, 1.0);
        if integral <= 0.0 {
            return Err(Error::ZeroMass);
        }
        for l in &mut levels {
            *l /= integral;
        }
        Ok(Self {
            breaks,
            levels,
            excess: 0.0,
        })
    }

    /// The expectation spectrum, `sigma == 1`.
    pub fn expectation() -> Self {
        Self {
            breaks: vec![0.0, 1.0],
            levels: vec![1.0],
            excess: 0.0,
        }
    }

    /// The AVaR spectrum at level `alpha`:
    /// `sigma_alpha = 1/(1-alpha)` on `(alpha, 1]`, zero below.
    /// `alpha = 0` yields the expectation spectrum; `alpha = 1` (the
    /// essential supremum) is not a spectrum and is rejected.
    pub fn avar(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidAvarLevel(alpha));
        }
        if alpha == 0.0 {
            return Ok(Self::expectation());
        }
        Ok(Self {
            breaks: vec![0.0, alpha, 1.0],
            levels: vec![0.0, 1.0 / (1.0 - alpha)],
            excess: 0.0,
        })
    }

    /// Step majorant of a bounded nondecreasing density: on each of `n`
    /// uniform cells the level is the density's value at the right endpoint,
    /// so the result dominates the density pointwise and risk values computed
    /// from it are upper bounds.
    ///
    /// `sigma_fn` is evaluated at cell right endpoints and must return the
    /// left limit at jump points (step densities stored in this crate expose
    /// that via [`StepSpectrum::density_left_at`]). The density must be
    /// nonnegative, nondecreasing, finite at 1 and integrate to one; the
    /// integral is verified numerically by Riemann bracketing within 1e-6.
    ///
    /// The integral excess of the majorant over one is recorded on the
    /// returned spectrum, not rescaled away.
    pub fn discretize_upper<F: Fn(f64) -> f64>(sigma_fn: F, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        // Riemann bracket for a nondecreasing integrand: lower/upper sums.
        const SAMPLES: usize = 1_000_000;
        let mut prev = sigma_fn(0.0);
        if !prev.is_finite() || prev < 0.0 {
            return Err(Error::NonFiniteDensity(prev, 0.0));
        }
        let mut lower = 0.0;
        for k in 1..=SAMPLES {
            let u = k as f64 / SAMPLES as f64;
            let v = sigma_fn(u);
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NonFiniteDensity(v, u));
            }
            if v < prev {
                return Err(Error::InvalidLevels);
            }
            lower += prev / SAMPLES as f64;
            prev = v;
        }
        let upper = lower + (sigma_fn(1.0) - sigma_fn(0.0)) / SAMPLES as f64;
        if 1.0 < lower - 1e-6 || 1.0 > upper + 1e-6 {
            return Err(Error::NotNormalized(0.5 * (lower + upper)));
        }

        let breaks: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let levels: Vec<f64> = (1..=n).map(|i| sigma_fn(i as f64 / n as f64)).collect();
        let (breaks, levels) = canonicalize(&breaks, &levels)?;
        let mut excess = cell_integral(&breaks, &levels, 0.0, 1.0) - 1.0;
        if excess.abs() <= NORMALIZATION_TOL {
            excess = 0.0; // step densities are fixed points of their own discretization
        }
        Ok(Self {
            breaks,
            levels,
            excess,
        })
    }

    /// Cell boundaries `0 = a_0 < a_1 < ... < a_m = 1`.
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Strictly increasing levels, one per cell.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Integral excess over one; positive only for majorants built by
    /// [`StepSpectrum::discretize_upper`].
    pub fn excess(&self) -> f64 {
        self.excess
    }

    pub fn is_majorant(&self) -> bool {
        self.excess > 0.0
    }

    /// Total integral, `1 + excess`.
    pub fn integral(&self) -> f64 {
        1.0 + self.excess
    }

    /// Largest level, `sigma(1-)`.
    pub fn max_level(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    /// `sigma(u)` under the half-open convention: the level of the cell
    /// `[a_{i-1}, a_i)` containing `u`; at `u = 1` the left limit.
    pub fn density_at(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return self.max_level();
        }
        let cell = self.breaks.partition_point(|&b| b <= u).max(1) - 1;
        self.levels[cell.min(self.levels.len() - 1)]
    }

    /// Left-continuous evaluation, `lim_{t -> u-} sigma(t)`; the correct
    /// callable to feed back into [`StepSpectrum::discretize_upper`].
    pub fn density_left_at(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.levels[0];
        }
        let cell = self.breaks.partition_point(|&b| b < u).max(1) - 1;
        self.levels[cell.min(self.levels.len() - 1)]
    }

    /// Exact integral of the density over `[a, b] intersected with [0, 1]`.
    pub fn integral_between(&self, a: f64, b: f64) -> f64 {
        cell_integral(&self.breaks, &self.levels, a, b)
    }

    /// Survival function of the spectrum,
    /// `tau(alpha) = int_alpha^1 sigma(p) dp`: nonincreasing, concave,
    /// piecewise linear with `tau(0) = 1` (plus any majorant excess) and
    /// `tau(1) = 0`.
    pub fn tau(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidLevel(alpha));
        }
        if alpha == 0.0 {
            return Ok(self.integral());
        }
        Ok(self.integral_between(alpha, 1.0))
    }

    /// The measure on `[0, 1)` whose AVaR mixture reproduces this spectrum:
    /// an atom of mass `sigma(0)` at zero plus an atom of mass
    /// `(1 - a_i) * (level_{i+1} - level_i)` at each interior break.
    ///
    /// For a proper spectrum the masses sum to one; for a majorant they sum
    /// to `1 + excess` and the result is a positive, not a probability,
    /// measure.
    pub fn to_kusuoka(&self) -> KusuokaMeasure {
        let mut atoms = Vec::with_capacity(self.levels.len());
        if self.levels[0] > 0.0 {
            atoms.push((0.0, self.levels[0]));
        }
        for i in 1..self.levels.len() {
            let jump = self.levels[i] - self.levels[i - 1];
            atoms.push((self.breaks[i], (1.0 - self.breaks[i]) * jump));
        }
        debug_assert!(
            (atoms.iter().map(|&(_, m)| m).sum::<f64>() - self.integral()).abs() < 1e-9
        );
        KusuokaMeasure { atoms }
    }

    /// Spectrum of a mixture measure: the density jumps by `mass / (1 - loc)`
    /// at each atom location.
    pub fn from_kusuoka(measure: &KusuokaMeasure) -> Self {
        let mut breaks = vec![0.0];
        let mut levels = Vec::with_capacity(measure.atoms.len());
        let mut level = 0.0;
        for &(loc, mass) in &measure.atoms {
            if loc == 0.0 {
                level = mass;
                continue;
            }
            breaks.push(loc);
            levels.push(level);
            level += mass / (1.0 - loc);
        }
        breaks.push(1.0);
        levels.push(level);
        debug_assert!((cell_integral(&breaks, &levels, 0.0, 1.0) - 1.0).abs() < 1e-9);
        Self {
            breaks,
            levels,
            excess: 0.0,
        }
    }
}

impl KusuokaMeasure {
    /// Validated probability measure: locations in `[0, 1)`, positive masses
    /// summing to one within 1e-12. Duplicate locations are merged and
    /// zero-mass atoms dropped.
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut sorted: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for &(loc, mass) in atoms {
            if !loc.is_finite() || !(0.0..1.0).contains(&loc) {
                return Err(Error::InvalidAtomLocation(loc));
            }
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidAtomMass(mass));
            }
            if mass > 0.0 {
                sorted.push((loc, mass));
            }
        }
        if sorted.is_empty() {
            return Err(Error::ZeroMass);
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (loc, mass) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == loc => last.1 += mass,
                _ => merged.push((loc, mass)),
            }
        }
        let total: f64 = merged.iter().map(|&(_, m)| m).sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { atoms: merged })
    }

    /// Point mass at `alpha`; the mixture form of `AVaR_alpha`.
    pub fn dirac(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::InvalidAtomLocation(alpha));
        }
        Ok(Self {
            atoms: vec![(alpha, 1.0)],
        })
    }

    /// `(location, mass)` pairs with strictly increasing locations.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }
}

/// Validates shape and monotonicity, drops zero-length cells and merges
/// consecutive equal levels.
fn canonicalize(breaks: &[f64], levels: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if breaks.len() != levels.len() + 1 || levels.is_empty() {
        return Err(Error::InvalidBreaks);
    }
    for &b in breaks {
        if !b.is_finite() {
            return Err(Error::NonFinite(b));
        }
    }
    if breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
        return Err(Error::InvalidBreaks);
    }
    if breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidBreaks);
    }

    let mut out_breaks = vec![0.0];
    let mut out_levels: Vec<f64> = Vec::with_capacity(levels.len());
    for i in 0..levels.len() {
        if breaks[i + 1] == breaks[i] {
            continue; // zero-length cell
        }
        let level = levels[i];
        if !level.is_finite() || level < 0.0 {
            return Err(Error::InvalidLevels);
        }
        match out_levels.last() {
            Some(&prev) if level < prev => return Err(Error::InvalidLevels),
            Some(&prev) if level == prev => {
                *out_breaks.last_mut().unwrap() = breaks[i + 1];
            }
            _ => {
                out_breaks.push(breaks[i + 1]);
                out_levels.push(level);
            }
        }
    }
    if out_levels.is_empty() {
        return Err(Error::InvalidBreaks);
    }
    Ok((out_breaks, out_levels))
}

/// `int_{[a,b]} sigma` for a step function given by its cells.
fn cell_integral(breaks: &[f64], levels: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for (i, &level) in levels.iter().enumerate() {
        let lo = breaks[i].max(a);
        let hi = breaks[i + 1].min(b);
        if hi > lo {
            total += level * (hi - lo);
        }
    }
    total
}
