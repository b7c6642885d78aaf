//! Scenario-based portfolio optimization with a spectral-risk objective.
//!
//! The loss of weights `x` under scenario `s` is the row product `x^T Y_s`.
//! Minimizing the spectral risk of that loss over a (bounded) simplex is
//! turned into a finite linear program through the hinge ansatz
//!
//! ```text
//! f_n(y) = mu0 * y + sum_i mu_i * ( q_i + (y - q_i)_+ / (1 - alpha_i) )
//! ```
//!
//! whose mixture weights `(alpha_i, mu_i)` come from the spectrum's atomic
//! measure: minimizing `E f_n(x^T Y)` jointly over `(x, q)` equals minimizing
//! the portfolio risk, because the inner minimum over each knot `q_i` is
//! attained at the corresponding quantile of the loss distribution. Hinge
//! expectations are linearized by epigraph variables `t_{si} >= x^T Y_s - q_i`,
//! `t_{si} >= 0`, so the whole problem is a dense LP solved by the
//! deterministic two-phase simplex in [`simplex`].
//!
//! With a majorant spectrum from discretization the optimal value is an upper
//! bound of the underlying problem; refining the discretization never
//! increases it.

mod simplex;

use crate::distributions::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::risk::spectral_risk;
use crate::spectra::StepSpectrum;
use simplex::StandardLp;

/// Scenario loss matrix, scenario probabilities, spectrum and feasible set
/// (simplex with optional per-asset bounds).
#[derive(Debug, Clone)]
pub struct ScenarioProblem {
    /// Row-major `S x d` losses; row `s` holds the per-unit loss of each asset.
    losses: Vec<f64>,
    n_scenarios: usize,
    n_assets: usize,
    probs: Vec<f64>,
    spectrum: StepSpectrum,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Optimizer output: weights, ansatz knots, optimal value and diagnostics.
#[derive(Debug, Clone)]
pub struct PortfolioSolution {
    /// Optimal weights on the feasible simplex.
    pub weights: Vec<f64>,
    /// Ansatz knots at the optimum: the loss-distribution quantiles at the
    /// spectrum's atom levels, nondecreasing by construction.
    pub knots: Vec<f64>,
    /// Optimal objective value (an upper bound of the underlying problem
    /// when the spectrum is a majorant).
    pub value: f64,
    /// Simplex pivots performed.
    pub iterations: usize,
    /// `|value - portfolio_risk(weights)|`, the solver/evaluator residual.
    pub gap: f64,
}

/// Solver switches; the default disables the (inactive) knot-ordering rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Add explicit `q_1 <= q_2 <= ... <= q_n` rows. Optimal knots are
    /// quantiles at increasing levels, so the constraint is inactive at the
    /// optimum; a regression test asserts both settings agree.
    pub enforce_knot_order: bool,
}

impl ScenarioProblem {
    /// Builds a problem from scenario rows (each of length `d`), optional
    /// positive scenario weights (renormalized; missing means equal), and a
    /// spectrum. The feasible set defaults to the full simplex.
    pub fn new(
        losses: &[Vec<f64>],
        probs: Option<&[f64]>,
        spectrum: StepSpectrum,
    ) -> Result<Self> {
        if losses.is_empty() || losses[0].is_empty() {
            return Err(Error::EmptyInput);
        }
        let n_assets = losses[0].len();
        let mut flat = Vec::with_capacity(losses.len() * n_assets);
        for row in losses {
            if row.len() != n_assets {
                return Err(Error::LengthMismatch {
                    left: n_assets,
                    right: row.len(),
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::NonFinite(v));
                }
                flat.push(v);
            }
        }
        let probs = match probs {
            Some(p) => {
                if p.len() != losses.len() {
                    return Err(Error::LengthMismatch {
                        left: losses.len(),
                        right: p.len(),
                    });
                }
                let total: f64 = p.iter().sum();
                if p.iter().any(|&w| !w.is_finite() || w <= 0.0) {
                    return Err(Error::NegativeProbability(
                        p.iter().copied().find(|&w| w <= 0.0 || w.is_nan()).unwrap_or(f64::NAN),
                    ));
                }
                p.iter().map(|&w| w / total).collect()
            }
            None => vec![1.0 / losses.len() as f64; losses.len()],
        };
        Ok(Self {
            losses: flat,
            n_scenarios: losses.len(),
            n_assets,
            probs,
            spectrum,
            lower: vec![0.0; n_assets],
            upper: vec![1.0; n_assets],
        })
    }

    /// Restricts the simplex with per-asset bounds. Requires
    /// `0 <= lower <= upper` elementwise and `sum lower <= 1 <= sum upper`.
    pub fn with_bounds(mut self, lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != self.n_assets || upper.len() != self.n_assets {
            return Err(Error::LengthMismatch {
                left: self.n_assets,
                right: lower.len().max(upper.len()),
            });
        }
        for j in 0..self.n_assets {
            if !(lower[j].is_finite() && upper[j].is_finite()) || lower[j] < 0.0 {
                return Err(Error::InconsistentBounds(format!(
                    "asset {j}: bounds must be finite and nonnegative"
                )));
            }
            if lower[j] > upper[j] {
                return Err(Error::InconsistentBounds(format!(
                    "asset {j}: lower {} exceeds upper {}",
                    lower[j], upper[j]
                )));
            }
        }
        let suml: f64 = lower.iter().sum();
        let sumu: f64 = upper.iter().sum();
        if suml > 1.0 + 1e-12 || sumu < 1.0 - 1e-12 {
            return Err(Error::InconsistentBounds(format!(
                "sum of lower bounds {suml} and upper bounds {sumu} cannot bracket 1"
            )));
        }
        self.lower = lower.to_vec();
        self.upper = upper.to_vec();
        Ok(self)
    }

    pub fn n_scenarios(&self) -> usize {
        self.n_scenarios
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn spectrum(&self) -> &StepSpectrum {
        &self.spectrum
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn scenario_row(&self, s: usize) -> &[f64] {
        &self.losses[s * self.n_assets..(s + 1) * self.n_assets]
    }

    /// Loss of weights `x` under scenario `s`.
    pub fn scenario_loss(&self, s: usize, x: &[f64]) -> f64 {
        self.scenario_row(s)
            .iter()
            .zip(x)
            .map(|(y, w)| y * w)
            .sum()
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.n_assets
            && (x.iter().sum::<f64>() - 1.0).abs() <= tol
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((&xi, &lo), &hi)| xi >= lo - tol && xi <= hi + tol)
    }

    /// Distribution of the portfolio loss `x^T Y` over the scenarios.
    pub fn loss_distribution(&self, x: &[f64]) -> Result<EmpiricalDistribution> {
        if !self.is_feasible(x, 1e-8) {
            return Err(Error::InfeasibleWeights(format!("{x:?}")));
        }
        let values: Vec<f64> = (0..self.n_scenarios)
            .map(|s| self.scenario_loss(s, x))
            .collect();
        EmpiricalDistribution::from_samples(&values, Some(&self.probs))
    }

    /// Spectral risk of the portfolio loss at weights `x`.
    pub fn portfolio_risk(&self, x: &[f64]) -> Result<f64> {
        Ok(spectral_risk(&self.loss_distribution(x)?, &self.spectrum))
    }
}

/// Minimizes the spectral risk of the portfolio loss over the feasible set
/// via the hinge-ansatz linear program.
pub fn minimize_spectral(problem: &ScenarioProblem) -> Result<PortfolioSolution> {
    minimize_spectral_with(problem, SolveOptions::default())
}

/// [`minimize_spectral`] with explicit solver options.
pub fn minimize_spectral_with(
    problem: &ScenarioProblem,
    options: SolveOptions,
) -> Result<PortfolioSolution> {
    let measure = problem.spectrum.to_kusuoka();
    let mut base_slope = 0.0;
    let mut knot_atoms: Vec<(f64, f64)> = Vec::new();
    for &(loc, mass) in measure.atoms() {
        if loc == 0.0 {
            base_slope = mass; // the paper's explicit linear term mu0 * y
        } else {
            knot_atoms.push((loc, mass));
        }
    }
    solve_ansatz(problem, base_slope, &knot_atoms, options)
}

/// Single-knot specialization: minimizes
/// `q + (1/(1-alpha)) E (x^T Y - q)_+` jointly over `(x, q)`. The problem's
/// spectrum must be the AVaR spectrum at `alpha`.
pub fn minimize_avar(problem: &ScenarioProblem, alpha: f64) -> Result<PortfolioSolution> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidAvarLevel(alpha));
    }
    let expected = StepSpectrum::avar(alpha)?;
    let matches = problem.spectrum.breaks().len() == expected.breaks().len()
        && problem
            .spectrum
            .breaks()
            .iter()
            .zip(expected.breaks())
            .all(|(a, b)| (a - b).abs() <= 1e-12)
        && problem
            .spectrum
            .levels()
            .iter()
            .zip(expected.levels())
            .all(|(a, b)| (a - b).abs() <= 1e-12);
    if !matches {
        return Err(Error::SpectrumMismatch(alpha));
    }
    solve_ansatz(problem, 0.0, &[(alpha, 1.0)], SolveOptions::default())
}

/// Exhaustive grid minimization of [`ScenarioProblem::portfolio_risk`] over
/// the feasible simplex, for validation. Deterministic: ties keep the
/// lexicographically first grid point. Supports at most three assets.
pub fn grid_search_oracle(problem: &ScenarioProblem, step: f64) -> Result<(Vec<f64>, f64)> {
    if problem.n_assets > 3 {
        return Err(Error::TooManyAssets(problem.n_assets));
    }
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidLevel(step));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    let consider = |x: &[f64], problem: &ScenarioProblem, best: &mut Option<(Vec<f64>, f64)>| {
        if problem.is_feasible(x, 1e-12) {
            let value = spectral_risk(
                &{
                    let values: Vec<f64> = (0..problem.n_scenarios)
                        .map(|s| problem.scenario_loss(s, x))
                        .collect();
                    EmpiricalDistribution::from_samples(&values, Some(&problem.probs)).unwrap()
                },
                &problem.spectrum,
            );
            if best.as_ref().is_none_or(|(_, b)| value < *b) {
                *best = Some((x.to_vec(), value));
            }
        }
    };

    let ticks = (1.0 / step).round() as usize;
    match problem.n_assets {
        1 => consider(&[1.0], problem, &mut best),
        2 => {
            for k in 0..=ticks {
                let x1 = (k as f64 * step).min(1.0);
                consider(&[x1, 1.0 - x1], problem, &mut best);
            }
            // exact bound endpoints, in case they fall between grid points
            for &x1 in &[problem.lower[0], 1.0 - problem.lower[1], problem.upper[0]] {
                if (0.0..=1.0).contains(&x1) {
                    consider(&[x1, 1.0 - x1], problem, &mut best);
                }
            }
        }
        _ => {
            for k1 in 0..=ticks {
                let x1 = (k1 as f64 * step).min(1.0);
                for k2 in 0..=(ticks - k1) {
                    let x2 = (k2 as f64 * step).min(1.0 - x1);
                    let x3 = (1.0 - x1 - x2).max(0.0);
                    consider(&[x1, x2, x3], problem, &mut best);
                }
            }
        }
    }
    best.ok_or(Error::Infeasible)
}

/// Assembles and solves the epigraph LP for the ansatz with the given linear
/// coefficient and interior knot atoms `(alpha_i, mu_i)`.
fn solve_ansatz(
    problem: &ScenarioProblem,
    base_slope: f64,
    knot_atoms: &[(f64, f64)],
    options: SolveOptions,
) -> Result<PortfolioSolution> {
    let d = problem.n_assets;
    let s_count = problem.n_scenarios;
    let n = knot_atoms.len();
    let span = 1.0 - problem.lower.iter().sum::<f64>();

    // column layout: x' | q+ | q- | t | surplus | upper-bound slacks | order slacks
    let col_x = 0;
    let col_qp = col_x + d;
    let col_qm = col_qp + n;
    let col_t = col_qm + n;
    let col_sur = col_t + s_count * n;
    let col_ub = col_sur + s_count * n;
    let ub_assets: Vec<usize> = (0..d)
        .filter(|&j| problem.upper[j] - problem.lower[j] < span - 1e-15)
        .collect();
    let col_ord = col_ub + ub_assets.len();
    let n_cols = col_ord + if options.enforce_knot_order && n > 1 { n - 1 } else { 0 };

    let mut objective = vec![0.0; n_cols];
    // expected loss per unit of asset j
    let expected: Vec<f64> = (0..d)
        .map(|j| {
            (0..s_count)
                .map(|s| problem.probs[s] * problem.scenario_row(s)[j])
                .sum()
        })
        .collect();
    let mut constant = 0.0;
    for j in 0..d {
        objective[col_x + j] = base_slope * expected[j];
        constant += base_slope * problem.lower[j] * expected[j];
    }
    for (i, &(alpha, mass)) in knot_atoms.iter().enumerate() {
        objective[col_qp + i] = mass;
        objective[col_qm + i] = -mass;
        for s in 0..s_count {
            objective[col_t + s * n + i] = mass / (1.0 - alpha) * problem.probs[s];
        }
    }

    let mut rows = Vec::new();
    let mut rhs = Vec::new();

    // budget: sum x' = 1 - sum lower
    let mut budget = vec![0.0; n_cols];
    for j in 0..d {
        budget[col_x + j] = 1.0;
    }
    rows.push(budget);
    rhs.push(span);

    // hinge epigraph: t_si - x'*Y_s + q_i - surplus = lower*Y_s
    for s in 0..s_count {
        let base: f64 = problem
            .scenario_row(s)
            .iter()
            .zip(&problem.lower)
            .map(|(y, l)| y * l)
            .sum();
        for i in 0..n {
            let mut row = vec![0.0; n_cols];
            row[col_t + s * n + i] = 1.0;
            for j in 0..d {
                row[col_x + j] = -problem.scenario_row(s)[j];
            }
            row[col_qp + i] = 1.0;
            row[col_qm + i] = -1.0;
            row[col_sur + s * n + i] = -1.0;
            rows.push(row);
            rhs.push(base);
        }
    }

    // binding upper bounds
    for (k, &j) in ub_assets.iter().enumerate() {
        let mut row = vec![0.0; n_cols];
        row[col_x + j] = 1.0;
        row[col_ub + k] = 1.0;
        rows.push(row);
        rhs.push(problem.upper[j] - problem.lower[j]);
    }

    // optional knot ordering q_i <= q_{i+1}
    if options.enforce_knot_order && n > 1 {
        for i in 0..n - 1 {
            let mut row = vec![0.0; n_cols];
            row[col_qp + i + 1] = 1.0;
            row[col_qm + i + 1] = -1.0;
            row[col_qp + i] = -1.0;
            row[col_qm + i] = 1.0;
            row[col_ord + i] = -1.0;
            rows.push(row);
            rhs.push(0.0);
        }
    }

    let lp = StandardLp {
        objective,
        rows,
        rhs,
    };
    let solution = simplex::solve(&lp)?;

    let weights: Vec<f64> = (0..d)
        .map(|j| solution.x[col_x + j] + problem.lower[j])
        .collect();
    let value = solution.objective + constant;
    let loss = problem.loss_distribution(&weights)?;
    // report the exact inner minimizers: quantiles at the atom levels
    let knots: Vec<f64> = knot_atoms
        .iter()
        .map(|&(alpha, _)| loss.quantile(alpha).expect("atom levels lie in [0,1)"))
        .collect();
    let evaluated = spectral_risk(&loss, &problem.spectrum);
    Ok(PortfolioSolution {
        weights,
        knots,
        value,
        iterations: solution.pivots,
        gap: (value - evaluated).abs(),
    })
}
