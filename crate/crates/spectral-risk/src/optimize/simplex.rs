//! Self-contained dense two-phase simplex for the epigraph programs built in
//! [`crate::optimize`].
//!
//! Standard equality form: minimize `c^T x` subject to `A x = b`, `x >= 0`.
//! Rows with a singleton positive column (the epigraph and slack variables)
//! enter the initial basis directly; the remaining rows get artificial
//! variables that phase 1 drives to zero. Pricing is Dantzig's rule with
//! lowest-index tie-breaks; after a run of degenerate pivots the rule drops
//! to Bland's (lowest negative index), which cannot cycle, and returns to
//! Dantzig once the objective moves. Runs are deterministic.

use crate::error::{Error, Result};

const COST_EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-7;
const MAX_PIVOTS: usize = 500_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 64;

/// Equality-form linear program; rhs entries may have any sign (rows are
/// normalized internally).
#[derive(Debug, Clone)]
pub(crate) struct StandardLp {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    /// Reduced costs for the current phase.
    cost: Vec<f64>,
    /// Negated objective value of the current phase.
    cost_rhs: f64,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let scale = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= scale;
        }
        self.rhs[row] /= scale;
        self.rows[row][col] = 1.0;

        let (pivot_row, pivot_rhs) = (self.rows[row].clone(), self.rhs[row]);
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col];
            if factor != 0.0 {
                for (v, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                self.rows[r][col] = 0.0;
                self.rhs[r] -= factor * pivot_rhs;
            }
        }
        let factor = self.cost[col];
        if factor != 0.0 {
            for (v, p) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= factor * p;
            }
            self.cost[col] = 0.0;
            self.cost_rhs -= factor * pivot_rhs;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn entering_dantzig(&self, usable: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &c) in self.cost[..usable].iter().enumerate() {
            if c < -COST_EPS && best.is_none_or(|(_, bc)| c < bc) {
                best = Some((j, c));
            }
        }
        best.map(|(j, _)| j)
    }

    fn entering_bland(&self, usable: usize) -> Option<usize> {
        self.cost[..usable].iter().position(|&c| c < -COST_EPS)
    }

    /// Minimum-ratio row; ties go to the basic variable of lowest index.
    fn leaving(&self, entering: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][entering];
            if a > PIVOT_EPS {
                let ratio = self.rhs[r] / a;
                let better = match best {
                    None => true,
                    Some((best_r, best_ratio)) => {
                        ratio < best_ratio - PIVOT_EPS
                            || (ratio <= best_ratio + PIVOT_EPS
                                && self.basis[r] < self.basis[best_r])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
        }
        best.map(|(r, _)| r)
    }

    fn run(&mut self, usable: usize) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::PivotLimit);
            }
            let entering = if degenerate >= DEGENERATE_SWITCH {
                self.entering_bland(usable)
            } else {
                self.entering_dantzig(usable)
            };
            let Some(entering) = entering else {
                return Ok(());
            };
            let Some(row) = self.leaving(entering) else {
                return Err(Error::Unbounded);
            };
            let before = self.cost_rhs;
            self.pivot(row, entering);
            if (self.cost_rhs - before).abs() <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        }
    }
}

/// Solves the program, returning a basic optimal solution.
pub(crate) fn solve(lp: &StandardLp) -> Result<LpSolution> {
    let m = lp.rows.len();
    let n = lp.objective.len();
    debug_assert!(lp.rows.iter().all(|r| r.len() == n));

    // Normalize rhs >= 0.
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        rows.push(row.iter().map(|&v| flip * v).collect::<Vec<f64>>());
        rhs.push(flip * lp.rhs[i]);
    }

    // Crash basis: a column whose only nonzero is a positive entry in an
    // unclaimed row becomes basic there after rescaling the row to 1.
    let mut nonzeros = vec![0usize; n];
    let mut where_nonzero = vec![usize::MAX; n];
    for (r, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                nonzeros[j] += 1;
                where_nonzero[j] = r;
            }
        }
    }
    let mut basis = vec![usize::MAX; m];
    for j in 0..n {
        if nonzeros[j] == 1 {
            let r = where_nonzero[j];
            if basis[r] == usize::MAX && rows[r][j] > PIVOT_EPS {
                let scale = rows[r][j];
                if scale != 1.0 {
                    for v in &mut rows[r] {
                        *v /= scale;
                    }
                    rhs[r] /= scale;
                }
                rows[r][j] = 1.0;
                basis[r] = j;
            }
        }
    }

    // Append artificial columns for the rows the crash basis missed.
    let artificial_rows: Vec<usize> = (0..m).filter(|&r| basis[r] == usize::MAX).collect();
    let width = n + artificial_rows.len();
    for (k, &r) in artificial_rows.iter().enumerate() {
        basis[r] = n + k;
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row.resize(width, 0.0);
        if basis[r] >= n {
            row[basis[r]] = 1.0;
        }
    }

    // Phase 1: minimize the sum of artificials.
    let mut t = Tableau {
        rows,
        rhs,
        cost: vec![0.0; width],
        cost_rhs: 0.0,
        basis,
        pivots: 0,
    };
    if !artificial_rows.is_empty() {
        for j in n..width {
            t.cost[j] = 1.0;
        }
        for &r in &artificial_rows {
            for j in 0..width {
                t.cost[j] -= t.rows[r][j];
            }
            t.cost_rhs -= t.rhs[r];
        }
        t.run(n)?;
        if -t.cost_rhs > FEAS_EPS {
            return Err(Error::Infeasible);
        }
        // Pivot leftover artificials out; rows that cannot pivot are
        // redundant and get dropped below.
        for r in 0..m {
            if t.basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| t.rows[r][j].abs() > PIVOT_EPS) {
                    t.pivot(r, col);
                }
            }
        }
        let keep: Vec<usize> = (0..m).filter(|&r| t.basis[r] < n).collect();
        if keep.len() < m {
            t.rows = keep.iter().map(|&r| std::mem::take(&mut t.rows[r])).collect();
            t.rhs = keep.iter().map(|&r| t.rhs[r]).collect();
            t.basis = keep.iter().map(|&r| t.basis[r]).collect();
        }
        for row in &mut t.rows {
            row.truncate(n);
        }
    }

    // Phase 2: reduced costs of the real objective against the basis.
    t.cost = lp.objective.clone();
    t.cost_rhs = 0.0;
    for r in 0..t.rows.len() {
        let cb = lp.objective[t.basis[r]];
        if cb != 0.0 {
            for (v, a) in t.cost.iter_mut().zip(&t.rows[r]) {
                *v -= cb * a;
            }
            t.cost_rhs -= cb * t.rhs[r];
        }
    }
    for r in 0..t.rows.len() {
        t.cost[t.basis[r]] = 0.0;
    }
    t.run(n)?;

    let mut x = vec![0.0; n];
    for r in 0..t.rows.len() {
        x[t.basis[r]] = t.rhs[r];
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    Ok(LpSolution {
        x,
        objective,
        pivots: t.pivots,
    })
}
