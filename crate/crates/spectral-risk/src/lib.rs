//! Spectral risk measures on finite discrete distributions.
//!
//! A spectral risk measure weights the quantiles of a loss distribution by a
//! nondecreasing density (the spectrum) on the unit interval. This crate
//! evaluates such measures exactly, as finite sums, through all of their
//! classical representations (quantile integral, cdf integral, AVaR mixture,
//! dual supremum, infimum over convex functions), and solves scenario-based
//! portfolio optimization with a spectral-risk objective by a piecewise-linear
//! reformulation that reduces to a finite linear program.
//!
//! The crate is organized around five modules:
//!
//! * [`distributions`]: finite discrete laws with exact quantile/cdf calculus;
//! * [`spectra`]: step spectra, AVaR spectra, and mixture (Kusuoka) measures;
//! * [`risk`]: the risk functional in its several representations plus dual
//!   feasibility checking;
//! * [`conjugate`]: piecewise-linear convex functions and their exact
//!   Legendre-Fenchel conjugates;
//! * [`optimize`]: scenario-based portfolio optimization via a dense simplex
//!   solver, with a grid-search oracle for validation.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod conjugate;
pub mod distributions;
pub mod error;
pub mod optimize;
pub mod risk;
pub mod spectra;

pub use conjugate::{ConjugateTable, HingeTerm, PiecewiseLinearConvex};
pub use distributions::EmpiricalDistribution;
pub use error::{Error, Result};
pub use optimize::{PortfolioSolution, ScenarioProblem, SolveOptions};
pub use risk::{DualVariate, FeasibilityCheck, FeasibilityViolation};
pub use spectra::{KusuokaMeasure, StepSpectrum};
