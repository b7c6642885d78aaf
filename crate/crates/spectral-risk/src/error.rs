use thiserror::Error;

/// Errors reported by constructors and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input must contain at least one value")]
    EmptyInput,
    #[error("non-finite value encountered: {0}")]
    NonFinite(f64),
    #[error("negative probability: {0}")]
    NegativeProbability(f64),
    #[error("probabilities must have a positive sum")]
    ZeroMass,
    #[error("lengths do not match: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("probability level {0} outside [0, 1]")]
    InvalidLevel(f64),
    #[error("AVaR level {0} must lie in [0, 1)")]
    InvalidAvarLevel(f64),
    #[error("spectrum breaks must run from 0 to 1 and be strictly increasing")]
    InvalidBreaks,
    #[error("spectrum levels must be nonnegative and nondecreasing")]
    InvalidLevels,
    #[error("spectrum integrates to {0}, not 1 (pass normalize to rescale)")]
    NotNormalized(f64),
    #[error("Kusuoka atom at location {0} outside [0, 1)")]
    InvalidAtomLocation(f64),
    #[error("atom mass {0} must be positive")]
    InvalidAtomMass(f64),
    #[error("distribution has negative support; the cdf representation needs Y >= 0")]
    NegativeSupport,
    #[error("indices do not form a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("scenario probabilities must be equal for a comonotone rearrangement")]
    UnequalProbs,
    #[error("scenario probabilities differ from the reference distribution")]
    ScenarioMismatch,
    #[error("spectrum level {0} lies outside the conjugate domain [{1}, {2}]")]
    OutsideConjugateDomain(f64, f64, f64),
    #[error("hinge weight {0} must be positive")]
    InvalidWeight(f64),
    #[error("base slope {0} must be nonnegative")]
    InvalidBaseSlope(f64),
    #[error("affine transform needs gamma > 0 and lambda != 0")]
    InvalidTransform,
    #[error("weights are infeasible: {0}")]
    InfeasibleWeights(String),
    #[error("bounds are inconsistent: {0}")]
    InconsistentBounds(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("pivot limit exceeded in the simplex solver")]
    PivotLimit,
    #[error("spectrum does not match AVaR at level {0}")]
    SpectrumMismatch(f64),
    #[error("grid search supports at most 3 assets, got {0}")]
    TooManyAssets(usize),
    #[error("discretization requires a finite density on [0, 1], got {0} at u = {1}")]
    NonFiniteDensity(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
