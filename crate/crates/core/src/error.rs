use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Variants fall in two families: violated preconditions on the physics
/// (superluminal legs, hyperplane violations, unidentifiable fits) and
/// malformed inputs (grids, dimensions, budgets).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("trajectory needs at least 2 grid nodes, got {0}")]
    DegenerateGrid(usize),

    #[error("time grid is not strictly increasing at node {0}")]
    NonIncreasingTimes(usize),

    #[error("{times} time nodes but {positions} positions")]
    LengthMismatch { times: usize, positions: usize },

    #[error("segment {segment} has speed {speed} >= 1 (superluminal)")]
    SuperluminalSegment { segment: usize, speed: f64 },

    #[error("interval end {end} does not exceed start {start}")]
    BadInterval { start: f64, end: f64 },

    #[error("invariant requested in {requested} mode but particle is configured for {configured}")]
    ModeMismatch {
        requested: &'static str,
        configured: &'static str,
    },

    #[error("mass must be positive and finite, got {0}")]
    NonPositiveMass(f64),

    #[error("coupling must be finite, got {0}")]
    NonFiniteKappa(f64),

    #[error("invariant vector is empty")]
    EmptyVector,

    #[error("need at least {needed} paths, got {got}")]
    TooFewPaths { needed: usize, got: usize },

    #[error("coupling mismatch: {0} vs {1}")]
    KappaMismatch(f64, f64),

    #[error("expected {expected} paths, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),

    #[error("shift epsilon must be nonzero")]
    ZeroEpsilon,

    #[error("branch classification needs {needed} samples including x = 0, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("no kernel branch fits the samples (best rms {rms:e})")]
    AmbiguousData { rms: f64 },

    #[error("expected {expected} arguments, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("atom {atom} has frequency sum {sum:e}, off the zero-sum hyperplane")]
    HyperplaneViolation { atom: usize, sum: f64 },

    #[error("symmetrization over {n}! permutations is not supported (max n = {max})")]
    TooLarge { n: usize, max: usize },

    #[error("lattice has {paths} paths, over the enumeration budget of {budget}")]
    BudgetExceeded { paths: f64, budget: usize },

    #[error("slit {slit} to screen point {point} (x = {x}) leaves the light cone")]
    SuperluminalLeg { slit: usize, point: usize, x: f64 },

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("trajectories do not share a junction node")]
    JunctionMismatch,

    #[error("pattern variance {0:e} is too small to carry fringes")]
    NoFringes(f64),

    #[error("best fit rms {rms} exceeds 10% of the pattern maximum")]
    PoorFit { kappa: f64, rms: f64 },

    #[error("fit needs at least {needed} screen points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("malformed pattern data: {0}")]
    PatternFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
