//! The multi-path probability family `P^n` in its equivalent forms.
//!
//! * Amplitude form: `|sum_i exp(i kappa phi_i)|^2`, evaluated as
//!   `(sum cos)^2 + (sum sin)^2`. This is the numerical reference.
//! * Pairwise form: `sum_{i<j} D(phi_i - phi_j) - n(n - 2)` with the even pair
//!   kernel `D(x) = 2 cos(kappa x) + 2`.
//! * Event form: an [`EventSystem`] with unit singles and signed pairwise
//!   overlaps `2 - D(phi_i - phi_j)`, evaluated by inclusion-exclusion with all
//!   triple overlaps set to zero.
//!
//! The three agree identically; the test suite checks that they do.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::InvariantVector;

/// Solution branch of the pair-kernel functional equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelBranch {
    /// `D(x) = 2 cos(rate x) + 2`, bounded in `[0, 4]`.
    Cosine,
    /// `D(x) = 2 cosh(rate x) + 2`, unbounded.
    Hyperbolic,
    /// `D(x) = 4`, the zero-rate limit of the cosine branch.
    Constant,
}

/// The even one-variable kernel `D` with `P^2(a, b) = D(a - b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairKernel {
    pub branch: KernelBranch,
    /// `kappa` on the cosine branch, `lambda` on the hyperbolic one. Ignored by
    /// the constant branch.
    #[serde(default)]
    pub rate: f64,
}

impl PairKernel {
    pub fn cosine(kappa: f64) -> Self {
        Self {
            branch: KernelBranch::Cosine,
            rate: kappa,
        }
    }

    pub fn hyperbolic(lambda: f64) -> Self {
        Self {
            branch: KernelBranch::Hyperbolic,
            rate: lambda,
        }
    }

    pub fn constant() -> Self {
        Self {
            branch: KernelBranch::Constant,
            rate: 0.0,
        }
    }

    /// `D(x) = 2 G(x) + 2` with `G` the d'Alembert solution of the branch.
    pub fn eval(&self, x: f64) -> f64 {
        match self.branch {
            KernelBranch::Cosine => 2.0 * (self.rate * x).cos() + 2.0,
            KernelBranch::Hyperbolic => 2.0 * (self.rate * x).cosh() + 2.0,
            KernelBranch::Constant => 4.0,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.branch != KernelBranch::Hyperbolic || self.rate == 0.0
    }
}

/// Free-function form of [`PairKernel::eval`].
pub fn kernel_eval(kernel: &PairKernel, x: f64) -> f64 {
    kernel.eval(x)
}

/// Real and imaginary parts of `sum_i exp(i kappa phi_i)`, accumulated left to
/// right.
pub fn amplitude_sum(phis: &[f64], kappa: f64) -> (f64, f64) {
    phis.iter().fold((0.0, 0.0), |(re, im), &phi| {
        let (s, c) = (kappa * phi).sin_cos();
        (re + c, im + s)
    })
}

/// `|sum_i exp(i kappa phi_i)|^2` on a raw slice; returns 0 for an empty slice
/// and exactly 1 for a single path.
pub fn intensity(phis: &[f64], kappa: f64) -> f64 {
    if phis.len() == 1 {
        return 1.0;
    }
    let (re, im) = amplitude_sum(phis, kappa);
    re * re + im * im
}

/// Amplitude form of `P^n`. Result lies in `[0, n^2]`.
pub fn pn_amplitude(v: &InvariantVector) -> Result<f64> {
    if v.phis.is_empty() {
        return Err(Error::EmptyVector);
    }
    Ok(intensity(&v.phis, v.kappa))
}

/// `sum_{i<j} D(phi_i - phi_j) - n(n - 2)` for an arbitrary kernel.
pub fn pairwise_with_kernel(phis: &[f64], kernel: &PairKernel) -> Result<f64> {
    let n = phis.len();
    if n < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: n });
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += kernel.eval(phis[i] - phis[j]);
        }
    }
    let n = n as f64;
    Ok(sum - n * (n - 2.0))
}

/// Pairwise form of `P^n` with the cosine kernel at rate `v.kappa`.
pub fn pn_pairwise(v: &InvariantVector) -> Result<f64> {
    pairwise_with_kernel(&v.phis, &PairKernel::cosine(v.kappa))
}

/// Common shift that moves the invariants to zero mean, and the centered list.
pub fn centered(phis: &[f64]) -> (f64, Vec<f64>) {
    let mean = phis.iter().sum::<f64>() / phis.len() as f64;
    (mean, phis.iter().map(|p| p - mean).collect())
}

/// Exponential solution `P^1(phi) = exp(g phi)` of the one-argument
/// composition law `P^1(a + b) = P^1(a) P^1(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneArgSolution {
    /// The derivative of `P^1` at the origin.
    pub growth_rate: f64,
}

impl OneArgSolution {
    /// The unique solution compatible with time reversal: `P^1 = 1`.
    pub const TIME_SYMMETRIC: Self = Self { growth_rate: 0.0 };

    pub fn eval(&self, phi: f64) -> f64 {
        (self.growth_rate * phi).exp()
    }

    /// `|P^1(a + b) - P^1(a) P^1(b)|`.
    pub fn composition_residual(&self, a: f64, b: f64) -> f64 {
        (self.eval(a + b) - self.eval(a) * self.eval(b)).abs()
    }

    /// `|P^1(phi) - P^1(-phi)|`; zero for every `phi` only when the growth
    /// rate vanishes.
    pub fn time_reversal_residual(&self, phi: f64) -> f64 {
        (self.eval(phi) - self.eval(-phi)).abs()
    }

    pub fn is_time_symmetric(&self) -> bool {
        self.growth_rate == 0.0
    }
}

/// `n` atomic events with single probabilities and pairwise overlaps. All
/// triple and higher intersections are zero. Values are unconstrained reals:
/// interference overlaps may be negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSystem {
    singles: Vec<f64>,
    /// Row-major upper triangle: (0,1), (0,2), ..., (1,2), ...
    pairs: Vec<f64>,
}

impl EventSystem {
    pub fn new(singles: Vec<f64>, pairs: Vec<f64>) -> Result<Self> {
        let n = singles.len();
        let expected = n * n.saturating_sub(1) / 2;
        if pairs.len() != expected {
            return Err(Error::SizeMismatch {
                expected,
                got: pairs.len(),
            });
        }
        Ok(Self { singles, pairs })
    }

    pub fn n(&self) -> usize {
        self.singles.len()
    }

    pub fn singles(&self) -> &[f64] {
        &self.singles
    }

    pub fn pairs(&self) -> &[f64] {
        &self.pairs
    }

    /// Overlap `P(A_i and A_j)` for `i != j`.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let n = self.n();
        // offset of row i in the packed upper triangle
        let row = i * n - i * (i + 1) / 2;
        self.pairs[row + (j - i - 1)]
    }

    /// `P(A_i or A_j) = P(A_i) + P(A_j) - P(A_i and A_j)`.
    pub fn pair_union(&self, i: usize, j: usize) -> f64 {
        self.singles[i] + self.singles[j] - self.overlap(i, j)
    }
}

/// Union probability computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnionProbability {
    /// `sum_i P(A_i) - sum_{i<j} P(A_i and A_j)`.
    pub from_overlaps: f64,
    /// `sum_{i<j} P(A_i or A_j) - (n - 2) sum_i P(A_i)`.
    pub from_pair_unions: f64,
}

pub fn union_probability(ev: &EventSystem) -> UnionProbability {
    let n = ev.n();
    let singles: f64 = ev.singles.iter().sum();
    let overlaps: f64 = ev.pairs.iter().sum();
    let mut unions = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            unions += ev.pair_union(i, j);
        }
    }
    UnionProbability {
        from_overlaps: singles - overlaps,
        from_pair_unions: unions - (n as f64 - 2.0) * singles,
    }
}

/// Event system whose union probability is `P^n(v)`: unit singles and
/// overlaps `2 - D(phi_i - phi_j)`.
pub fn quantum_event_system(v: &InvariantVector) -> Result<EventSystem> {
    let n = v.len();
    if n < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: n });
    }
    let kernel = PairKernel::cosine(v.kappa);
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(2.0 - kernel.eval(v.phis[i] - v.phis[j]));
        }
    }
    EventSystem::new(vec![1.0; n], pairs)
}

/// A rule assigning a detection intensity to every list of path invariants.
///
/// Families defined for a single arity (spectral measures) report it through
/// [`ProbabilityFamily::arity`] and fail on other lengths.
pub trait ProbabilityFamily {
    fn probability(&self, phis: &[f64]) -> Result<f64>;

    /// `None` when every `n >= 1` is accepted.
    fn arity(&self) -> Option<usize> {
        None
    }

    fn is_bounded(&self) -> bool;
}

/// `|sum exp(i kappa phi)|^2` at a fixed coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeFamily {
    pub kappa: f64,
}

impl ProbabilityFamily for AmplitudeFamily {
    fn probability(&self, phis: &[f64]) -> Result<f64> {
        if phis.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(intensity(phis, self.kappa))
    }

    fn is_bounded(&self) -> bool {
        true
    }
}

/// Pairwise family built from any kernel branch: `P^1 = 1` and
/// `P^n = sum_{i<j} D(phi_i - phi_j) - n(n - 2)`.
///
/// On the hyperbolic branch this equals
/// `(sum exp(lambda phi)) (sum exp(-lambda phi))`, which composes, is time
/// symmetric, and is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelFamily {
    pub kernel: PairKernel,
}

impl ProbabilityFamily for KernelFamily {
    fn probability(&self, phis: &[f64]) -> Result<f64> {
        match phis.len() {
            0 => Err(Error::EmptyVector),
            1 => Ok(1.0),
            _ => pairwise_with_kernel(phis, &self.kernel),
        }
    }

    fn is_bounded(&self) -> bool {
        self.kernel.is_bounded()
    }
}
