//! Residual evaluators for the structural conditions on `P^n`.
//!
//! Each check compares two sides of an identity and returns a [`Residual`]
//! with both an absolute value and one relative to
//! `max(1, |lhs|, |rhs|)`, since `P^n` grows like `n^2`.
//!
//! The `*_in` variants take any [`ProbabilityFamily`]; the plain variants work
//! on an [`InvariantVector`] with the amplitude family at its coupling.

mod branch;
mod report;

pub use branch::{classify_branch, BranchFit, BranchTag, BOUND_TOLERANCE, FIT_TOLERANCE};
pub use report::{
    evaluate, run_bayes_composition, run_pairwise_additivity, run_permutation_symmetry,
    run_shift_invariance, run_sorkin, run_suite, run_time_symmetry, Axiom, AxiomReport,
    SorkinReport, SuiteReport, TrialConfig,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::probability::{AmplitudeFamily, PairKernel, ProbabilityFamily};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Residual {
    pub abs: f64,
    pub rel: f64,
}

impl Residual {
    pub fn between(lhs: f64, rhs: f64) -> Self {
        let abs = (lhs - rhs).abs();
        Self {
            abs,
            rel: abs / 1f64.max(lhs.abs()).max(rhs.abs()),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Componentwise maximum. NaN wins so that a broken evaluation is never
    /// hidden by a later finite value.
    pub fn max(self, other: Self) -> Self {
        let pick = |a: f64, b: f64| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) };
        Self {
            abs: pick(self.abs, other.abs),
            rel: pick(self.rel, other.rel),
        }
    }
}

fn amplitude(v: &InvariantVector) -> AmplitudeFamily {
    AmplitudeFamily { kappa: v.kappa }
}

/// `P^n` against `sum_{i<j} P^2(phi_i, phi_j) - (n - 2) sum_i P^1(phi_i)`.
pub fn pairwise_additivity_in<F: ProbabilityFamily + ?Sized>(fam: &F, phis: &[f64]) -> Result<Residual> {
    let n = phis.len();
    if n < 3 {
        return Err(Error::TooFewPaths { needed: 3, got: n });
    }
    let lhs = fam.probability(phis)?;
    let mut pairs = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pairs += fam.probability(&[phis[i], phis[j]])?;
        }
    }
    let mut singles = 0.0;
    for &phi in phis {
        singles += fam.probability(&[phi])?;
    }
    let rhs = pairs - (n as f64 - 2.0) * singles;
    Ok(Residual::between(lhs, rhs))
}

pub fn check_pairwise_additivity(v: &InvariantVector) -> Result<Residual> {
    pairwise_additivity_in(&amplitude(v), &v.phis)
}

/// Irreducible three-path content of a single-arity function.
///
/// For every triple `i < j < k` this takes the mixed third difference
/// `sum_{S in {i,j,k}} (-1)^(3 - |S|) P(phi + step * e_S)`, which vanishes
/// exactly when `P` is a sum of terms depending on at most two arguments.
/// Returns the maximum over triples; relative to the largest corner value.
/// Vacuously zero for fewer than three arguments.
pub fn pairwise_additivity_defect<F: ProbabilityFamily + ?Sized>(
    fam: &F,
    phis: &[f64],
    step: f64,
) -> Result<Residual> {
    let n = phis.len();
    if n < 3 {
        return Ok(Residual::zero());
    }
    let mut worst = Residual::zero();
    let mut point = phis.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut diff = 0.0;
                let mut scale = 1f64;
                for corner in 0u8..8 {
                    let picked = [corner & 1 != 0, corner & 2 != 0, corner & 4 != 0];
                    for (&idx, &on) in [i, j, k].iter().zip(&picked) {
                        point[idx] = phis[idx] + if on { step } else { 0.0 };
                    }
                    let value = fam.probability(&point)?;
                    let sign = if (3 - corner.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
                    diff += sign * value;
                    scale = scale.max(value.abs());
                }
                for idx in [i, j, k] {
                    point[idx] = phis[idx];
                }
                let abs = diff.abs();
                worst = worst.max(Residual {
                    abs,
                    rel: abs / scale,
                });
            }
        }
    }
    Ok(worst)
}

/// `P^n(phi)` against `P^n(-phi)`.
pub fn time_symmetry_in<F: ProbabilityFamily + ?Sized>(fam: &F, phis: &[f64]) -> Result<Residual> {
    let reversed: Vec<f64> = phis.iter().map(|p| -p).collect();
    Ok(Residual::between(fam.probability(phis)?, fam.probability(&reversed)?))
}

pub fn check_time_symmetry(v: &InvariantVector) -> Result<Residual> {
    time_symmetry_in(&amplitude(v), &v.phis)
}

/// Invariants of the composite paths `phi_i + psi_j`, row-major in `i`.
pub fn compose(first: &[f64], second: &[f64]) -> Vec<f64> {
    first
        .iter()
        .flat_map(|a| second.iter().map(move |b| a + b))
        .collect()
}

/// `P^{nm}(phi_i + psi_j)` against `P^n(phi) P^m(psi)`.
pub fn bayes_composition_in<F: ProbabilityFamily + ?Sized>(
    fam: &F,
    first: &[f64],
    second: &[f64],
) -> Result<Residual> {
    let lhs = fam.probability(&compose(first, second))?;
    let rhs = fam.probability(first)? * fam.probability(second)?;
    Ok(Residual::between(lhs, rhs))
}

pub fn check_bayes_composition(first: &InvariantVector, second: &InvariantVector) -> Result<Residual> {
    if first.kappa != second.kappa {
        return Err(Error::KappaMismatch(first.kappa, second.kappa));
    }
    bayes_composition_in(&amplitude(first), &first.phis, &second.phis)
}

/// Compares `P^n(phi)` with `P^n(shifted)`, where `shifted = phi + epsilon`.
///
/// `abs` is the finite-difference directional derivative
/// `|P(shifted) - P(phi)| / |epsilon|`; `rel` is the undivided difference
/// relative to `max(1, |P(phi)|, |P(shifted)|)`.
pub fn shift_pair_in<F: ProbabilityFamily + ?Sized>(
    fam: &F,
    phis: &[f64],
    shifted: &[f64],
    epsilon: f64,
) -> Result<Residual> {
    if epsilon == 0.0 {
        return Err(Error::ZeroEpsilon);
    }
    let base = fam.probability(phis)?;
    let moved = fam.probability(shifted)?;
    let r = Residual::between(moved, base);
    Ok(Residual {
        abs: r.abs / epsilon.abs(),
        rel: r.rel,
    })
}

pub fn shift_invariance_in<F: ProbabilityFamily + ?Sized>(
    fam: &F,
    phis: &[f64],
    epsilon: f64,
) -> Result<Residual> {
    let shifted: Vec<f64> = phis.iter().map(|p| p + epsilon).collect();
    shift_pair_in(fam, phis, &shifted, epsilon)
}

pub fn check_shift_invariance(v: &InvariantVector, epsilon: f64) -> Result<Residual> {
    shift_invariance_in(&amplitude(v), &v.phis, epsilon)
}

/// Applies `perm`: output slot `i` holds `phis[perm[i]]`.
pub fn permute(phis: &[f64], perm: &[usize]) -> Result<Vec<f64>> {
    let n = phis.len();
    if perm.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(n));
        }
    }
    Ok(perm.iter().map(|&p| phis[p]).collect())
}

pub fn permutation_symmetry_in<F: ProbabilityFamily + ?Sized>(
    fam: &F,
    phis: &[f64],
    perm: &[usize],
) -> Result<Residual> {
    let permuted = permute(phis, perm)?;
    Ok(Residual::between(fam.probability(phis)?, fam.probability(&permuted)?))
}

pub fn check_permutation_symmetry(v: &InvariantVector, perm: &[usize]) -> Result<Residual> {
    permutation_symmetry_in(&amplitude(v), &v.phis, perm)
}

/// Order-`k` interference term by inclusion-exclusion over all nonempty
/// subsets: `sum_T (-1)^(k - |T|) P^{|T|}(phi restricted to T)`.
pub fn sorkin_interference_in<F: ProbabilityFamily + ?Sized>(fam: &F, phis: &[f64]) -> Result<f64> {
    let k = phis.len();
    if k < 2 {
        return Err(Error::TooFewPaths { needed: 2, got: k });
    }
    let mut subset = Vec::with_capacity(k);
    let mut total = 0.0;
    for mask in 1u64..(1u64 << k) {
        subset.clear();
        subset.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| phis[i]));
        let sign = if (k - subset.len()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * fam.probability(&subset)?;
    }
    Ok(total)
}

pub fn sorkin_interference(order: usize, v: &InvariantVector) -> Result<f64> {
    if order < 2 {
        return Err(Error::TooFewPaths {
            needed: 2,
            got: order,
        });
    }
    if v.len() != order {
        return Err(Error::SizeMismatch {
            expected: order,
            got: v.len(),
        });
    }
    sorkin_interference_in(&amplitude(v), &v.phis)
}

/// The two sides of `D(x+y) + D(x-y) + 2D(x) + 2D(y) - 8 = D(x) D(y)`, with
/// `2D(x)` moved to the right, and the largest term magnitude.
fn functional_equation_sides(k: &PairKernel, x: f64, y: f64) -> (f64, f64, f64) {
    let (dx, dy) = (k.eval(x), k.eval(y));
    let (sum, diff) = (k.eval(x + y), k.eval(x - y));
    // grouped so that y = 0 (D(0) = 4) cancels exactly in floating point
    let lhs = (sum + diff) + 2.0 * (dy - 4.0);
    let rhs = dx * (dy - 2.0);
    let scale = [sum, diff, 2.0 * dx, 2.0 * dy, 8.0, dx * dy]
        .iter()
        .fold(1f64, |m, t| m.max(t.abs()));
    (lhs, rhs, scale)
}

/// Absolute residual of the pair-kernel functional equation at `(x, y)`.
pub fn functional_equation_residual(k: &PairKernel, x: f64, y: f64) -> f64 {
    let (lhs, rhs, _) = functional_equation_sides(k, x, y);
    (lhs - rhs).abs()
}

/// Same residual divided by the largest term magnitude (at least 1). Use this
/// for the unbounded branch, whose terms grow like `exp(2 rate |x|)`.
pub fn functional_equation_relative_residual(k: &PairKernel, x: f64, y: f64) -> f64 {
    let (lhs, rhs, scale) = functional_equation_sides(k, x, y);
    (lhs - rhs).abs() / scale
}
