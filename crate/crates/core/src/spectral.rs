//! Cosine-sum representation of time-symmetric, composable probability
//! functionals.
//!
//! Dropping pairwise additivity but keeping composition with `P^1 = 1` and time
//! symmetry leaves functionals of the form
//!
//! ```text
//! P^n(phi) = sum over atoms  w * cos(alpha . phi),   sum_i alpha_i = 0
//! ```
//!
//! The zero-sum constraint on every frequency vector is what makes a common
//! shift of all invariants drop out. The amplitude family is the special case
//! whose nonzero frequencies are all of the form `kappa (e_i - e_j)`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axioms::{
    pairwise_additivity_defect, shift_pair_in, time_symmetry_in, Axiom, AxiomReport, Residual,
};
use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::probability::ProbabilityFamily;

/// Largest argument count [`symmetrize`] accepts (`7! = 5040` images per atom).
pub const MAX_SYMMETRIZE_N: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub w: f64,
    pub alpha: Vec<f64>,
}

impl Atom {
    pub fn new(w: f64, alpha: Vec<f64>) -> Self {
        Self { w, alpha }
    }

    fn phase(&self, phis: &[f64]) -> f64 {
        self.alpha.iter().zip(phis).map(|(a, p)| a * p).sum()
    }
}

/// Finite list of weighted frequency vectors on the zero-sum hyperplane.
///
/// Deserialization does not validate; call [`SpectralMeasure::validate`] (or
/// evaluate, which validates) before trusting a measure read from disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub n: usize,
    pub atoms: Vec<Atom>,
}

impl SpectralMeasure {
    pub fn new(n: usize, atoms: Vec<Atom>) -> Result<Self> {
        let m = Self { n, atoms };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.alpha.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: atom.alpha.len(),
                });
            }
            let sum: f64 = atom.alpha.iter().sum();
            let size: f64 = atom.alpha.iter().map(|a| a.abs()).sum();
            if !(sum.abs() <= 1e-12 * size.max(1.0)) {
                return Err(Error::HyperplaneViolation { atom: i, sum });
            }
        }
        Ok(())
    }

    pub fn eval(&self, phis: &[f64]) -> Result<f64> {
        if phis.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: phis.len(),
            });
        }
        self.validate()?;
        Ok(self.eval_unchecked(phis))
    }

    fn eval_unchecked(&self, phis: &[f64]) -> f64 {
        self.atoms.iter().map(|a| a.w * a.phase(phis).cos()).sum()
    }
}

impl ProbabilityFamily for SpectralMeasure {
    fn probability(&self, phis: &[f64]) -> Result<f64> {
        self.eval(phis)
    }

    fn arity(&self) -> Option<usize> {
        Some(self.n)
    }

    fn is_bounded(&self) -> bool {
        self.atoms.iter().all(|a| a.w.is_finite())
    }
}

/// `sum_atoms w cos(alpha . phi)`.
pub fn eval_spectral(m: &SpectralMeasure, phis: &[f64]) -> Result<f64> {
    m.eval(phis)
}

/// Weight `n` at the origin plus weight 2 at `kappa (e_i - e_j)` for each
/// `i < j`; evaluates to `|sum exp(i kappa phi)|^2`.
pub fn quantum_spectrum(n: usize, kappa: f64) -> SpectralMeasure {
    let mut atoms = Vec::with_capacity(1 + n * n.saturating_sub(1) / 2);
    atoms.push(Atom::new(n as f64, vec![0.0; n]));
    for (i, j) in (0..n).tuple_combinations() {
        let mut alpha = vec![0.0; n];
        alpha[i] = kappa;
        alpha[j] = -kappa;
        atoms.push(Atom::new(2.0, alpha));
    }
    SpectralMeasure { n, atoms }
}

/// Averages the measure over all `n!` relabelings of its arguments. Each atom
/// is replaced by its full permutation orbit with weight `w / n!` per image;
/// repeated images are kept as separate atoms.
pub fn symmetrize(m: &SpectralMeasure) -> Result<SpectralMeasure> {
    if m.n > MAX_SYMMETRIZE_N {
        return Err(Error::TooLarge {
            n: m.n,
            max: MAX_SYMMETRIZE_N,
        });
    }
    m.validate()?;
    let perms: Vec<Vec<usize>> = (0..m.n).permutations(m.n).collect();
    let scale = perms.len() as f64;
    let mut atoms = Vec::with_capacity(perms.len() * m.atoms.len());
    for atom in &m.atoms {
        for perm in &perms {
            let alpha = perm.iter().map(|&p| atom.alpha[p]).collect();
            atoms.push(Atom::new(atom.w / scale, alpha));
        }
    }
    Ok(SpectralMeasure { n: m.n, atoms })
}

/// Measure on the `n * m` composite arguments `phi_i + psi_j` (row-major)
/// whose value there is the product of the two factors' values.
///
/// Uses `cos a cos b = (cos(a + b) + cos(a - b)) / 2` and realizes each
/// combined frequency as `gamma_ij = alpha_i [j = 0] + beta_j [i = 0]`, which
/// has row sums `alpha` and column sums `beta`.
pub fn product_measure(first: &SpectralMeasure, second: &SpectralMeasure) -> Result<SpectralMeasure> {
    first.validate()?;
    second.validate()?;
    let (n, m) = (first.n, second.n);
    let mut atoms = Vec::with_capacity(2 * first.atoms.len() * second.atoms.len());
    for a in &first.atoms {
        for b in &second.atoms {
            for sign in [1.0, -1.0] {
                let mut gamma = vec![0.0; n * m];
                for i in 0..n {
                    gamma[i * m] += a.alpha[i];
                }
                for (g, beta) in gamma.iter_mut().zip(&b.alpha) {
                    *g += sign * beta;
                }
                atoms.push(Atom::new(0.5 * a.w * b.w, gamma));
            }
        }
    }
    SpectralMeasure::new(n * m, atoms)
}

/// Settings for [`check_generalized_axioms`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneralizedConfig {
    pub seed: u64,
    pub trials: usize,
    pub phi_range: f64,
    /// Step of the mixed third difference used for pairwise additivity.
    pub defect_step: f64,
    pub tolerance: f64,
}

impl Default for GeneralizedConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            phi_range: 10.0,
            defect_step: 1.0,
            tolerance: 1e-10,
        }
    }
}

/// Reports for time symmetry, shift invariance and pairwise additivity of a
/// spectral measure, plus whether each holds at the configured tolerance.
///
/// Worst-case vectors carry `kappa = 1`; the frequencies live in the measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedReport {
    pub time_symmetry: AxiomReport,
    pub shift_invariance: AxiomReport,
    pub pairwise_additivity: AxiomReport,
    pub time_symmetric: bool,
    pub shift_invariant: bool,
    pub pairwise_additive: bool,
}

impl GeneralizedReport {
    pub fn all_hold(&self) -> bool {
        self.time_symmetric && self.shift_invariant && self.pairwise_additive
    }
}

struct Worst {
    residual: Residual,
    input: Vec<InvariantVector>,
}

impl Worst {
    fn new() -> Self {
        Self {
            residual: Residual::zero(),
            input: Vec::new(),
        }
    }

    fn offer(&mut self, r: Residual, input: &[&[f64]]) {
        if self.input.is_empty() || r.rel > self.residual.rel || r.rel.is_nan() {
            self.input = input
                .iter()
                .map(|p| InvariantVector {
                    phis: p.to_vec(),
                    kappa: 1.0,
                })
                .collect();
        }
        self.residual = self.residual.max(r);
    }

    fn report(self, axiom: Axiom, trials: usize, seed: u64) -> AxiomReport {
        AxiomReport {
            axiom,
            trials,
            max_abs_residual: self.residual.abs,
            max_rel_residual: self.residual.rel,
            seed,
            worst_case_input: self.input,
        }
    }
}

/// Runs time symmetry, shift invariance and the pairwise-additivity defect on
/// random arguments of the measure.
///
/// The first two hold for every valid measure. Pairwise additivity holds only
/// when no atom couples three or more arguments.
pub fn check_generalized_axioms(m: &SpectralMeasure, cfg: &GeneralizedConfig) -> Result<GeneralizedReport> {
    m.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut time = Worst::new();
    let mut shift = Worst::new();
    let mut pairwise = Worst::new();
    for _ in 0..cfg.trials {
        let phis: Vec<f64> = (0..m.n)
            .map(|_| rng.random_range(-cfg.phi_range..=cfg.phi_range))
            .collect();
        time.offer(time_symmetry_in(m, &phis)?, &[&phis]);

        let epsilon: f64 = rng.random_range(0.1..=1.0);
        let shifted: Vec<f64> = phis.iter().map(|p| p + epsilon).collect();
        shift.offer(shift_pair_in(m, &phis, &shifted, epsilon)?, &[&phis, &shifted]);

        pairwise.offer(pairwise_additivity_defect(m, &phis, cfg.defect_step)?, &[&phis]);
    }
    let time_symmetry = time.report(Axiom::TimeSymmetry, cfg.trials, cfg.seed);
    let shift_invariance = shift.report(Axiom::ShiftInvariance, cfg.trials, cfg.seed);
    let pairwise_additivity = pairwise.report(Axiom::PairwiseAdditivity, cfg.trials, cfg.seed);
    Ok(GeneralizedReport {
        time_symmetric: time_symmetry.passes(cfg.tolerance),
        shift_invariant: shift_invariance.passes(cfg.tolerance),
        pairwise_additive: pairwise_additivity.passes(cfg.tolerance),
        time_symmetry,
        shift_invariance,
        pairwise_additivity,
    })
}
