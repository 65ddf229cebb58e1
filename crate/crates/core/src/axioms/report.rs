//! Seeded randomized runs of the residual checks, aggregated into reports.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    bayes_composition_in, pairwise_additivity_in, shift_pair_in, time_symmetry_in, Residual,
};
use crate::error::{Error, Result};
use crate::invariants::InvariantVector;
use crate::probability::{AmplitudeFamily, KernelBranch, KernelFamily, PairKernel, ProbabilityFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    PairwiseAdditivity,
    TimeSymmetry,
    BayesComposition,
    PermutationSymmetry,
    ShiftInvariance,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::PairwiseAdditivity,
        Axiom::TimeSymmetry,
        Axiom::BayesComposition,
        Axiom::PermutationSymmetry,
        Axiom::ShiftInvariance,
    ];

    fn salt(self) -> u64 {
        match self {
            Axiom::PairwiseAdditivity => 1,
            Axiom::TimeSymmetry => 2,
            Axiom::BayesComposition => 3,
            Axiom::PermutationSymmetry => 4,
            Axiom::ShiftInvariance => 5,
        }
    }
}

/// Worst case over a batch of trials of one check.
///
/// `worst_case_input` holds the vectors that produced the maximum: one vector
/// for pairwise additivity and time symmetry, `[first, second]` for
/// composition, `[original, shifted]` for shift invariance and
/// `[original, permuted]` for permutation symmetry. Feeding it back through
/// [`evaluate`] reproduces `max_rel_residual`; `max_abs_residual` may come
/// from a different trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub trials: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub seed: u64,
    pub worst_case_input: Vec<InvariantVector>,
}

impl AxiomReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_residual <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SorkinReport {
    pub order: usize,
    pub interference_values: Vec<f64>,
    pub max_abs: f64,
    /// `max |I_k|` relative to the largest subset probability of its trial.
    pub max_rel: f64,
}

/// Parameters of a randomized run. Couplings are drawn from `kappas`; on the
/// hyperbolic branch the same numbers serve as the growth rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_paths: usize,
    pub phi_range: f64,
    pub kappas: Vec<f64>,
    pub kernel: KernelBranch,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 1000,
            max_paths: 64,
            phi_range: 10.0,
            kappas: vec![0.1, 1.0, 7.0],
            kernel: KernelBranch::Cosine,
        }
    }
}

impl TrialConfig {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
    }

    fn validate(&self) -> Result<()> {
        if self.kappas.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some(&k) = self.kappas.iter().find(|k| !k.is_finite()) {
            return Err(Error::NonFiniteKappa(k));
        }
        Ok(())
    }

    fn draw_kappa(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.kappas[rng.random_range(0..self.kappas.len())]
    }

    fn draw_phis(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| rng.random_range(-self.phi_range..=self.phi_range))
            .collect()
    }

    fn draw_vector(&self, rng: &mut ChaCha8Rng, min_paths: usize) -> InvariantVector {
        let n = rng.random_range(min_paths..=self.max_paths.max(min_paths));
        InvariantVector {
            phis: self.draw_phis(rng, n),
            kappa: self.draw_kappa(rng),
        }
    }
}

fn family(branch: KernelBranch, rate: f64) -> Box<dyn ProbabilityFamily> {
    match branch {
        KernelBranch::Cosine => Box::new(AmplitudeFamily { kappa: rate }),
        KernelBranch::Hyperbolic => Box::new(KernelFamily {
            kernel: PairKernel::hyperbolic(rate),
        }),
        KernelBranch::Constant => Box::new(KernelFamily {
            kernel: PairKernel::constant(),
        }),
    }
}

fn expect_inputs(inputs: &[InvariantVector], count: usize) -> Result<()> {
    if inputs.len() != count {
        return Err(Error::SizeMismatch {
            expected: count,
            got: inputs.len(),
        });
    }
    Ok(())
}

/// Re-evaluates one check on recorded inputs (see [`AxiomReport`]).
pub fn evaluate(axiom: Axiom, branch: KernelBranch, inputs: &[InvariantVector]) -> Result<Residual> {
    let first = inputs.first().ok_or(Error::EmptyVector)?;
    let fam = family(branch, first.kappa);
    match axiom {
        Axiom::PairwiseAdditivity => {
            expect_inputs(inputs, 1)?;
            pairwise_additivity_in(fam.as_ref(), &first.phis)
        }
        Axiom::TimeSymmetry => {
            expect_inputs(inputs, 1)?;
            time_symmetry_in(fam.as_ref(), &first.phis)
        }
        Axiom::BayesComposition => {
            expect_inputs(inputs, 2)?;
            if first.kappa != inputs[1].kappa {
                return Err(Error::KappaMismatch(first.kappa, inputs[1].kappa));
            }
            bayes_composition_in(fam.as_ref(), &first.phis, &inputs[1].phis)
        }
        Axiom::ShiftInvariance => {
            expect_inputs(inputs, 2)?;
            let epsilon = inputs[1].phis[0] - first.phis[0];
            shift_pair_in(fam.as_ref(), &first.phis, &inputs[1].phis, epsilon)
        }
        Axiom::PermutationSymmetry => {
            expect_inputs(inputs, 2)?;
            Ok(Residual::between(
                fam.probability(&first.phis)?,
                fam.probability(&inputs[1].phis)?,
            ))
        }
    }
}

struct Tracker {
    worst: Residual,
    worst_input: Vec<InvariantVector>,
}

impl Tracker {
    fn new() -> Self {
        Self {
            worst: Residual::zero(),
            worst_input: Vec::new(),
        }
    }

    fn offer(&mut self, r: Residual, input: impl FnOnce() -> Vec<InvariantVector>) {
        if self.worst_input.is_empty() || r.rel > self.worst.rel || r.rel.is_nan() {
            self.worst_input = input();
        }
        self.worst = self.worst.max(r);
    }

    fn finish(self, axiom: Axiom, cfg: &TrialConfig) -> AxiomReport {
        AxiomReport {
            axiom,
            trials: cfg.trials,
            max_abs_residual: self.worst.abs,
            max_rel_residual: self.worst.rel,
            seed: cfg.seed,
            worst_case_input: self.worst_input,
        }
    }
}

/// Each trial draws inputs and hands them to [`evaluate`], so recorded worst
/// cases replay exactly.
fn run(cfg: &TrialConfig, axiom: Axiom, mut draw: impl FnMut(&mut ChaCha8Rng) -> Vec<InvariantVector>) -> Result<AxiomReport> {
    cfg.validate()?;
    let mut rng = cfg.rng(axiom.salt());
    let mut tracker = Tracker::new();
    for _ in 0..cfg.trials {
        let inputs = draw(&mut rng);
        let r = evaluate(axiom, cfg.kernel, &inputs)?;
        tracker.offer(r, || inputs);
    }
    Ok(tracker.finish(axiom, cfg))
}

pub fn run_pairwise_additivity(cfg: &TrialConfig) -> Result<AxiomReport> {
    run(cfg, Axiom::PairwiseAdditivity, |rng| vec![cfg.draw_vector(rng, 3)])
}

pub fn run_time_symmetry(cfg: &TrialConfig) -> Result<AxiomReport> {
    run(cfg, Axiom::TimeSymmetry, |rng| vec![cfg.draw_vector(rng, 1)])
}

/// Draws `n` and `m` with `n * m <= max_paths`.
pub fn run_bayes_composition(cfg: &TrialConfig) -> Result<AxiomReport> {
    let budget = cfg.max_paths.max(1);
    run(cfg, Axiom::BayesComposition, |rng| {
        let n = rng.random_range(1..=budget);
        let m = rng.random_range(1..=budget / n);
        let kappa = cfg.draw_kappa(rng);
        let first = InvariantVector {
            phis: cfg.draw_phis(rng, n),
            kappa,
        };
        let second = InvariantVector {
            phis: cfg.draw_phis(rng, m),
            kappa,
        };
        vec![first, second]
    })
}

/// Shifts by `epsilon` with `|epsilon|` uniform in `[0.1, 1]`.
pub fn run_shift_invariance(cfg: &TrialConfig) -> Result<AxiomReport> {
    run(cfg, Axiom::ShiftInvariance, |rng| {
        let v = cfg.draw_vector(rng, 1);
        let magnitude: f64 = rng.random_range(0.1..=1.0);
        let epsilon = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        let shifted = v.shifted(epsilon);
        vec![v, shifted]
    })
}

pub fn run_permutation_symmetry(cfg: &TrialConfig) -> Result<AxiomReport> {
    run(cfg, Axiom::PermutationSymmetry, |rng| {
        let v = cfg.draw_vector(rng, 2);
        let mut permuted = v.clone();
        permuted.phis.shuffle(rng);
        vec![v, permuted]
    })
}

/// `I_k` together with the largest subset probability that entered it.
fn sorkin_with_scale(fam: &dyn ProbabilityFamily, phis: &[f64]) -> Result<(f64, f64)> {
    let k = phis.len();
    let mut subset = Vec::with_capacity(k);
    let (mut total, mut scale) = (0.0, 1f64);
    for mask in 1u64..(1u64 << k) {
        subset.clear();
        subset.extend((0..k).filter(|i| mask >> i & 1 == 1).map(|i| phis[i]));
        let p = fam.probability(&subset)?;
        let sign = if (k - subset.len()) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * p;
        scale = scale.max(p.abs());
    }
    Ok((total, scale))
}

/// `trials` random configurations of exactly `order` paths.
pub fn run_sorkin(cfg: &TrialConfig, order: usize) -> Result<SorkinReport> {
    cfg.validate()?;
    if !(2..=20).contains(&order) {
        return Err(Error::TooFewPaths {
            needed: 2,
            got: order,
        });
    }
    let mut rng = cfg.rng(100 + order as u64);
    let mut values = Vec::with_capacity(cfg.trials);
    let (mut max_abs, mut max_rel) = (0f64, 0f64);
    for _ in 0..cfg.trials {
        let kappa = cfg.draw_kappa(&mut rng);
        let phis = cfg.draw_phis(&mut rng, order);
        let fam = family(cfg.kernel, kappa);
        let (value, scale) = sorkin_with_scale(fam.as_ref(), &phis)?;
        max_abs = max_abs.max(value.abs());
        max_rel = max_rel.max(value.abs() / scale);
        values.push(value);
    }
    Ok(SorkinReport {
        order,
        interference_values: values,
        max_abs,
        max_rel,
    })
}

/// Everything `check-axioms` reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub kernel: KernelBranch,
    pub bounded: bool,
    pub tolerance: f64,
    pub axioms: Vec<AxiomReport>,
    pub sorkin: Vec<SorkinReport>,
    /// Every axiom residual and every `I_k` with `k >= 3` under tolerance
    /// (relative).
    pub residuals_pass: bool,
}

/// All five checks plus Sorkin orders `2..=5`.
pub fn run_suite(cfg: &TrialConfig, tolerance: f64) -> Result<SuiteReport> {
    let axioms = vec![
        run_pairwise_additivity(cfg)?,
        run_time_symmetry(cfg)?,
        run_bayes_composition(cfg)?,
        run_permutation_symmetry(cfg)?,
        run_shift_invariance(cfg)?,
    ];
    let sorkin = (2..=5)
        .map(|k| run_sorkin(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    let residuals_pass = axioms.iter().all(|r| r.passes(tolerance))
        && sorkin
            .iter()
            .filter(|s| s.order >= 3)
            .all(|s| s.max_rel <= tolerance);
    let probe = family(cfg.kernel, cfg.kappas.iter().copied().fold(0.0, f64::max));
    Ok(SuiteReport {
        seed: cfg.seed,
        kernel: cfg.kernel,
        bounded: probe.is_bounded(),
        tolerance,
        axioms,
        sorkin,
        residuals_pass,
    })
}
