use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Normalization, Pattern, SpacetimePoint};
use crate::axioms::Residual;
use crate::error::{Error, Result};
use crate::invariants::{invariant, ParticleParams, Trajectory};

pub const DEFAULT_BUDGET: usize = 1_000_000;

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

/// Equally spaced intermediate time slices between two events, each offering
/// the same evenly spaced positions across `x_range` (inclusive). A single
/// position sits at the middle of the range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub time_slices: usize,
    pub positions_per_slice: usize,
    pub x_range: (f64, f64),
    #[serde(default = "default_budget")]
    pub budget: usize,
}

impl LatticeSpec {
    pub fn new(time_slices: usize, positions_per_slice: usize, x_range: (f64, f64)) -> Self {
        Self {
            time_slices,
            positions_per_slice,
            x_range,
            budget: DEFAULT_BUDGET,
        }
    }

    /// `positions_per_slice ^ time_slices`, as a float so it cannot overflow.
    pub fn path_count(&self) -> f64 {
        (self.positions_per_slice as f64).powi(self.time_slices as i32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_slices > 0 && self.positions_per_slice == 0 {
            return Err(Error::InvalidExperiment("lattice slice with no positions".into()));
        }
        if !(self.x_range.0.is_finite() && self.x_range.1.is_finite()) {
            return Err(Error::InvalidExperiment("non-finite lattice range".into()));
        }
        let paths = self.path_count();
        if paths > self.budget as f64 {
            return Err(Error::BudgetExceeded {
                paths,
                budget: self.budget,
            });
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<f64> {
        let (lo, hi) = self.x_range;
        match self.positions_per_slice {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            p => (0..p)
                .map(|k| lo + (hi - lo) * k as f64 / (p - 1) as f64)
                .collect(),
        }
    }

    fn times(&self, source: SpacetimePoint, target: SpacetimePoint) -> Vec<f64> {
        let segments = (self.time_slices + 1) as f64;
        let mut times = Vec::with_capacity(self.time_slices + 2);
        times.push(source.t);
        times.extend((1..=self.time_slices).map(|k| source.t + (target.t - source.t) * k as f64 / segments));
        times.push(target.t);
        times
    }
}

/// Odometer over every lattice path between two events.
#[derive(Debug, Clone)]
pub struct LatticePaths {
    times: Vec<f64>,
    positions: Vec<f64>,
    source_x: f64,
    target_x: f64,
    digits: Vec<usize>,
    done: bool,
}

impl LatticePaths {
    pub fn new(source: SpacetimePoint, target: SpacetimePoint, lattice: &LatticeSpec) -> Result<Self> {
        if !(target.t > source.t) {
            return Err(Error::BadInterval {
                start: source.t,
                end: target.t,
            });
        }
        lattice.validate()?;
        Ok(Self {
            times: lattice.times(source, target),
            positions: lattice.positions(),
            source_x: source.x,
            target_x: target.x,
            digits: vec![0; lattice.time_slices],
            done: false,
        })
    }
}

impl Iterator for LatticePaths {
    type Item = Trajectory;

    fn next(&mut self) -> Option<Trajectory> {
        if self.done {
            return None;
        }
        let mut xs = Vec::with_capacity(self.times.len());
        xs.push(self.source_x);
        xs.extend(self.digits.iter().map(|&d| self.positions[d]));
        xs.push(self.target_x);
        // last slice varies fastest
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < self.positions.len() {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Trajectory::new(self.times.clone(), xs).ok()
    }
}

/// Every lattice path from `source` to `target`.
pub fn lattice_paths(source: SpacetimePoint, target: SpacetimePoint, lattice: &LatticeSpec) -> Result<Vec<Trajectory>> {
    Ok(LatticePaths::new(source, target, lattice)?.collect())
}

/// `(sum cos, sum sin, skipped)` over the given paths. Superluminal paths in
/// proper-time mode are skipped and counted.
fn amplitude_over<I>(paths: I, particle: &ParticleParams, kappa: f64) -> Result<(f64, f64, usize)>
where
    I: IntoIterator<Item = Trajectory>,
{
    let (mut re, mut im, mut skipped) = (0.0, 0.0, 0usize);
    for path in paths {
        match invariant(&path, particle) {
            Ok(phi) => {
                let (s, c) = (kappa * phi).sin_cos();
                re += c;
                im += s;
            }
            Err(Error::SuperluminalSegment { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((re, im, skipped))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorResult {
    pub pattern: Pattern,
    /// Superluminal paths left out, per target.
    pub skipped: Vec<usize>,
}

/// `|sum_paths exp(i kappa phi)|^2` for each target event, unnormalized.
pub fn lattice_propagator_intensity(
    source: SpacetimePoint,
    targets: &[SpacetimePoint],
    lattice: &LatticeSpec,
    particle: &ParticleParams,
    kappa: f64,
) -> Result<PropagatorResult> {
    particle.validate()?;
    let per_target = targets
        .par_iter()
        .map(|&target| {
            let paths = LatticePaths::new(source, target, lattice)?;
            let (re, im, skipped) = amplitude_over(paths, particle, kappa)?;
            Ok((re * re + im * im, skipped))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(PropagatorResult {
        pattern: Pattern {
            screen_points: targets.iter().map(|t| t.x).collect(),
            intensities: per_target.iter().map(|r| r.0).collect(),
            normalization: Normalization::None,
        },
        skipped: per_target.iter().map(|r| r.1).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    /// Intensity over the concatenated paths through the forced point.
    pub composite: f64,
    pub first_leg: f64,
    pub second_leg: f64,
    /// `composite` against `first_leg * second_leg`.
    pub residual: Residual,
    pub composite_paths: usize,
}

/// Forces every path through `via` and compares the intensity of the joined
/// paths with the product of the two leg intensities.
///
/// The composite invariant is computed on each concatenated trajectory, not by
/// adding leg invariants, so the check also exercises additivity of the
/// invariant along a path.
pub fn forced_intermediate_intensity(
    source: SpacetimePoint,
    via: SpacetimePoint,
    target: SpacetimePoint,
    before: &LatticeSpec,
    after: &LatticeSpec,
    particle: &ParticleParams,
    kappa: f64,
) -> Result<Factorization> {
    particle.validate()?;
    let first = lattice_paths(source, via, before)?;
    let second = lattice_paths(via, target, after)?;
    let total = first.len() as f64 * second.len() as f64;
    let budget = before.budget.max(after.budget);
    if total > budget as f64 {
        return Err(Error::BudgetExceeded { paths: total, budget });
    }
    let mut joined = Vec::with_capacity(total as usize);
    for a in &first {
        for b in &second {
            joined.push(a.concat(b)?);
        }
    }
    let composite_paths = joined.len();
    let intensity = |paths: Vec<Trajectory>| -> Result<f64> {
        let (re, im, _) = amplitude_over(paths, particle, kappa)?;
        Ok(re * re + im * im)
    };
    let composite = intensity(joined)?;
    let first_leg = intensity(first)?;
    let second_leg = intensity(second)?;
    Ok(Factorization {
        composite,
        first_leg,
        second_leg,
        residual: Residual::between(composite, first_leg * second_leg),
        composite_paths,
    })
}
