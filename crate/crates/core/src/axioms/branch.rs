//! Deciding which solution branch of the pair-kernel equation sampled data
//! belongs to, and recovering its rate.
//!
//! Boundedness is the deciding criterion: every cosine-branch kernel obeys
//! `0 <= D <= 4`, while any hyperbolic kernel with nonzero rate exceeds 4 away
//! from the origin. Composition and symmetry cannot tell the two apart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Data is considered unbounded once any sample exceeds `4 + BOUND_TOLERANCE`.
pub const BOUND_TOLERANCE: f64 = 1e-6;
/// Largest accepted rms misfit, relative to `max(1, max |D|)`.
pub const FIT_TOLERANCE: f64 = 1e-6;
const MIN_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchTag {
    Cosine,
    Hyperbolic,
    /// `D = 4`.
    Constant,
    /// `D = 2`, from the degenerate d'Alembert solution `G = 0`.
    ZeroConstant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchFit {
    pub branch: BranchTag,
    /// `kappa` (cosine) or `lambda` (hyperbolic); zero for the constants.
    pub rate: f64,
    pub rms: f64,
}

/// Classifies samples `(x, D(x))` and fits the rate.
///
/// Needs at least eight samples, one of them at `x = 0`, spanning at least two
/// periods for oscillatory data. The cosine rate comes from a scan over the
/// sampling band followed by golden-section refinement and a weighted least
/// squares fit of the `arccos`-unwrapped phases; the hyperbolic rate from a
/// weighted least squares fit of `arccosh((D - 2) / 2) = lambda |x|`.
pub fn classify_branch(samples: &[(f64, f64)]) -> Result<BranchFit> {
    let has_origin = samples.iter().any(|&(x, _)| x == 0.0);
    if samples.len() < MIN_SAMPLES || !has_origin {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: if has_origin { samples.len() } else { 0 },
        });
    }
    if samples.iter().any(|&(x, d)| !x.is_finite() || !d.is_finite()) {
        return Err(Error::AmbiguousData { rms: f64::NAN });
    }

    // evenness lets everything work with |x|
    let mut data: Vec<(f64, f64)> = samples.iter().map(|&(x, d)| (x.abs(), d)).collect();
    data.sort_by(|a, b| a.0.total_cmp(&b.0));

    let scale = data.iter().fold(1f64, |m, &(_, d)| m.max(d.abs()));
    let tol = FIT_TOLERANCE * scale;
    let flat_at = |c: f64| data.iter().all(|&(_, d)| (d - c).abs() <= BOUND_TOLERANCE);
    if flat_at(4.0) {
        return Ok(constant_fit(&data, BranchTag::Constant, 4.0));
    }
    if flat_at(2.0) {
        return Ok(constant_fit(&data, BranchTag::ZeroConstant, 2.0));
    }

    let max = data.iter().fold(f64::NEG_INFINITY, |m, &(_, d)| m.max(d));
    let min = data.iter().fold(f64::INFINITY, |m, &(_, d)| m.min(d));
    let fit = if max > 4.0 + BOUND_TOLERANCE {
        fit_hyperbolic(&data)
    } else if min >= -BOUND_TOLERANCE {
        fit_cosine(&data)
    } else {
        None
    };
    match fit {
        Some(f) if f.rms <= tol => Ok(f),
        Some(f) => Err(Error::AmbiguousData { rms: f.rms }),
        None => Err(Error::AmbiguousData { rms: f64::INFINITY }),
    }
}

fn constant_fit(data: &[(f64, f64)], branch: BranchTag, level: f64) -> BranchFit {
    BranchFit {
        branch,
        rate: 0.0,
        rms: rms(data, |_| level),
    }
}

fn rms(data: &[(f64, f64)], model: impl Fn(f64) -> f64) -> f64 {
    let sse: f64 = data.iter().map(|&(x, d)| (model(x) - d).powi(2)).sum();
    (sse / data.len() as f64).sqrt()
}

fn fit_hyperbolic(data: &[(f64, f64)]) -> Option<BranchFit> {
    // growth away from the origin must be monotone (up to the bound tolerance)
    if data.windows(2).any(|w| w[1].1 < w[0].1 - BOUND_TOLERANCE) {
        return None;
    }
    // weight sinh^2 undoes the arccosh stretching near G = 1
    let (mut num, mut den) = (0.0, 0.0);
    for &(u, d) in data {
        let g = ((d - 2.0) / 2.0).max(1.0);
        let a = g.acosh();
        let w = a.sinh().powi(2);
        num += w * u * a;
        den += w * u * u;
    }
    if !(den > 0.0) {
        return None;
    }
    let lambda = num / den;
    Some(BranchFit {
        branch: BranchTag::Hyperbolic,
        rate: lambda,
        rms: rms(data, |u| 2.0 * (lambda * u).cosh() + 2.0),
    })
}

fn cosine_sse(data: &[(f64, f64)], kappa: f64) -> f64 {
    data.iter()
        .map(|&(u, d)| (2.0 * (kappa * u).cos() + 2.0 - d).powi(2))
        .sum()
}

fn fit_cosine(data: &[(f64, f64)]) -> Option<BranchFit> {
    let u_max = data.last()?.0;
    let min_gap = data
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !(u_max > 0.0 && min_gap.is_finite()) {
        return None;
    }

    // scan from one half-period over the whole span up to the sampling limit
    let lo = std::f64::consts::PI / u_max;
    let hi = std::f64::consts::PI / min_gap;
    let step = lo / 8.0;
    let count = (((hi - lo) / step).ceil() as usize).clamp(1, 1_000_000);
    let mut best = (lo, cosine_sse(data, lo));
    for i in 1..=count {
        let k = lo + step * i as f64;
        let sse = cosine_sse(data, k);
        if sse < best.1 {
            best = (k, sse);
        }
    }
    let mut kappa = crate::optimize::golden_section(
        |k| cosine_sse(data, k),
        (best.0 - step).max(0.0),
        best.0 + step,
        1e-14,
    );

    // weighted least squares on unwrapped arccos phases
    for _ in 0..4 {
        let (mut num, mut den) = (0.0, 0.0);
        for &(u, d) in data {
            let theta = ((d - 2.0) / 2.0).clamp(-1.0, 1.0).acos();
            let target = kappa * u;
            let turns = (target / std::f64::consts::TAU).round();
            let base = turns * std::f64::consts::TAU;
            let candidates = [
                base + theta,
                base - theta,
                base + std::f64::consts::TAU - theta,
                base - std::f64::consts::TAU + theta,
            ];
            let phase = candidates
                .into_iter()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
                .unwrap_or(target);
            let w = theta.sin().powi(2);
            num += w * u * phase;
            den += w * u * u;
        }
        if den > 0.0 {
            kappa = num / den;
        }
    }
    Some(BranchFit {
        branch: BranchTag::Cosine,
        rate: kappa,
        rms: rms(data, |u| 2.0 * (kappa * u).cos() + 2.0),
    })
}
