use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{path_invariants, Pattern, SlitGeometry};
use crate::error::{Error, Result};
use crate::optimize::golden_section;
use crate::probability::intensity;

const MIN_POINTS: usize = 20;
const MIN_VARIANCE: f64 = 1e-9;
const MAX_RELATIVE_RMS: f64 = 0.1;
const REFINED_BASINS: usize = 16;
const TIE_TOLERANCE: f64 = 1e-6;

/// Search range and density of the coarse scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    /// Number of log-spaced grid points.
    pub seeds: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            kappa_lo: 1e-2,
            kappa_hi: 1e2,
            seeds: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaFit {
    /// `|kappa|`; the sign is not identifiable from intensities.
    pub kappa: f64,
    /// Root mean square misfit of the max-one normalized model and data.
    pub rms: f64,
}

fn normalized_model(phis: &[Vec<f64>], kappa: f64) -> Vec<f64> {
    let raw: Vec<f64> = phis.iter().map(|p| intensity(p, kappa)).collect();
    let max = raw.iter().copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
    raw.into_iter().map(|v| v * scale).collect()
}

fn sse(phis: &[Vec<f64>], data: &[f64], kappa: f64) -> f64 {
    normalized_model(phis, kappa)
        .iter()
        .zip(data)
        .map(|(m, d)| (m - d).powi(2))
        .sum()
}

/// Recovers the coupling from a measured pattern over a known geometry.
///
/// Model and data are both normalized to a unit maximum. The sum of squared
/// differences is scanned on a log-spaced grid over `[kappa_lo, kappa_hi]`,
/// and the deepest local minima of the scan are refined by golden-section
/// search between their grid neighbours. Refined minima that tie within a
/// relative `1e-6` go to the smaller coupling. The geometry's own screen
/// points are replaced by the pattern's.
pub fn fit_kappa(pattern: &Pattern, geometry: &SlitGeometry, opts: &FitOptions) -> Result<KappaFit> {
    if pattern.len() < MIN_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_POINTS,
            got: pattern.len(),
        });
    }
    if !(opts.kappa_lo > 0.0 && opts.kappa_hi > opts.kappa_lo && opts.seeds >= 2) {
        return Err(Error::BadInterval {
            start: opts.kappa_lo,
            end: opts.kappa_hi,
        });
    }
    let data = pattern.normalized().intensities;
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let variance = data.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / data.len() as f64;
    if !(variance >= MIN_VARIANCE) {
        return Err(Error::NoFringes(variance));
    }

    let mut geometry = geometry.clone();
    geometry.screen_points = pattern.screen_points.clone();
    let phis = path_invariants(&geometry)?;

    let ratio = (opts.kappa_hi / opts.kappa_lo).ln() / (opts.seeds - 1) as f64;
    let grid: Vec<f64> = (0..opts.seeds)
        .map(|i| opts.kappa_lo * (ratio * i as f64).exp())
        .collect();
    let scores: Vec<f64> = grid.par_iter().map(|&k| sse(&phis, &data, k)).collect();

    // Refine the deepest basins of the scan. On evenly spaced screens distinct
    // couplings can give identical samples; among such ties the smallest wins.
    let mut basins: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = i == 0 || scores[i] <= scores[i - 1];
            let right = i + 1 == grid.len() || scores[i] < scores[i + 1];
            left && right
        })
        .collect();
    basins.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    basins.truncate(REFINED_BASINS);
    let refined: Vec<(f64, f64)> = basins
        .par_iter()
        .map(|&i| {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            let k = golden_section(|k| sse(&phis, &data, k), lo, hi, 1e-13);
            match sse(&phis, &data, k) {
                s if s <= scores[i] => (k, s),
                _ => (grid[i], scores[i]),
            }
        })
        .collect();
    let best = refined.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let tie = best * (1.0 + TIE_TOLERANCE) + TIE_TOLERANCE * data.len() as f64 * f64::EPSILON;
    let (kappa, score) = refined
        .iter()
        .copied()
        .filter(|r| r.1 <= tie)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one basin");
    let rms = (score / data.len() as f64).sqrt();
    if rms > MAX_RELATIVE_RMS {
        return Err(Error::PoorFit { kappa, rms });
    }
    Ok(KappaFit {
        kappa: kappa.abs(),
        rms,
    })
}
