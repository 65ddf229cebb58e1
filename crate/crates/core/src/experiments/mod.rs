//! Desk-scale interference experiments built on the amplitude form.
//!
//! * [`slit_pattern`]: one two-leg polyline per slit, through the slit center.
//! * [`lattice_propagator_intensity`]: brute-force sum over every piecewise
//!   linear path through a space-time lattice.
//! * [`fit_kappa`]: recovers the coupling from a two-slit pattern.

mod fit;
mod lattice;
mod pattern;
mod slits;

pub use fit::{fit_kappa, FitOptions, KappaFit};
pub use lattice::{
    forced_intermediate_intensity, lattice_paths, lattice_propagator_intensity, Factorization,
    LatticePaths, LatticeSpec, PropagatorResult, DEFAULT_BUDGET,
};
pub use pattern::{Normalization, Pattern};
pub use slits::{path_invariants, slit_pattern, slit_trajectory, SlitExperiment, SlitGeometry};

use serde::{Deserialize, Serialize};

/// An event `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: f64,
}

impl SpacetimePoint {
    pub fn new(t: f64, x: f64) -> Self {
        Self { t, x }
    }
}
