//! Multi-path probability functions of relativistic path invariants.
//!
//! A particle that can reach a detector along `n` alternative paths carries one
//! invariant `phi_i` per path (proper time, or minus the action). This crate
//! evaluates the detection intensity
//!
//! ```text
//! P^n(phi) = | sum_i exp(i kappa phi_i) |^2
//! ```
//!
//! in three independent ways, checks the structural conditions that single it
//! out (pairwise additivity, time symmetry, composition through an intermediate
//! point), evaluates the wider cosine-sum family obtained without pairwise
//! additivity, and simulates slit and lattice experiments with coupling
//! recovery.
//!
//! ```
//! use pathsum::{pn_amplitude, pn_pairwise, InvariantVector};
//!
//! let v = InvariantVector::new(vec![0.0, 1.0, 2.5], 1.0)?;
//! let a = pn_amplitude(&v)?;
//! let b = pn_pairwise(&v)?;
//! assert!((a - b).abs() < 1e-12);
//! # Ok::<(), pathsum::Error>(())
//! ```
//!
//! The guide in `book/` walks through each module; its code listings are
//! compiled and run as doc-tests of this crate.

// `!(a < b)` is how NaN inputs are rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
mod error;
pub mod experiments;
pub mod invariants;
pub mod optimize;
pub mod probability;
pub mod spectral;

pub use error::{Error, Result};
pub use invariants::{
    action_invariant, invariant, proper_time_invariant, straight_line, InvariantMode, InvariantVector,
    ParticleParams, Potential, Trajectory,
};
pub use probability::{
    kernel_eval, pn_amplitude, pn_pairwise, quantum_event_system, union_probability, AmplitudeFamily,
    EventSystem, KernelBranch, KernelFamily, OneArgSolution, PairKernel, ProbabilityFamily,
    UnionProbability,
};
pub use spectral::{eval_spectral, quantum_spectrum, symmetrize, Atom, SpectralMeasure};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/probability.md")]
    mod probability {}
    #[doc = include_str!("../../../book/src/axioms.md")]
    mod axioms {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
