//! Random perturbations of nonautonomous interval dynamics.
//!
//! Piecewise-linear maps of `[0, 1]` and sequences of them, bounded
//! uniform noise processes driven by those sequences, and the analyses
//! built on top: recurrence estimates, δ-chains, periodic structure,
//! hull decompositions, shadowing and Li-Yorke pair detection.

pub mod gallery;
pub mod maps;
pub mod periodic;
pub mod stats;
pub mod stochproc;
pub mod chains;
pub mod recurrence;
pub mod plot;
pub mod experiment;
