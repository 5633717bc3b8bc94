//! Similarity-projection structures: a state space with a transition
//! probability `p`, the subspace calculus it induces, interference phases,
//! observables, and a seeded engine that checks the defining properties on
//! concrete models.

pub mod checker;
pub mod error;
pub mod geometry;
pub mod models;
pub mod observables;
pub mod phases;
pub mod sampling;
pub mod state;
pub mod structure;
pub mod tolerance;

pub use error::{Error, Result};
pub use geometry::{OrthoSet, Subspace};
pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
pub use state::State;
pub use structure::{Axiom, ModelKind, SpModel};
pub use tolerance::Tolerances;
