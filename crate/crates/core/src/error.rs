use thiserror::Error;

use crate::structure::Axiom;

/// Errors raised by model construction, geometry and the observable calculus.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model has no states")]
    EmptyModel,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("not an ortho-set (worst off-diagonal similarity {worst:.3e})")]
    NotOrthoSet { worst: f64 },

    #[error("subspaces are not orthogonal (worst cross similarity {worst:.3e})")]
    NotOrthogonal { worst: f64 },

    #[error("state already lies in the subspace (p(x, A) = {p})")]
    AlreadyInSubspace { p: f64 },

    #[error("state is orthogonal to the subspace (p(x, X) = {p:.3e})")]
    OrthogonalToSubspace { p: f64 },

    #[error("ortho-set is not contained in the enclosing subspace")]
    NotInSubspace,

    #[error("{axiom} violated: {witness}")]
    AxiomViolation { axiom: Axiom, witness: String },

    #[error("phase undefined: {0}")]
    PhaseUndefined(String),

    #[error("matrix is not Hermitian (max |H - H^†| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("operation not supported by {kind} models: {what}")]
    Unsupported { kind: &'static str, what: &'static str },

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("schema error: {0}")]
    SchemaError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
