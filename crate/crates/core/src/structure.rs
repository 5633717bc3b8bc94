//! The abstract similarity-projection model: a state space Ω together with a
//! similarity `p: Ω × Ω → ℝ`, plus the primitives every other module builds
//! on (similarity to an ortho-set, state equivalence).
//!
//! Four concrete kinds share one interface. Classical and matrix models have
//! a finite, enumerable Ω of indexed states; Hilbert and sectored models are
//! linear and carry unit complex vectors. Operations that need constructive
//! witnesses (projections, bases, intersections) dispatch on that split.

use std::fmt;
use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{is_ortho_set, OrthoSet};
use crate::models::MatrixModel;
use crate::state::{normalize, transition, CVector, State};
use crate::tolerance::Tolerances;
use num_complex::Complex64;

/// The named properties the checker decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    Symmetry,
    NonNegativity,
    Boundedness,
    OProjection,
    Factorization,
    Inequality,
    Continuity,
    ObservableLaws,
    MorphismLaws,
}

impl Axiom {
    pub const ALL: [Axiom; 9] = [
        Axiom::Symmetry,
        Axiom::NonNegativity,
        Axiom::Boundedness,
        Axiom::OProjection,
        Axiom::Factorization,
        Axiom::Inequality,
        Axiom::Continuity,
        Axiom::ObservableLaws,
        Axiom::MorphismLaws,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "Symmetry",
            Axiom::NonNegativity => "NonNegativity",
            Axiom::Boundedness => "Boundedness",
            Axiom::OProjection => "OProjection",
            Axiom::Factorization => "Factorization",
            Axiom::Inequality => "Inequality",
            Axiom::Continuity => "Continuity",
            Axiom::ObservableLaws => "ObservableLaws",
            Axiom::MorphismLaws => "MorphismLaws",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Classical,
    Hilbert,
    Sectored,
    Matrix,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Classical => "classical",
            ModelKind::Hilbert => "hilbert",
            ModelKind::Sectored => "sectored",
            ModelKind::Matrix => "matrix",
        }
    }
}

/// Block layout of the ambient space of a linear model. A Hilbert model is a
/// single block.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorLayout {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl SectorLayout {
    pub(crate) fn new(dims: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &d in dims {
            offsets.push(total);
            total += d;
        }
        Self {
            dims: dims.to_vec(),
            offsets,
            total,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn range(&self, sector: usize) -> Range<usize> {
        self.offsets[sector]..self.offsets[sector] + self.dims[sector]
    }

    pub fn sector_of_index(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }
}

/// Deterministic amplitude noise applied to constructed witnesses
/// (o-projections and projections) of a Hilbert model. Used to demonstrate
/// tolerance semantics on a model that violates the axioms by a known amount.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub seed: u64,
}

impl Perturbation {
    fn apply(&self, v: CVector) -> Result<CVector> {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for z in v.iter() {
            for bits in [z.re.to_bits(), z.im.to_bits()] {
                h = (h ^ bits).wrapping_mul(0x0100_0000_01b3);
                h ^= h >> 29;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let noisy = v.map(|z| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            z + Complex64::new(re, im) * self.amplitude
        });
        normalize(noisy)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Repr {
    Classical {
        n: usize,
    },
    Hilbert {
        layout: SectorLayout,
        perturbation: Option<Perturbation>,
    },
    Sectored {
        layout: SectorLayout,
    },
    Matrix(MatrixModel),
}

/// A concrete SP-model. Immutable after construction; cheap to clone except
/// for matrix models, which own their table.
#[derive(Debug, Clone)]
pub struct SpModel {
    pub(crate) repr: Repr,
    pub(crate) tol: Tolerances,
}

impl SpModel {
    pub(crate) fn from_repr(repr: Repr) -> Self {
        Self {
            repr,
            tol: Tolerances::default(),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.repr {
            Repr::Classical { .. } => ModelKind::Classical,
            Repr::Hilbert { .. } => ModelKind::Hilbert,
            Repr::Sectored { .. } => ModelKind::Sectored,
            Repr::Matrix(_) => ModelKind::Matrix,
        }
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Result<Self> {
        tol.validate()?;
        self.tol = tol;
        Ok(self)
    }

    /// Same model with deterministic noise on constructed witnesses. Only
    /// Hilbert models accept a perturbation.
    pub fn with_perturbation(mut self, amplitude: f64, seed: u64) -> Result<Self> {
        match &mut self.repr {
            Repr::Hilbert { perturbation, .. } => {
                *perturbation = Some(Perturbation { amplitude, seed });
                Ok(self)
            }
            _ => Err(Error::Unsupported {
                kind: self.kind().name(),
                what: "perturbation",
            }),
        }
    }

    pub fn perturbation(&self) -> Option<Perturbation> {
        match &self.repr {
            Repr::Hilbert { perturbation, .. } => *perturbation,
            _ => None,
        }
    }

    /// Dimension of the model: the common size of its bases. `None` for
    /// matrix models, whose bases are only known after a search.
    pub fn dimension(&self) -> Option<usize> {
        match &self.repr {
            Repr::Classical { n } => Some(*n),
            Repr::Hilbert { layout, .. } | Repr::Sectored { layout } => Some(layout.total()),
            Repr::Matrix(_) => None,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.layout().is_some()
    }

    pub(crate) fn layout(&self) -> Option<&SectorLayout> {
        match &self.repr {
            Repr::Hilbert { layout, .. } | Repr::Sectored { layout } => Some(layout),
            _ => None,
        }
    }

    /// Number of states of a finite model.
    pub fn omega_size(&self) -> Option<usize> {
        match &self.repr {
            Repr::Classical { n } => Some(*n),
            Repr::Matrix(m) => Some(m.n()),
            _ => None,
        }
    }

    pub fn matrix(&self) -> Option<&MatrixModel> {
        match &self.repr {
            Repr::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Sector dimensions of a sectored model.
    pub fn sector_dims(&self) -> Option<&[usize]> {
        match &self.repr {
            Repr::Sectored { layout } => Some(layout.dims()),
            _ => None,
        }
    }

    /// Descriptor used in reports.
    pub fn descriptor(&self) -> Value {
        match &self.repr {
            Repr::Classical { n } => json!({ "kind": "classical", "n": n }),
            Repr::Hilbert { layout, perturbation } => match perturbation {
                None => json!({ "kind": "hilbert", "dim": layout.total() }),
                Some(p) => json!({
                    "kind": "hilbert",
                    "dim": layout.total(),
                    "perturbation": { "amplitude": p.amplitude, "seed": p.seed },
                }),
            },
            Repr::Sectored { layout } => json!({ "kind": "sectored", "dims": layout.dims() }),
            Repr::Matrix(m) => json!({ "kind": "matrix", "n": m.n(), "p": m.rows() }),
        }
    }

    /// Checks that `x` is a state of this model.
    pub fn validate(&self, x: &State) -> Result<()> {
        let unit = |v: &CVector| -> Result<()> {
            let n2 = v.norm_squared();
            if (n2 - 1.0).abs() > self.tol.tol_eq || !n2.is_finite() {
                return Err(Error::InvalidState(format!(
                    "squared norm {n2} is not 1 within {}",
                    self.tol.tol_eq
                )));
            }
            Ok(())
        };
        match (&self.repr, x) {
            (Repr::Classical { n }, State::Index(i)) | (Repr::Matrix(MatrixModel { n, .. }), State::Index(i)) => {
                if i < n {
                    Ok(())
                } else {
                    Err(Error::InvalidState(format!("index {i} out of range 0..{n}")))
                }
            }
            (Repr::Hilbert { layout, .. }, State::Vector(v)) => {
                if v.len() != layout.total() {
                    return Err(Error::InvalidState(format!(
                        "expected {} amplitudes, got {}",
                        layout.total(),
                        v.len()
                    )));
                }
                unit(v)
            }
            (Repr::Sectored { layout }, State::Sectored { sector, amplitudes }) => {
                let Some(&d) = layout.dims().get(*sector) else {
                    return Err(Error::InvalidState(format!(
                        "sector {sector} out of range 0..{}",
                        layout.dims().len()
                    )));
                };
                if amplitudes.len() != d {
                    return Err(Error::InvalidState(format!(
                        "sector {sector} has dimension {d}, got {} amplitudes",
                        amplitudes.len()
                    )));
                }
                unit(amplitudes)
            }
            _ => Err(Error::InvalidState(format!(
                "state variant does not belong to a {} model",
                self.kind().name()
            ))),
        }
    }

    /// `p(x, y)`.
    pub fn similarity(&self, x: &State, y: &State) -> Result<f64> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.similarity_unchecked(x, y))
    }

    /// `p(x, y)` for states already known to be valid.
    pub(crate) fn similarity_unchecked(&self, x: &State, y: &State) -> f64 {
        match (&self.repr, x, y) {
            (Repr::Classical { .. }, State::Index(i), State::Index(j)) => {
                if i == j {
                    1.0
                } else {
                    0.0
                }
            }
            (Repr::Matrix(m), State::Index(i), State::Index(j)) => m.entry(*i, *j),
            (Repr::Hilbert { .. }, State::Vector(a), State::Vector(b)) => transition(a, b),
            (
                Repr::Sectored { .. },
                State::Sectored {
                    sector: s,
                    amplitudes: a,
                },
                State::Sectored {
                    sector: t,
                    amplitudes: b,
                },
            ) => {
                if s == t {
                    transition(a, b)
                } else {
                    0.0
                }
            }
            _ => f64::NAN,
        }
    }

    /// `p(x, A) = Σ_{a ∈ A} p(x, a)`.
    pub fn similarity_to_set(&self, x: &State, a: &OrthoSet) -> Result<f64> {
        self.validate(x)?;
        Ok(self.similarity_to_members(x, a.members()))
    }

    /// `p(x, A)` for an unchecked list; fails with [`Error::NotOrthoSet`] when
    /// the list is not an ortho-set.
    pub fn similarity_to_states(&self, x: &State, a: &[State]) -> Result<f64> {
        self.validate(x)?;
        for s in a {
            self.validate(s)?;
        }
        let (ok, worst) = is_ortho_set(self, a);
        if !ok {
            return Err(Error::NotOrthoSet { worst });
        }
        Ok(self.similarity_to_members(x, a))
    }

    pub(crate) fn similarity_to_members(&self, x: &State, a: &[State]) -> f64 {
        a.iter().map(|s| self.similarity_unchecked(x, s)).sum()
    }

    /// `x ∼ y`, decided as `p(x, y) ≥ 1 − tol_eq`. Invalid states are never
    /// equivalent to anything.
    pub fn states_equivalent(&self, x: &State, y: &State) -> bool {
        match self.similarity(x, y) {
            Ok(p) => p >= 1.0 - self.tol.tol_eq,
            Err(_) => false,
        }
    }

    /// Ambient-space vector of a linear-model state.
    pub(crate) fn embed(&self, x: &State) -> Result<CVector> {
        match (&self.repr, x) {
            (Repr::Hilbert { .. }, State::Vector(v)) => Ok(v.clone()),
            (Repr::Sectored { layout }, State::Sectored { sector, amplitudes }) => {
                let mut v = CVector::zeros(layout.total());
                v.rows_mut(layout.range(*sector).start, amplitudes.len())
                    .copy_from(amplitudes);
                Ok(v)
            }
            _ => Err(Error::InvalidState(format!(
                "cannot embed state into a {} model",
                self.kind().name()
            ))),
        }
    }

    /// Inverse of [`embed`](Self::embed): normalizes `v` and, for sectored
    /// models, recovers the sector that carries its support.
    pub(crate) fn lift(&self, v: CVector) -> Result<State> {
        let v = normalize(v)?;
        match &self.repr {
            Repr::Hilbert { .. } => Ok(State::Vector(v)),
            Repr::Sectored { layout } => {
                let mut carrier = None;
                for s in 0..layout.dims().len() {
                    let r = layout.range(s);
                    let w: f64 = v.rows(r.start, r.len()).norm_squared();
                    if w > self.tol.tol_orth {
                        if carrier.is_some() {
                            return Err(Error::InvalidState("vector mixes superselection sectors".into()));
                        }
                        carrier = Some(s);
                    }
                }
                let s = carrier.ok_or_else(|| Error::InvalidState("vector has no support".into()))?;
                let r = layout.range(s);
                let amplitudes = normalize(v.rows(r.start, r.len()).into_owned())?;
                Ok(State::Sectored { sector: s, amplitudes })
            }
            _ => Err(Error::Unsupported {
                kind: self.kind().name(),
                what: "vector states",
            }),
        }
    }

    /// Lifts a constructed witness, applying the model's perturbation if any.
    pub(crate) fn lift_constructed(&self, v: CVector) -> Result<State> {
        match self.perturbation() {
            Some(p) => self.lift(p.apply(normalize(v)?)?),
            None => self.lift(v),
        }
    }
}
