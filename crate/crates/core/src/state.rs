//! Points of Ω for the concrete models.

use nalgebra::DVector;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// A pure state. Which variant is valid depends on the model kind:
/// classical and matrix models use [`State::Index`], Hilbert models use
/// [`State::Vector`] and sectored models use [`State::Sectored`].
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Index(usize),
    Vector(CVector),
    Sectored { sector: usize, amplitudes: CVector },
}

impl State {
    pub fn index(i: usize) -> Self {
        State::Index(i)
    }

    /// Hilbert state from raw amplitudes; the vector is taken as given.
    pub fn vector(amplitudes: impl IntoIterator<Item = Complex64>) -> Self {
        State::Vector(DVector::from_vec(amplitudes.into_iter().collect()))
    }

    /// Hilbert state from real amplitudes.
    pub fn real(amplitudes: &[f64]) -> Self {
        State::vector(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)))
    }

    /// Hilbert state obtained by normalizing `v`.
    pub fn normalized(v: CVector) -> Result<Self> {
        Ok(State::Vector(normalize(v)?))
    }

    pub fn sectored(sector: usize, amplitudes: impl IntoIterator<Item = Complex64>) -> Self {
        State::Sectored {
            sector,
            amplitudes: DVector::from_vec(amplitudes.into_iter().collect()),
        }
    }

    /// Canonical basis vector `e_i` of a `dim`-dimensional Hilbert space.
    pub fn basis_vector(dim: usize, i: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[i] = Complex64::new(1.0, 0.0);
        State::Vector(v)
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match self {
            State::Index(_) => None,
            State::Vector(v) => Some(v),
            State::Sectored { amplitudes, .. } => Some(amplitudes),
        }
    }

    /// Multiplies the amplitudes by `e^{iθ}`; indices are returned unchanged.
    pub fn with_phase(&self, theta: f64) -> Self {
        let ph = Complex64::from_polar(1.0, theta);
        match self {
            State::Index(i) => State::Index(*i),
            State::Vector(v) => State::Vector(v * ph),
            State::Sectored { sector, amplitudes } => State::Sectored {
                sector: *sector,
                amplitudes: amplitudes * ph,
            },
        }
    }

    /// JSON form used in report witnesses.
    pub fn to_json(&self) -> Value {
        match self {
            State::Index(i) => json!(i),
            State::Vector(v) => json!({ "amplitudes": amplitudes_json(v) }),
            State::Sectored { sector, amplitudes } => {
                json!({ "sector": sector, "amplitudes": amplitudes_json(amplitudes) })
            }
        }
    }
}

fn amplitudes_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|z| json!([z.re, z.im])).collect())
}

/// Serializes a list of states as a JSON array.
pub fn states_json(states: &[State]) -> Value {
    Value::Array(states.iter().map(State::to_json).collect())
}

/// Conjugate-linear in the first argument.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

#[inline]
pub fn transition(a: &CVector, b: &CVector) -> f64 {
    inner(a, b).norm_sqr()
}

pub fn normalize(v: CVector) -> Result<CVector> {
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidState(format!("cannot normalize vector of norm {n}")));
    }
    Ok(v / Complex64::new(n, 0.0))
}

/// Removes the components of `v` along the orthonormal vectors `frame`,
/// running classical Gram-Schmidt twice.
pub fn orthogonal_residual(v: &CVector, frame: &[CVector]) -> CVector {
    let mut r = v.clone();
    for _ in 0..2 {
        for f in frame {
            let c = inner(f, &r);
            r.axpy(-c, f, Complex64::new(1.0, 0.0));
        }
    }
    r
}
