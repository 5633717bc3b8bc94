//! Similarity-preserving maps of a model into itself, and the checks that a
//! map is a morphism and that it respects a basis it fixes.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{extend_to_basis, is_ortho_set, project, OrthoSet, Subspace};
use crate::state::State;
use crate::structure::SpModel;

type MapFn = dyn Fn(&State) -> Result<State> + Send + Sync;

/// A map `f: Ω → Ω` on a fixed model.
#[derive(Clone)]
pub struct Morphism {
    name: String,
    map: Arc<MapFn>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism").field("name", &self.name).finish()
    }
}

impl Morphism {
    pub fn identity() -> Self {
        Self::from_fn("identity", |x| Ok(x.clone()))
    }

    pub fn from_fn(name: impl Into<String>, f: impl Fn(&State) -> Result<State> + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            map: Arc::new(f),
        }
    }

    /// `x ↦ U x` on a linear model. `U` must be unitary within `tol_eq`.
    pub fn unitary(m: &SpModel, u: DMatrix<Complex64>) -> Result<Self> {
        let Some(layout) = m.layout() else {
            return Err(Error::Unsupported {
                kind: m.kind().name(),
                what: "unitary morphisms",
            });
        };
        let d = layout.total();
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::InvalidMorphism(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let defect = (u.adjoint() * &u - DMatrix::<Complex64>::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > m.tolerances().tol_eq {
            return Err(Error::InvalidMorphism(format!(
                "matrix is not unitary (defect {defect:.3e})"
            )));
        }
        let model = m.clone();
        Ok(Self::from_fn("unitary", move |x| {
            model.validate(x)?;
            model.lift(&u * model.embed(x)?)
        }))
    }

    /// Relabels the states of a finite model.
    pub fn permutation(m: &SpModel, perm: Vec<usize>) -> Result<Self> {
        let Some(n) = m.omega_size() else {
            return Err(Error::Unsupported {
                kind: m.kind().name(),
                what: "permutation morphisms",
            });
        };
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidMorphism(format!("not a permutation of 0..{n}")));
        }
        Ok(Self::from_fn("permutation", move |x| match x {
            State::Index(i) if *i < n => Ok(State::Index(perm[*i])),
            _ => Err(Error::InvalidState(format!("{x:?} is not a state of this model"))),
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, x: &State) -> Result<State> {
        (self.map)(x)
    }
}

/// Result of [`check_morphism`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorphismCheck {
    /// Largest `|p(f(a), f(b)) − p(a, b)|` over the sampled pairs.
    pub similarity_deviation: f64,
    /// Indices of the worst pair in the probe list.
    pub worst_pair: (usize, usize),
    /// No pair with `f(a) ∼ f(b)` and `a ≁ b`.
    pub injective: bool,
    pub pass: bool,
}

/// Checks similarity preservation and injectivity up to equivalence on all
/// pairs of `samples` plus a phase-rotated copy of each sample (so that
/// equivalent-but-distinct pairs are exercised).
pub fn check_morphism(m: &SpModel, f: &Morphism, samples: &[State]) -> Result<MorphismCheck> {
    let mut probes: Vec<State> = samples.to_vec();
    if m.is_linear() {
        probes.extend(samples.iter().map(|s| s.with_phase(0.7)));
    }
    let images = probes
        .iter()
        .map(|s| {
            m.validate(s)?;
            let fs = f.apply(s)?;
            m.validate(&fs)?;
            Ok(fs)
        })
        .collect::<Result<Vec<_>>>()?;
    let tol = m.tolerances().tol_eq;
    let mut worst = (0.0, (0, 0));
    let mut injective = true;
    for i in 0..probes.len() {
        for j in 0..probes.len() {
            let p = m.similarity_unchecked(&probes[i], &probes[j]);
            let q = m.similarity_unchecked(&images[i], &images[j]);
            let d = (p - q).abs();
            if d > worst.0 {
                worst = (d, (i, j));
            }
            if q >= 1.0 - tol && p < 1.0 - tol {
                injective = false;
            }
        }
    }
    Ok(MorphismCheck {
        similarity_deviation: worst.0,
        worst_pair: worst.1,
        injective,
        pass: worst.0 <= tol && injective,
    })
}

/// Result of [`check_invariant_basis`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum InvariantBasisOutcome {
    /// Some basis member is moved: the largest `1 − p(f(b), b)`.
    NotApplicable { worst: f64 },
    Checked {
        /// Largest `|p(x, X) − p(f(x), X)|`.
        item1: f64,
        /// Largest `1 − p(f(z), X)` over the members `z = t(x, X)`.
        item2: f64,
        /// Largest `1 − p(t(f(x), X), f(t(x, X)))`.
        item3: f64,
        pass: bool,
    },
}

/// For `f` fixing every member of the basis `B` (up to equivalence) and
/// `X = span(A)` with `A ⊆ B`, checks on `samples` that `p(x, X)` is
/// invariant, that `f` maps `X̄` into `X̄`, and that `f` commutes with the
/// projection on `X`.
pub fn check_invariant_basis(
    m: &SpModel,
    f: &Morphism,
    b: &OrthoSet,
    a: &OrthoSet,
    samples: &[State],
) -> Result<InvariantBasisOutcome> {
    let tol = *m.tolerances();
    let mut moved: f64 = 0.0;
    for s in b.iter() {
        moved = moved.max(1.0 - m.similarity(&f.apply(s)?, s)?);
    }
    if moved > tol.tol_eq {
        return Ok(InvariantBasisOutcome::NotApplicable { worst: moved });
    }
    let x = Subspace::new(m, a.clone())?;
    let (mut item1, mut item2, mut item3): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for s in samples {
        let fs = f.apply(s)?;
        let px = x.similarity(m, s)?;
        item1 = item1.max((px - x.similarity(m, &fs)?).abs());
        if px > tol.rho_floor && x.similarity(m, &fs)? > tol.rho_floor {
            let t = project(m, s, &x)?;
            let ft = f.apply(&t)?;
            item2 = item2.max(1.0 - x.similarity(m, &ft)?);
            let tf = project(m, &fs, &x)?;
            item3 = item3.max(1.0 - m.similarity(&tf, &ft)?);
        }
    }
    let pass = item1 <= tol.tol_eq && item2 <= tol.tol_eq && item3 <= tol.tol_eq;
    Ok(InvariantBasisOutcome::Checked {
        item1,
        item2,
        item3,
        pass,
    })
}

/// Whether `f(B)` is again a basis of Ω.
pub fn image_is_basis(m: &SpModel, f: &Morphism, b: &OrthoSet) -> Result<bool> {
    let image = b.iter().map(|s| f.apply(s)).collect::<Result<Vec<_>>>()?;
    if !is_ortho_set(m, &image).0 {
        return Ok(false);
    }
    let n = image.len();
    Ok(extend_to_basis(m, &OrthoSet::new(m, image)?, None)?.len() == n)
}
