//! Ortho-sets, subspaces and the constructive operations on them:
//! o-projection, projection `t(x, X)`, basis completion, complement,
//! orthogonal sum and intersection.
//!
//! Linear models (Hilbert, sectored) build witnesses by Gram-Schmidt and
//! spectral methods. Finite models (classical, matrix) search Ω
//! exhaustively, so on a matrix model a missing witness surfaces as an
//! [`Error::AxiomViolation`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::state::{normalize, orthogonal_residual, states_json, CVector, State};
use crate::structure::{Axiom, Repr, SpModel};

/// A finite list of pairwise-orthogonal, pairwise-inequivalent states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrthoSet {
    members: Vec<State>,
}

impl OrthoSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates every member and pairwise orthogonality within `tol_orth`.
    pub fn new(m: &SpModel, members: Vec<State>) -> Result<Self> {
        for s in &members {
            m.validate(s)?;
        }
        let (ok, worst) = is_ortho_set(m, &members);
        if !ok {
            return Err(Error::NotOrthoSet { worst });
        }
        Ok(Self { members })
    }

    pub(crate) fn from_trusted(members: Vec<State>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[State] {
        &self.members
    }

    pub fn into_members(self) -> Vec<State> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, State> {
        self.members.iter()
    }

    pub fn to_json(&self) -> Value {
        states_json(&self.members)
    }
}

/// Whether `a` is an ortho-set, together with the worst off-diagonal
/// similarity (taken over both argument orders).
pub fn is_ortho_set(m: &SpModel, a: &[State]) -> (bool, f64) {
    if a.iter().any(|s| m.validate(s).is_err()) {
        return (false, f64::INFINITY);
    }
    let mut worst: f64 = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let p = m
                .similarity_unchecked(&a[i], &a[j])
                .max(m.similarity_unchecked(&a[j], &a[i]));
            worst = worst.max(p);
        }
    }
    (worst <= m.tol.tol_orth, worst)
}

/// The subspace `Ā` generated by an ortho-set. Linear models cache the
/// orthogonal projector `Σ b b†` of the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: OrthoSet,
    projector: Option<DMatrix<Complex64>>,
}

impl Subspace {
    pub fn new(m: &SpModel, basis: OrthoSet) -> Result<Self> {
        let projector = match m.layout() {
            Some(layout) => {
                let mut p = DMatrix::<Complex64>::zeros(layout.total(), layout.total());
                for b in basis.iter() {
                    let v = m.embed(b)?;
                    p += &v * v.adjoint();
                }
                Some(p)
            }
            None => None,
        };
        Ok(Self { basis, projector })
    }

    /// Subspace spanned by an unchecked list of states.
    pub fn span(m: &SpModel, states: Vec<State>) -> Result<Self> {
        Self::new(m, OrthoSet::new(m, states)?)
    }

    pub fn zero(m: &SpModel) -> Self {
        Self::new(m, OrthoSet::empty()).expect("empty basis always embeds")
    }

    /// Ω itself, with the deterministic basis produced by
    /// [`extend_to_basis`].
    pub fn full(m: &SpModel) -> Result<Self> {
        Self::new(m, extend_to_basis(m, &OrthoSet::empty(), None)?)
    }

    pub fn basis(&self) -> &OrthoSet {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> Option<&DMatrix<Complex64>> {
        self.projector.as_ref()
    }

    /// `p(x, X)`.
    pub fn similarity(&self, m: &SpModel, x: &State) -> Result<f64> {
        m.similarity_to_set(x, &self.basis)
    }

    /// `x ∈ X̄`, i.e. `p(x, X) ≥ 1 − tol_eq`.
    pub fn contains(&self, m: &SpModel, x: &State) -> Result<bool> {
        Ok(self.similarity(m, x)? >= 1.0 - m.tol.tol_eq)
    }

    pub(crate) fn p_unchecked(&self, m: &SpModel, x: &State) -> f64 {
        m.similarity_to_members(x, self.basis.members())
    }
}

fn embed_all(m: &SpModel, states: &[State]) -> Result<Vec<CVector>> {
    states.iter().map(|s| m.embed(s)).collect()
}

fn set_label(members: &[State]) -> String {
    states_json(members).to_string()
}

/// Matrix-model search for an o-projection witness. Returns the best
/// candidate and its violation `max(|p(y, A)|, |p(x, A) + p(x, y) − 1|)`.
pub(crate) fn o_projection_search(m: &SpModel, x: usize, a: &[State]) -> (usize, f64) {
    let n = m.omega_size().expect("finite model");
    let xs = State::Index(x);
    let pa = m.similarity_to_members(&xs, a);
    let mut best = (0, f64::INFINITY);
    for y in 0..n {
        let ys = State::Index(y);
        let perp = m.similarity_to_members(&ys, a).abs();
        let sum = (pa + m.similarity_unchecked(&xs, &ys) - 1.0).abs();
        let v = perp.max(sum);
        if v < best.1 {
            best = (y, v);
        }
    }
    best
}

/// Matrix-model search for a projection witness: the member `y` of `Ā`
/// whose similarity to `x` is closest to `p(x, A)`.
pub(crate) fn projection_search(m: &SpModel, x: usize, a: &[State]) -> Option<(usize, f64)> {
    let n = m.omega_size().expect("finite model");
    let xs = State::Index(x);
    let pa = m.similarity_to_members(&xs, a);
    let mut best: Option<(usize, f64)> = None;
    for y in 0..n {
        let ys = State::Index(y);
        if m.similarity_to_members(&ys, a) < 1.0 - m.tol.tol_eq {
            continue;
        }
        let d = (m.similarity_unchecked(&xs, &ys) - pa).abs();
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((y, d));
        }
    }
    best
}

/// The o-projection of `x` on `A`: the state `y ⊥ A` with
/// `p(x, A) + p(x, y) = 1`.
pub fn o_project(m: &SpModel, x: &State, a: &OrthoSet) -> Result<State> {
    m.validate(x)?;
    let pa = m.similarity_to_members(x, a.members());
    if pa >= 1.0 - m.tol.tol_eq {
        return Err(Error::AlreadyInSubspace { p: pa });
    }
    match &m.repr {
        Repr::Hilbert { .. } | Repr::Sectored { .. } => {
            let frame = embed_all(m, a.members())?;
            let r = orthogonal_residual(&m.embed(x)?, &frame);
            m.lift_constructed(r)
        }
        // p(x, A) < 1 forces p(x, A) = 0, so x itself is a witness.
        Repr::Classical { .. } => Ok(x.clone()),
        Repr::Matrix(_) => {
            let State::Index(xi) = x else { unreachable!("validated") };
            let (y, v) = o_projection_search(m, *xi, a.members());
            if v <= m.tol.tol_eq {
                Ok(State::Index(y))
            } else {
                Err(Error::AxiomViolation {
                    axiom: Axiom::OProjection,
                    witness: format!(
                        "x = {xi}, A = {}, best candidate {y} misses by {v:.3e}",
                        set_label(a.members())
                    ),
                })
            }
        }
    }
}

/// The projection `t(x, X)`: the member of `X̄` closest to `x`, with
/// `p(x, t) = p(x, X)`.
pub fn project(m: &SpModel, x: &State, subspace: &Subspace) -> Result<State> {
    m.validate(x)?;
    let p = subspace.p_unchecked(m, x);
    if p <= m.tol.rho_floor {
        return Err(Error::OrthogonalToSubspace { p });
    }
    match &m.repr {
        Repr::Hilbert { .. } | Repr::Sectored { .. } => {
            let v = m.embed(x)?;
            let w = subspace
                .projector()
                .map(|pr| pr * &v)
                .expect("linear subspaces carry a projector");
            m.lift_constructed(w)
        }
        // Ā = A, and p(x, A) > 0 means x ∈ A.
        Repr::Classical { .. } => Ok(x.clone()),
        Repr::Matrix(_) => {
            let State::Index(xi) = x else { unreachable!("validated") };
            match projection_search(m, *xi, subspace.basis().members()) {
                Some((y, d)) if d <= m.tol.tol_eq => Ok(State::Index(y)),
                best => Err(Error::AxiomViolation {
                    axiom: Axiom::OProjection,
                    witness: format!(
                        "no projection of {xi} on {}: best candidate {:?}",
                        set_label(subspace.basis().members()),
                        best
                    ),
                }),
            }
        }
    }
}

/// Completes the ortho-set `a` to a basis of Ω, or of `within` when given.
///
/// Linear models try the canonical vectors in index order (projected into
/// `within`), keeping Gram-Schmidt residuals of squared norm above
/// `tol_orth`. Finite models add o-projections of the first state not yet
/// covered, in index order.
pub fn extend_to_basis(m: &SpModel, a: &OrthoSet, within: Option<&Subspace>) -> Result<OrthoSet> {
    for s in a.iter() {
        m.validate(s)?;
        if let Some(x) = within {
            if x.p_unchecked(m, s) < 1.0 - m.tol.tol_eq {
                return Err(Error::NotInSubspace);
            }
        }
    }
    match m.layout() {
        Some(layout) => {
            let total = layout.total();
            let target = within.map_or(total, Subspace::dim);
            let mut frame = embed_all(m, a.members())?;
            let mut out = a.members().to_vec();
            for i in 0..total {
                if out.len() >= target {
                    break;
                }
                let mut c = CVector::zeros(total);
                c[i] = Complex64::new(1.0, 0.0);
                if let Some(x) = within {
                    c = x.projector().expect("linear") * c;
                    if c.norm_squared() <= m.tol.tol_orth {
                        continue;
                    }
                    c = normalize(c)?;
                }
                let r = orthogonal_residual(&c, &frame);
                if r.norm_squared() <= m.tol.tol_orth {
                    continue;
                }
                let r = normalize(r)?;
                out.push(m.lift(r.clone())?);
                frame.push(r);
            }
            if out.len() < target {
                return Err(Error::AxiomViolation {
                    axiom: Axiom::OProjection,
                    witness: format!("basis completion stalled at {} of {target}", out.len()),
                });
            }
            Ok(OrthoSet::from_trusted(out))
        }
        None => {
            let n = m.omega_size().expect("finite model");
            let candidates: Vec<usize> = (0..n)
                .filter(|&c| within.is_none_or(|x| x.p_unchecked(m, &State::Index(c)) >= 1.0 - m.tol.tol_eq))
                .collect();
            greedy_complete(m, a.members().to_vec(), &candidates, |y| {
                within.is_none_or(|x| x.p_unchecked(m, y) >= 1.0 - m.tol.tol_eq)
            })
        }
    }
}

/// Finite-model completion: repeatedly o-project the first uncovered
/// candidate against the current set. `admissible` checks that each new
/// member stays inside the target subspace.
fn greedy_complete(
    m: &SpModel,
    mut out: Vec<State>,
    candidates: &[usize],
    admissible: impl Fn(&State) -> bool,
) -> Result<OrthoSet> {
    for _ in 0..=candidates.len() {
        let Some(&c) = candidates
            .iter()
            .find(|&&c| m.similarity_to_members(&State::Index(c), &out) < 1.0 - m.tol.tol_eq)
        else {
            return Ok(OrthoSet::from_trusted(out));
        };
        let y = o_project(m, &State::Index(c), &OrthoSet::from_trusted(out.clone()))?;
        if !admissible(&y) || out.contains(&y) {
            return Err(Error::AxiomViolation {
                axiom: Axiom::OProjection,
                witness: format!("o-projection of {c} on {} left the subspace", set_label(&out)),
            });
        }
        out.push(y);
    }
    Err(Error::AxiomViolation {
        axiom: Axiom::OProjection,
        witness: format!("basis completion did not stabilize: {}", set_label(&out)),
    })
}

/// Whether `A` and `B` have the same cardinality. Meant for two bases of the
/// same subspace (see [`same_subspace`]), where equality always holds.
pub fn dimension_check(_m: &SpModel, a: &OrthoSet, b: &OrthoSet) -> bool {
    a.len() == b.len()
}

/// `Ā = B̄`, decided through [`subspace_leq`] in both directions.
pub fn same_subspace(m: &SpModel, a: &OrthoSet, b: &OrthoSet) -> bool {
    subspace_leq(m, a, b) && subspace_leq(m, b, a)
}

/// `X⊥`: the states added when the basis of `X` is completed to a basis of Ω.
pub fn complement(m: &SpModel, x: &Subspace) -> Result<Subspace> {
    let full = extend_to_basis(m, x.basis(), None)?;
    let added = full.into_members().split_off(x.dim());
    Subspace::new(m, OrthoSet::from_trusted(added))
}

fn worst_cross(m: &SpModel, a: &[State], b: &[State]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in a {
        for y in b {
            worst = worst
                .max(m.similarity_unchecked(x, y))
                .max(m.similarity_unchecked(y, x));
        }
    }
    worst
}

/// `X ⊕ Y` for orthogonal subspaces: the union of their bases.
pub fn ortho_sum(m: &SpModel, x: &Subspace, y: &Subspace) -> Result<Subspace> {
    let worst = worst_cross(m, x.basis().members(), y.basis().members());
    if worst > m.tol.tol_orth {
        return Err(Error::NotOrthogonal { worst });
    }
    let mut members = x.basis().members().to_vec();
    members.extend_from_slice(y.basis().members());
    Subspace::new(m, OrthoSet::from_trusted(members))
}

/// Whether two subspaces are orthogonal within `tol_orth`.
pub fn subspaces_orthogonal(m: &SpModel, x: &Subspace, y: &Subspace) -> bool {
    worst_cross(m, x.basis().members(), y.basis().members()) <= m.tol.tol_orth
}

/// `X ∩ Y`. Linear models take the eigenvectors of `P_X P_Y P_X` with
/// eigenvalue at least `1 − tol_eig`, sector by sector; finite models run the
/// greedy o-projection construction over the common members.
pub fn intersection(m: &SpModel, x: &Subspace, y: &Subspace) -> Result<Subspace> {
    match m.layout() {
        Some(layout) => {
            let px = x.projector().expect("linear");
            let py = y.projector().expect("linear");
            let total = layout.total();
            let mut frame: Vec<CVector> = Vec::new();
            let mut members = Vec::new();
            for s in 0..layout.dims().len() {
                let r = layout.range(s);
                let d = r.len();
                let bx = px.view((r.start, r.start), (d, d)).into_owned();
                let by = py.view((r.start, r.start), (d, d)).into_owned();
                let mut mm = &bx * &by * &bx;
                mm = (&mm + mm.adjoint()) * Complex64::new(0.5, 0.0);
                let eig = SymmetricEigen::new(mm);
                for k in 0..d {
                    if eig.eigenvalues[k] < 1.0 - m.tol.tol_eig {
                        continue;
                    }
                    let mut v = CVector::zeros(total);
                    v.rows_mut(r.start, d).copy_from(&eig.eigenvectors.column(k));
                    let v = orthogonal_residual(&v, &frame);
                    if v.norm_squared() <= m.tol.tol_orth {
                        continue;
                    }
                    let v = normalize(v)?;
                    members.push(m.lift(v.clone())?);
                    frame.push(v);
                }
            }
            Subspace::new(m, OrthoSet::from_trusted(members))
        }
        None => {
            let n = m.omega_size().expect("finite model");
            let inside =
                |s: &State| x.p_unchecked(m, s) >= 1.0 - m.tol.tol_eq && y.p_unchecked(m, s) >= 1.0 - m.tol.tol_eq;
            let candidates: Vec<usize> = (0..n).filter(|&c| inside(&State::Index(c))).collect();
            let basis = greedy_complete(m, Vec::new(), &candidates, inside)?;
            Subspace::new(m, basis)
        }
    }
}

/// O-projection computed as a left fold of singleton o-projections over `A`
/// in list order.
pub fn cascade_o_project(m: &SpModel, x: &State, a: &OrthoSet) -> Result<State> {
    m.validate(x)?;
    let pa = m.similarity_to_members(x, a.members());
    if pa >= 1.0 - m.tol.tol_eq {
        return Err(Error::AlreadyInSubspace { p: pa });
    }
    if a.is_empty() {
        return o_project(m, x, a);
    }
    let mut y = x.clone();
    for s in a.iter() {
        y = o_project(m, &y, &OrthoSet::from_trusted(vec![s.clone()]))?;
    }
    Ok(y)
}

/// `Ā ⊆ B̄`, decided as `A ⊆ B̄`.
pub fn subspace_leq(m: &SpModel, a: &OrthoSet, b: &OrthoSet) -> bool {
    a.iter()
        .all(|s| m.validate(s).is_ok() && m.similarity_to_members(s, b.members()) >= 1.0 - m.tol.tol_eq)
}

/// Hermitian-and-idempotent defect of a projector: `max |P − P†|` and
/// `max |P² − P|` entries.
pub fn projector_defect(p: &DMatrix<Complex64>) -> (f64, f64) {
    let herm = (p - p.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let idem = (p * p - p).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (herm, idem)
}
