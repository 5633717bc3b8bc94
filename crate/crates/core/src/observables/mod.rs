//! Observables as state transformations built from eigenvalues and pairwise
//! orthogonal eigensubspaces, their mean values, and the bridge from
//! Hermitian matrices.

pub mod morphism;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::{extend_to_basis, subspaces_orthogonal, OrthoSet, Subspace};
use crate::models::{
    parse_complex, parse_complex_vector, parse_value, schema_array, schema_f64, schema_field, schema_usize,
};
use crate::phases::PhaseContext;
use crate::state::{normalize, orthogonal_residual, CVector, State};
use crate::structure::{Axiom, Repr, SpModel};

pub use morphism::{
    check_invariant_basis, check_morphism, image_is_basis, InvariantBasisOutcome, Morphism, MorphismCheck,
};

/// Tolerance on the ω sign rules.
pub const OMEGA_SIGN_TOL: f64 = 1e-7;

/// One eigenvalue with its eigensubspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPart {
    pub lambda: f64,
    pub subspace: Subspace,
}

/// An observable: distinct bounded eigenvalues on pairwise orthogonal
/// eigensubspaces whose sum is Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    parts: Vec<EigenPart>,
    bound: f64,
    operator: Option<DMatrix<Complex64>>,
}

impl Observable {
    /// Validates nonempty parts, eigenvalues more than `tol_eig` apart,
    /// pairwise orthogonality and completeness.
    pub fn new(m: &SpModel, parts: Vec<(f64, Subspace)>) -> Result<Self> {
        let tol = m.tolerances();
        if parts.is_empty() {
            return Err(Error::InvalidObservable("no eigenspaces".into()));
        }
        for (i, (l, s)) in parts.iter().enumerate() {
            if !l.is_finite() {
                return Err(Error::InvalidObservable(format!("eigenvalue {i} is not finite")));
            }
            if s.dim() == 0 {
                return Err(Error::InvalidObservable(format!("eigenspace {i} is empty")));
            }
            for (j, (l2, s2)) in parts.iter().enumerate().skip(i + 1) {
                if (l - l2).abs() <= tol.tol_eig {
                    return Err(Error::InvalidObservable(format!(
                        "eigenvalues {i} and {j} coincide ({l} vs {l2})"
                    )));
                }
                if !subspaces_orthogonal(m, s, s2) {
                    return Err(Error::InvalidObservable(format!(
                        "eigenspaces {i} and {j} are not orthogonal"
                    )));
                }
            }
        }
        let union: Vec<State> = parts
            .iter()
            .flat_map(|(_, s)| s.basis().members().iter().cloned())
            .collect();
        let n = union.len();
        if extend_to_basis(m, &OrthoSet::from_trusted(union), None)?.len() != n {
            return Err(Error::InvalidObservable(
                "eigenspaces do not sum to the whole space".into(),
            ));
        }
        let bound = parts.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max);
        let operator = m.layout().map(|l| {
            let mut a = DMatrix::<Complex64>::zeros(l.total(), l.total());
            for (lambda, s) in &parts {
                a += s.projector().expect("linear") * Complex64::new(*lambda, 0.0);
            }
            a
        });
        Ok(Self {
            parts: parts
                .into_iter()
                .map(|(lambda, subspace)| EigenPart { lambda, subspace })
                .collect(),
            bound,
            operator,
        })
    }

    /// Classical observable from one value per state: eigenspaces are the
    /// level sets (values within `tol_eig` merged), in order of first
    /// appearance.
    pub fn from_values(m: &SpModel, values: &[f64]) -> Result<Self> {
        let Repr::Classical { n } = m.repr else {
            return Err(Error::Unsupported {
                kind: m.kind().name(),
                what: "value-table observables",
            });
        };
        if values.len() != n {
            return Err(Error::InvalidObservable(format!(
                "expected {n} values, got {}",
                values.len()
            )));
        }
        let mut levels: Vec<(f64, Vec<State>)> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            match levels.iter_mut().find(|(l, _)| (l - v).abs() <= m.tolerances().tol_eig) {
                Some((_, members)) => members.push(State::Index(i)),
                None => levels.push((v, vec![State::Index(i)])),
            }
        }
        let parts = levels
            .into_iter()
            .map(|(l, members)| Ok((l, Subspace::new(m, OrthoSet::from_trusted(members))?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, parts)
    }

    pub fn parts(&self) -> &[EigenPart] {
        &self.parts
    }

    /// The bound `M = max |λ_j|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `Σ λ_j P_j` for linear models.
    pub fn operator(&self) -> Option<&DMatrix<Complex64>> {
        self.operator.as_ref()
    }

    /// All eigenvalues multiplied by `c ≠ 0`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidObservable(format!("cannot rescale by {c}")));
        }
        let z = Complex64::new(c, 0.0);
        Ok(Self {
            parts: self
                .parts
                .iter()
                .map(|p| EigenPart {
                    lambda: p.lambda * c,
                    subspace: p.subspace.clone(),
                })
                .collect(),
            bound: self.bound * c.abs(),
            operator: self.operator.as_ref().map(|a| a * z),
        })
    }

    /// Union of the eigenspace bases: a basis of Ω made of eigenvectors.
    pub fn eigen_basis(&self) -> Vec<State> {
        self.parts
            .iter()
            .flat_map(|p| p.subspace.basis().members().iter().cloned())
            .collect()
    }

    /// Index of the eigenspace containing `a`, if any.
    pub fn eigenspace_of(&self, m: &SpModel, a: &State) -> Option<usize> {
        self.parts
            .iter()
            .position(|p| p.subspace.p_unchecked(m, a) >= 1.0 - m.tolerances().tol_eq)
    }

    /// `Σ_j λ_j² p(a, X_j)`, or zero when it is at most `tol_orth M²`
    /// (below that, `r(a)` cannot be computed to `tol_eq`).
    fn weight(&self, m: &SpModel, a: &State) -> f64 {
        let w: f64 = self
            .parts
            .iter()
            .map(|p| p.lambda * p.lambda * p.subspace.p_unchecked(m, a))
            .sum();
        if w <= m.tolerances().tol_orth * self.bound * self.bound {
            0.0
        } else {
            w
        }
    }
}

/// `r(a)`. Linear models apply `A = Σ λ_j P_j` and renormalize, keeping `a`
/// when `‖A a‖² ≤ tol_orth M²`. Classical models act as the identity. Matrix
/// models search Ω for a state that satisfies the transformation rule on
/// every eigen-basis member.
pub fn apply(m: &SpModel, r: &Observable, a: &State) -> Result<State> {
    m.validate(a)?;
    match &m.repr {
        Repr::Hilbert { .. } | Repr::Sectored { .. } => {
            let v = r.operator().expect("linear") * m.embed(a)?;
            if r.weight(m, a) == 0.0 {
                Ok(a.clone())
            } else {
                m.lift(v)
            }
        }
        Repr::Classical { .. } => Ok(a.clone()),
        Repr::Matrix(mm) => {
            if r.eigenspace_of(m, a).is_some() {
                return Ok(a.clone());
            }
            let mut best = (0, f64::INFINITY);
            for y in 0..mm.n() {
                let d = rule_deviation(m, r, a, &State::Index(y));
                if d < best.1 {
                    best = (y, d);
                }
            }
            if best.1 <= m.tolerances().tol_eq {
                Ok(State::Index(best.0))
            } else {
                Err(Error::AxiomViolation {
                    axiom: Axiom::ObservableLaws,
                    witness: format!(
                        "no image for state {a:?}; best candidate {} misses by {:.3e}",
                        best.0, best.1
                    ),
                })
            }
        }
    }
}

/// Largest deviation of `p(ra, b)` from the transformation rule over the
/// eigen-basis members `b`.
fn rule_deviation(m: &SpModel, r: &Observable, a: &State, ra: &State) -> f64 {
    let w = r.weight(m, a);
    let mut worst: f64 = 0.0;
    for part in r.parts() {
        for b in part.subspace.basis().iter() {
            let pab = m.similarity_unchecked(a, b);
            let expected = if w > 0.0 {
                part.lambda * part.lambda * pab / w
            } else {
                pab
            };
            worst = worst.max((m.similarity_unchecked(ra, b) - expected).abs());
        }
    }
    worst
}

/// Largest deviation of `p(r(a), b)` from
/// `λ_i² p(a, b) / Σ_j λ_j² p(a, X_j)` (or `p(a, b)` when the sum is negligible),
/// over the members `b` of every eigenspace basis.
pub fn item3_deviation(m: &SpModel, r: &Observable, a: &State) -> Result<f64> {
    let ra = apply(m, r, a)?;
    Ok(rule_deviation(m, r, a, &ra))
}

/// The same deviation for an arbitrary `b` lying in eigenspace `i`.
pub fn item3_deviation_at(m: &SpModel, r: &Observable, a: &State, i: usize, b: &State) -> Result<f64> {
    m.validate(b)?;
    let ra = apply(m, r, a)?;
    let w = r.weight(m, a);
    let lambda = r.parts()[i].lambda;
    let pab = m.similarity_unchecked(a, b);
    let expected = if w > 0.0 { lambda * lambda * pab / w } else { pab };
    Ok((m.similarity_unchecked(&ra, b) - expected).abs())
}

/// Outcome of an ω sign-rule check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum OmegaVerdict {
    Pass { deviation: f64 },
    Fail { deviation: f64 },
    Skipped,
}

/// Checks `ω_{X_j,X_k}(r(a), b) = ± ω_{X_j,X_k}(a, b)` with the sign of
/// `λ_j λ_k`. Skipped when an eigenvalue is zero or ω is undefined on both
/// sides. When only one side is defined the check fails if that side's ρ
/// exceeds `√rho_floor` and is skipped otherwise: ρ(r(a), b) is ρ(a, b)
/// scaled by `|λ_j λ_k| / Σ_i λ_i² p(a, X_i)`, so the floor can separate the
/// two sides without any violation.
pub fn check_omega_signs(
    m: &SpModel,
    r: &Observable,
    a: &State,
    b: &State,
    j: usize,
    k: usize,
) -> Result<OmegaVerdict> {
    let (pj, pk) = (&r.parts()[j], &r.parts()[k]);
    let sign = pj.lambda * pk.lambda;
    if j == k || sign == 0.0 {
        return Ok(OmegaVerdict::Skipped);
    }
    let ctx = PhaseContext::new(m, pj.subspace.clone(), pk.subspace.clone())?;
    let ra = apply(m, r, a)?;
    let (before, after) = match (defined_omega(&ctx, a, b)?, defined_omega(&ctx, &ra, b)?) {
        (Some(before), Some(after)) => (before, after),
        (None, None) => return Ok(OmegaVerdict::Skipped),
        (Some(_), None) | (None, Some(_)) => {
            let clear = m.tolerances().rho_floor.sqrt();
            let rho = |s: &State| ctx.rho(s, b).unwrap_or(0.0);
            return Ok(if rho(a).max(rho(&ra)) > clear {
                OmegaVerdict::Fail {
                    deviation: f64::INFINITY,
                }
            } else {
                OmegaVerdict::Skipped
            });
        }
    };
    let expected = if sign > 0.0 { before } else { -before };
    let deviation = (after - expected).abs();
    Ok(if deviation <= OMEGA_SIGN_TOL {
        OmegaVerdict::Pass { deviation }
    } else {
        OmegaVerdict::Fail { deviation }
    })
}

fn defined_omega(ctx: &PhaseContext, a: &State, b: &State) -> Result<Option<f64>> {
    match ctx.omega(a, b) {
        Ok(w) => Ok(w),
        Err(Error::OrthogonalToSubspace { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Whether `r(a) ∼ a` and whether `a` is an eigenvector; the two agree for a
/// lawful observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedPoint {
    pub fixed: bool,
    pub eigenvector: bool,
}

pub fn fixed_point_check(m: &SpModel, r: &Observable, a: &State) -> Result<FixedPoint> {
    let ra = apply(m, r, a)?;
    Ok(FixedPoint {
        fixed: m.states_equivalent(&ra, a),
        eigenvector: r.eigenspace_of(m, a).is_some(),
    })
}

/// Mean value `r̂(x) = Σ_j λ_j p(x, X_j)`.
pub fn mean_value(m: &SpModel, r: &Observable, x: &State) -> Result<f64> {
    m.validate(x)?;
    Ok(r.parts().iter().map(|p| p.lambda * p.subspace.p_unchecked(m, x)).sum())
}

/// `Σ_i r̂(b_i) p(x, b_i)` over a given basis.
pub fn mean_value_via_basis(m: &SpModel, r: &Observable, basis: &[State], x: &State) -> Result<f64> {
    m.validate(x)?;
    basis
        .iter()
        .map(|b| Ok(mean_value(m, r, b)? * m.similarity(x, b)?))
        .sum()
}

/// `(Σ λ_i)(½√(1 − p(x,y)) + (1 − p(x,y))) − (r̂(x) − r̂(y))`.
pub fn mean_continuity_slack(m: &SpModel, r: &Observable, x: &State, y: &State) -> Result<f64> {
    let gap = (1.0 - m.similarity(x, y)?).max(0.0);
    let sum: f64 = r.parts().iter().map(|p| p.lambda).sum();
    Ok(sum * (0.5 * gap.sqrt() + gap) - (mean_value(m, r, x)? - mean_value(m, r, y)?))
}

/// Largest entry of `|H − H†|`.
pub fn hermitian_deviation(h: &DMatrix<Complex64>) -> f64 {
    (h - h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Observable of a Hermitian matrix on a linear model: eigendecompose (block
/// by block for sectored models), cluster eigenvalues within `tol_eig`, and
/// order the parts by decreasing eigenvalue. A cluster within `tol_eig` of
/// zero gets eigenvalue exactly zero.
pub fn hermitian_to_observable(m: &SpModel, h: &DMatrix<Complex64>) -> Result<Observable> {
    let Some(layout) = m.layout() else {
        return Err(Error::Unsupported {
            kind: m.kind().name(),
            what: "Hermitian observables",
        });
    };
    let total = layout.total();
    if h.nrows() != total || h.ncols() != total {
        return Err(Error::InvalidObservable(format!(
            "expected a {total}x{total} matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let tol = m.tolerances();
    let deviation = hermitian_deviation(h);
    if deviation > tol.tol_eq {
        return Err(Error::NotHermitian { deviation });
    }
    let h = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut pairs: Vec<(f64, CVector)> = Vec::with_capacity(total);
    for s in 0..layout.dims().len() {
        let r = layout.range(s);
        for i in 0..total {
            for j in r.clone() {
                if !r.contains(&i) && h[(i, j)].norm() > tol.tol_eq {
                    return Err(Error::InvalidObservable("matrix couples superselection sectors".into()));
                }
            }
        }
        let block = h.view((r.start, r.start), (r.len(), r.len())).into_owned();
        let eig = SymmetricEigen::new(block);
        for k in 0..r.len() {
            let mut v = CVector::zeros(total);
            v.rows_mut(r.start, r.len()).copy_from(&eig.eigenvectors.column(k));
            pairs.push((eig.eigenvalues[k], v));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut clusters: Vec<Vec<(f64, CVector)>> = Vec::new();
    for (l, v) in pairs {
        match clusters.last_mut() {
            Some(c) if c.last().expect("nonempty").0 - l <= tol.tol_eig => c.push((l, v)),
            _ => clusters.push(vec![(l, v)]),
        }
    }
    let mut frame: Vec<CVector> = Vec::with_capacity(total);
    let mut parts = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mut lambda = c.iter().map(|(l, _)| l).sum::<f64>() / c.len() as f64;
        if lambda.abs() <= tol.tol_eig {
            lambda = 0.0;
        }
        let mut members = Vec::with_capacity(c.len());
        for (_, v) in c {
            let v = normalize(orthogonal_residual(&v, &frame))?;
            members.push(m.lift(v.clone())?);
            frame.push(v);
        }
        parts.push((lambda, Subspace::new(m, OrthoSet::from_trusted(members))?));
    }
    Observable::new(m, parts)
}

fn parse_member(m: &SpModel, v: &Value) -> Result<State> {
    let s = match v {
        Value::Number(_) => State::Index(schema_usize(v, "basis index")?),
        _ => {
            let amps = parse_complex_vector(v, "basis vector")?;
            match &m.repr {
                Repr::Hilbert { .. } => State::Vector(amps),
                Repr::Sectored { layout } => {
                    if amps.len() != layout.total() {
                        return Err(Error::SchemaError(format!(
                            "basis vector has {} entries, expected {}",
                            amps.len(),
                            layout.total()
                        )));
                    }
                    if (amps.norm_squared() - 1.0).abs() > m.tolerances().tol_eq {
                        return Err(Error::InvalidState("basis vector is not a unit vector".into()));
                    }
                    m.lift(amps)?
                }
                _ => return Err(Error::SchemaError("finite models take integer basis entries".into())),
            }
        }
    };
    m.validate(&s)?;
    Ok(s)
}

/// Parses an observable fixture: `{"kind":"hermitian","dim":d,"matrix":…}` or
/// `{"kind":"spectral","parts":[{"lambda":x,"basis":[…]},…]}`.
pub fn load_observable(m: &SpModel, bytes: &[u8]) -> Result<Observable> {
    let v = parse_value(bytes)?;
    let kind = schema_field(&v, "kind")?
        .as_str()
        .ok_or_else(|| Error::SchemaError("kind must be a string".into()))?;
    match kind {
        "hermitian" => {
            let d = schema_usize(schema_field(&v, "dim")?, "dim")?;
            let rows = schema_array(schema_field(&v, "matrix")?, "matrix")?;
            if rows.len() != d {
                return Err(Error::SchemaError(format!(
                    "matrix has {} rows, expected {d}",
                    rows.len()
                )));
            }
            let mut h = DMatrix::<Complex64>::zeros(d, d);
            for (i, row) in rows.iter().enumerate() {
                let row = schema_array(row, "matrix row")?;
                if row.len() != d {
                    return Err(Error::SchemaError(format!(
                        "row {i} has {} entries, expected {d}",
                        row.len()
                    )));
                }
                for (j, z) in row.iter().enumerate() {
                    h[(i, j)] = parse_complex(z, "matrix entry")?;
                }
            }
            hermitian_to_observable(m, &h)
        }
        "spectral" => {
            let parts = schema_array(schema_field(&v, "parts")?, "parts")?
                .iter()
                .map(|p| {
                    let lambda = schema_f64(schema_field(p, "lambda")?, "lambda")?;
                    let basis = schema_array(schema_field(p, "basis")?, "basis")?
                        .iter()
                        .map(|b| parse_member(m, b))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((lambda, Subspace::span(m, basis)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Observable::new(m, parts)
        }
        other => Err(Error::SchemaError(format!("unknown observable kind {other:?}"))),
    }
}
