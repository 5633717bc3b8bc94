//! Two-subspace interference quantities: α, ρ, ω, the Hilbert phase φ, the
//! Inequality margin and the continuity slack.
//!
//! The first term of α is taken as `p(a, Z) p(b, Z) p(t(a, Z), t(b, Z))`.
//! For `a, b ∈ Z̄` this is exactly `p(t(a, Z), t(b, Z))`; outside `Z̄` it is
//! the form under which α and ρ both scale by `p(a, t(a, Z))`, so the
//! Inequality extends to arbitrary `a`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ortho_sum, project, Subspace};
use crate::state::{inner, State};
use crate::structure::SpModel;

/// Orthogonal subspaces `X ⊥ Y` together with `Z = X ⊕ Y`.
#[derive(Debug, Clone)]
pub struct PhaseContext<'m> {
    m: &'m SpModel,
    x: Subspace,
    y: Subspace,
    z: Subspace,
}

/// α, ρ, ω and (linear models) φ for one pair of states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseQuantities {
    pub alpha: f64,
    pub rho: f64,
    pub omega: Option<f64>,
    pub phi: Option<f64>,
}

impl<'m> PhaseContext<'m> {
    /// Fails with [`Error::NotOrthogonal`] unless `X ⊥ Y`.
    pub fn new(m: &'m SpModel, x: Subspace, y: Subspace) -> Result<Self> {
        let z = ortho_sum(m, &x, &y)?;
        Ok(Self { m, x, y, z })
    }

    pub fn model(&self) -> &'m SpModel {
        self.m
    }

    pub fn x(&self) -> &Subspace {
        &self.x
    }

    pub fn y(&self) -> &Subspace {
        &self.y
    }

    pub fn z(&self) -> &Subspace {
        &self.z
    }

    /// `p(a, S) p(b, S) p(t(a, S), t(b, S))`, zero when either projection is
    /// undefined.
    fn weighted(&self, s: &Subspace, a: &State, b: &State) -> Result<f64> {
        let floor = self.m.tolerances().rho_floor;
        let pa = s.similarity(self.m, a)?;
        let pb = s.similarity(self.m, b)?;
        if pa <= floor || pb <= floor {
            return Ok(0.0);
        }
        let ta = project(self.m, a, s)?;
        let tb = project(self.m, b, s)?;
        Ok(pa * pb * self.m.similarity(&ta, &tb)?)
    }

    fn require_in_range(&self, a: &State, b: &State) -> Result<()> {
        let floor = self.m.tolerances().rho_floor;
        for s in [a, b] {
            let p = self.z.similarity(self.m, s)?;
            if p <= floor {
                return Err(Error::OrthogonalToSubspace { p });
            }
        }
        Ok(())
    }

    /// `α_{X,Y}(a, b)`.
    pub fn alpha(&self, a: &State, b: &State) -> Result<f64> {
        self.require_in_range(a, b)?;
        Ok(self.weighted(&self.z, a, b)? - self.weighted(&self.x, a, b)? - self.weighted(&self.y, a, b)?)
    }

    /// `ρ_{X,Y}(a, b) = 2 √(W_X W_Y)` where `W_S = p(a, S) p(b, S) p(t(a, S), t(b, S))`.
    pub fn rho(&self, a: &State, b: &State) -> Result<f64> {
        self.require_in_range(a, b)?;
        let wx = self.weighted(&self.x, a, b)?;
        let wy = self.weighted(&self.y, a, b)?;
        Ok(2.0 * (wx * wy).max(0.0).sqrt())
    }

    /// `ω = α / ρ`, absent when `ρ ≤ rho_floor`.
    pub fn omega(&self, a: &State, b: &State) -> Result<Option<f64>> {
        let rho = self.rho(a, b)?;
        if rho <= self.m.tolerances().rho_floor {
            return Ok(None);
        }
        Ok(Some(self.alpha(a, b)? / rho))
    }

    /// `φ = arg⟨t(a,Y), t(b,Y)⟩ − arg⟨t(a,X), t(b,X)⟩` in `[0, 2π)`. Linear
    /// models only.
    pub fn phase(&self, a: &State, b: &State) -> Result<f64> {
        if !self.m.is_linear() {
            return Err(Error::PhaseUndefined(format!(
                "{} models carry no phases",
                self.m.kind().name()
            )));
        }
        let floor = self.m.tolerances().rho_floor;
        let mut args = [0.0; 2];
        for (slot, s) in [&self.x, &self.y].into_iter().enumerate() {
            for v in [a, b] {
                let p = s.similarity(self.m, v)?;
                if p <= floor {
                    return Err(Error::PhaseUndefined(format!(
                        "state is orthogonal to a subspace (p = {p:.3e})"
                    )));
                }
            }
            let ta = self.m.embed(&project(self.m, a, s)?)?;
            let tb = self.m.embed(&project(self.m, b, s)?)?;
            let c: Complex64 = inner(&ta, &tb);
            if c.norm() <= floor {
                return Err(Error::PhaseUndefined(format!(
                    "projected overlap has modulus {:.3e}",
                    c.norm()
                )));
            }
            args[slot] = c.arg();
        }
        Ok((args[1] - args[0]).rem_euclid(TAU))
    }

    pub fn phase_quantities(&self, a: &State, b: &State) -> Result<PhaseQuantities> {
        let alpha = self.alpha(a, b)?;
        let rho = self.rho(a, b)?;
        let omega = (rho > self.m.tolerances().rho_floor).then(|| alpha / rho);
        let phi = self.phase(a, b).ok();
        Ok(PhaseQuantities { alpha, rho, omega, phi })
    }

    /// Inequality margin `ρ − |α|`. States orthogonal to `Z` give 0, per the
    /// convention that products with undefined projections vanish.
    pub fn check_inequality(&self, a: &State, b: &State) -> Result<f64> {
        match (self.alpha(a, b), self.rho(a, b)) {
            (Ok(alpha), Ok(rho)) => Ok(rho - alpha.abs()),
            (Err(Error::OrthogonalToSubspace { .. }), _) => Ok(0.0),
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }
}

/// Continuity slack `p(y,z) + ½√(1 − p(x,y)) + (1 − p(x,y)) − p(x,z)`.
/// A negative value is a counterexample to the bound.
pub fn continuity_bound(m: &SpModel, x: &State, y: &State, z: &State) -> Result<f64> {
    let gap = (1.0 - m.similarity(x, y)?).max(0.0);
    Ok(m.similarity(y, z)? + 0.5 * gap.sqrt() + gap - m.similarity(x, z)?)
}

/// The near-state family in dimension 2: with `u = e₁`, `v = e₂`,
/// `x = √r u + √(1−r) v` and `y = √(r−ε) u + √(1−r+ε) e^{iδ} v`.
/// Returns `(x, y, u)`; requires `0 < r < 1` and `0 ≤ ε ≤ r`.
pub fn near_states(r: f64, eps: f64, delta: f64) -> Result<(State, State, State)> {
    if !(r > 0.0 && r < 1.0 && eps >= 0.0 && eps <= r) {
        return Err(Error::InvalidState(format!(
            "near-state family needs 0 < r < 1 and 0 ≤ ε ≤ r (r = {r}, ε = {eps})"
        )));
    }
    let x = State::real(&[r.sqrt(), (1.0 - r).sqrt()]);
    let y = State::vector([
        Complex64::new((r - eps).sqrt(), 0.0),
        Complex64::from_polar((1.0 - r + eps).sqrt(), delta),
    ]);
    Ok((x, y, State::basis_vector(2, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_classical, make_hilbert};
    use std::f64::consts::{FRAC_PI_3, PI};

    fn e(d: usize, i: usize) -> State {
        State::basis_vector(d, i)
    }

    fn qubit_ctx(m: &SpModel) -> PhaseContext<'_> {
        let x = Subspace::span(m, vec![e(2, 0)]).unwrap();
        let y = Subspace::span(m, vec![e(2, 1)]).unwrap();
        PhaseContext::new(m, x, y).unwrap()
    }

    #[test]
    fn orthogonal_pair_gives_minus_rho() {
        let m = make_hilbert(2).unwrap();
        let ctx = qubit_ctx(&m);
        let h = 0.5f64.sqrt();
        let a = State::real(&[h, h]);
        let b = State::real(&[h, -h]);
        let q = ctx.phase_quantities(&a, &b).unwrap();
        assert!((q.alpha + 0.5).abs() < 1e-12);
        assert!((q.rho - 0.5).abs() < 1e-12);
        assert!((q.omega.unwrap() + 1.0).abs() < 1e-12);
        assert!((q.phi.unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn diagonal_pair() {
        let m = make_hilbert(2).unwrap();
        let ctx = qubit_ctx(&m);
        let a = State::real(&[0.6, 0.8]);
        let px = 0.36;
        let py = 0.64;
        assert!((ctx.alpha(&a, &a).unwrap() - 2.0 * px * py).abs() < 1e-12);
        assert!((ctx.rho(&a, &a).unwrap() - 2.0 * px * py).abs() < 1e-12);
        assert!((ctx.omega(&a, &a).unwrap().unwrap() - 1.0).abs() < 1e-12);
        assert!(ctx.phase(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn omega_is_cosine_of_relative_phase() {
        let m = make_hilbert(2).unwrap();
        let ctx = qubit_ctx(&m);
        let h = 0.5f64.sqrt();
        let a = State::real(&[h, h]);
        let b = State::vector([Complex64::new(h, 0.0), Complex64::from_polar(h, FRAC_PI_3)]);
        assert!((ctx.omega(&a, &b).unwrap().unwrap() - 0.5).abs() < 1e-12);
        assert!((ctx.phase(&a, &b).unwrap() - FRAC_PI_3).abs() < 1e-12);
        let back = ctx.phase(&b, &a).unwrap();
        assert!((back - (TAU - FRAC_PI_3)).abs() < 1e-12);
    }

    #[test]
    fn rho_vanishes_inside_a_summand() {
        let m = make_hilbert(2).unwrap();
        let ctx = qubit_ctx(&m);
        let b = State::real(&[0.6, 0.8]);
        assert_eq!(ctx.rho(&e(2, 0), &b).unwrap(), 0.0);
        assert!(ctx.omega(&e(2, 0), &b).unwrap().is_none());
        assert!(ctx.alpha(&e(2, 0), &b).unwrap().abs() < 1e-12);
        assert!(matches!(ctx.phase(&e(2, 0), &b), Err(Error::PhaseUndefined(_))));
    }

    #[test]
    fn orthogonal_to_z_is_rejected() {
        let m = make_hilbert(3).unwrap();
        let x = Subspace::span(&m, vec![e(3, 0)]).unwrap();
        let y = Subspace::span(&m, vec![e(3, 1)]).unwrap();
        let ctx = PhaseContext::new(&m, x, y).unwrap();
        assert!(matches!(
            ctx.alpha(&e(3, 2), &e(3, 0)),
            Err(Error::OrthogonalToSubspace { .. })
        ));
        assert_eq!(ctx.check_inequality(&e(3, 2), &e(3, 0)).unwrap(), 0.0);
    }

    #[test]
    fn non_orthogonal_subspaces_are_rejected() {
        let m = make_hilbert(2).unwrap();
        let h = 0.5f64.sqrt();
        let x = Subspace::span(&m, vec![e(2, 0)]).unwrap();
        let y = Subspace::span(&m, vec![State::real(&[h, h])]).unwrap();
        assert!(matches!(PhaseContext::new(&m, x, y), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn classical_alpha_rho_vanish() {
        let m = make_classical(5).unwrap();
        let x = Subspace::span(&m, vec![State::Index(0), State::Index(1)]).unwrap();
        let y = Subspace::span(&m, vec![State::Index(3)]).unwrap();
        let ctx = PhaseContext::new(&m, x, y).unwrap();
        for a in [0, 1, 3] {
            for b in [0, 1, 3] {
                let (a, b) = (State::Index(a), State::Index(b));
                assert_eq!(ctx.alpha(&a, &b).unwrap(), 0.0);
                assert_eq!(ctx.rho(&a, &b).unwrap(), 0.0);
                assert_eq!(ctx.check_inequality(&a, &b).unwrap(), 0.0);
            }
        }
        assert!(ctx.phase(&State::Index(0), &State::Index(0)).is_err());
    }

    #[test]
    fn continuity_with_equal_states() {
        let m = make_hilbert(2).unwrap();
        let x = State::real(&[0.6, 0.8]);
        let z = State::real(&[0.8, 0.6]);
        let s = continuity_bound(&m, &x, &x, &z).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn near_state_gap_is_quarter_of_stated_leading_term() {
        let m = make_hilbert(2).unwrap();
        let (r, eps) = (0.5, 1e-3);
        let (x, y, _) = near_states(r, eps, 0.0).unwrap();
        let gap = 1.0 - m.similarity(&x, &y).unwrap();
        let leading = eps * eps / (4.0 * r * (1.0 - r));
        assert!((gap / leading - 1.0).abs() < 1e-3);
        assert!(near_states(0.0, 0.1, 0.0).is_err());
    }
}
