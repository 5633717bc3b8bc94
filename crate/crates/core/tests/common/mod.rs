//! Reference arithmetic on plain complex slices, independent of the
//! library's linear algebra.

#![allow(dead_code)]

use sp_structure::{Complex64, State};

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn real(v: &[f64]) -> Vec<C> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

pub fn amps(s: &State) -> Vec<C> {
    s.amplitudes().expect("vector state").iter().copied().collect()
}

pub fn state(v: &[C]) -> State {
    State::vector(v.iter().copied())
}

/// `⟨a, b⟩`, conjugating `a`.
pub fn ip(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn prob(a: &[C], b: &[C]) -> f64 {
    ip(a, b).norm_sqr()
}

pub fn prob_set(x: &[C], set: &[Vec<C>]) -> f64 {
    set.iter().map(|s| prob(s, x)).sum()
}

pub fn norm(a: &[C]) -> f64 {
    ip(a, a).re.sqrt()
}

pub fn scale(a: &[C], k: C) -> Vec<C> {
    a.iter().map(|x| x * k).collect()
}

/// `x − Σ ⟨s, x⟩ s` over an orthonormal list, normalized.
pub fn residual(x: &[C], set: &[Vec<C>]) -> Vec<C> {
    let mut r = x.to_vec();
    for s in set {
        let k = ip(s, x);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri -= k * si;
        }
    }
    let n = norm(&r);
    scale(&r, c(1.0 / n, 0.0))
}

/// Component of `x` in the span of an orthonormal list, normalized.
pub fn projection(x: &[C], set: &[Vec<C>]) -> Vec<C> {
    let mut r = vec![c(0.0, 0.0); x.len()];
    for s in set {
        let k = ip(s, x);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri += k * si;
        }
    }
    let n = norm(&r);
    scale(&r, c(1.0 / n, 0.0))
}

pub fn equivalent(a: &[C], b: &[C], tol: f64) -> bool {
    prob(a, b) >= 1.0 - tol
}

pub fn e(d: usize, i: usize) -> Vec<C> {
    (0..d).map(|k| c(if k == i { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// α for `X = span{e₁}`, `Y = span{e₂}` in dimension two:
/// `2 Re(ā₀ b₀ a₁ b̄₁)`.
pub fn alpha_qubit(a: &[C], b: &[C]) -> f64 {
    2.0 * (a[0].conj() * b[0] * a[1] * b[1].conj()).re
}

/// ρ for the same split: `2 |a₀ b₀ a₁ b₁|`.
pub fn rho_qubit(a: &[C], b: &[C]) -> f64 {
    2.0 * a[0].norm() * b[0].norm() * a[1].norm() * b[1].norm()
}
