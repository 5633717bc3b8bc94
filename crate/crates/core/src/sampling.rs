//! Seeded random states, frames, ortho-sets, unitaries and Hermitian
//! matrices.
//!
//! Every sample draws from its own ChaCha8 stream derived from
//! `(seed, stream, index)`, so results do not depend on evaluation order or
//! on how samples are batched across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{OrthoSet, Subspace};
use crate::state::{normalize, orthogonal_residual, CVector, State};
use crate::structure::{Repr, SpModel};

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for sample `index` of `stream` under `seed`.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(splitmix(seed) ^ stream) ^ index))
}

/// Standard complex Gaussian vector (independent real and imaginary parts).
pub fn gaussian_vector(d: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unit vector in `ℂ^d`.
pub fn haar_vector(d: usize, rng: &mut impl Rng) -> CVector {
    loop {
        if let Ok(v) = normalize(gaussian_vector(d, rng)) {
            return v;
        }
    }
}

/// Haar-random unitary, built by Gram-Schmidt on Gaussian columns.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let mut cols: Vec<CVector> = Vec::with_capacity(d);
    while cols.len() < d {
        let r = orthogonal_residual(&gaussian_vector(d, rng), &cols);
        if r.norm_squared() > 1e-6 {
            cols.push(normalize(r).expect("nonzero residual"));
        }
    }
    DMatrix::from_columns(&cols)
}

/// Random Hermitian matrix `(G + G†) / 2` with Gaussian `G`.
pub fn random_hermitian(d: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `U diag(λ) U†` for a Haar-random `U`.
pub fn hermitian_with_spectrum(spectrum: &[f64], rng: &mut impl Rng) -> DMatrix<Complex64> {
    let d = spectrum.len();
    let u = haar_unitary(d, rng);
    let diag = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(spectrum[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &u * diag * u.adjoint()
}

/// A random state of `m`: Haar within a linear model (the sector of a
/// sectored model drawn with probability proportional to its dimension),
/// uniform over Ω for a finite model.
pub fn random_state(m: &SpModel, rng: &mut impl Rng) -> State {
    match &m.repr {
        Repr::Classical { n } => State::Index(rng.random_range(0..*n)),
        Repr::Matrix(mm) => State::Index(rng.random_range(0..mm.n())),
        Repr::Hilbert { layout, .. } => State::Vector(haar_vector(layout.total(), rng)),
        Repr::Sectored { layout } => {
            let i = rng.random_range(0..layout.total());
            let s = layout.sector_of_index(i);
            State::Sectored {
                sector: s,
                amplitudes: haar_vector(layout.dims()[s], rng),
            }
        }
    }
}

/// A random orthonormal basis of Ω. Linear models rotate the canonical basis
/// by a Haar unitary (sector by sector); finite models return a random
/// maximal ortho-set built greedily from a shuffled Ω.
pub fn random_frame(m: &SpModel, rng: &mut impl Rng) -> Vec<State> {
    match &m.repr {
        Repr::Hilbert { layout, .. } => {
            let u = haar_unitary(layout.total(), rng);
            (0..layout.total())
                .map(|k| State::Vector(u.column(k).into_owned()))
                .collect()
        }
        Repr::Sectored { layout } => {
            let mut out = Vec::with_capacity(layout.total());
            for (s, &d) in layout.dims().iter().enumerate() {
                let u = haar_unitary(d, rng);
                for k in 0..d {
                    out.push(State::Sectored {
                        sector: s,
                        amplitudes: u.column(k).into_owned(),
                    });
                }
            }
            out.shuffle(rng);
            out
        }
        Repr::Classical { .. } | Repr::Matrix(_) => random_clique(m, rng),
    }
}

fn random_clique(m: &SpModel, rng: &mut impl Rng) -> Vec<State> {
    let n = m.omega_size().expect("finite model");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut out: Vec<State> = Vec::new();
    for i in order {
        let s = State::Index(i);
        let ok = out
            .iter()
            .all(|t| m.similarity_unchecked(&s, t).max(m.similarity_unchecked(t, &s)) <= m.tol.tol_orth);
        if ok {
            out.push(s);
        }
    }
    out
}

/// A random subset of a random frame with size uniform in `min..=max`
/// (clamped to the frame size).
pub fn random_ortho_set(m: &SpModel, min: usize, max: usize, rng: &mut impl Rng) -> OrthoSet {
    let frame = random_frame(m, rng);
    let hi = max.min(frame.len());
    let lo = min.min(hi);
    let k = rng.random_range(lo..=hi);
    OrthoSet::from_trusted(frame.into_iter().take(k).collect())
}

fn sector_of(s: &State) -> Option<usize> {
    match s {
        State::Sectored { sector, .. } => Some(*sector),
        _ => None,
    }
}

/// A random member of `X̄`: a Gaussian combination of the basis for linear
/// models, a uniformly chosen member of `Ā` for finite ones. In a sectored
/// model the combination is confined to one sector, chosen with probability
/// proportional to the number of basis members it holds. `None` for the
/// zero subspace.
pub fn random_member(m: &SpModel, x: &Subspace, rng: &mut impl Rng) -> Option<State> {
    if x.dim() == 0 {
        return None;
    }
    let pick = x.basis().members().choose(rng).and_then(sector_of);
    random_member_in(m, x, pick, rng)
}

/// [`random_member`] restricted to one sector (`None`: unrestricted). `None`
/// when `X̄` has no member there.
fn random_member_in(m: &SpModel, x: &Subspace, sector: Option<usize>, rng: &mut impl Rng) -> Option<State> {
    match m.layout() {
        Some(layout) => {
            let basis: Vec<CVector> = x
                .basis()
                .iter()
                .filter(|b| sector.is_none() || sector_of(b) == sector)
                .map(|b| m.embed(b).expect("valid basis"))
                .collect();
            if basis.is_empty() {
                return None;
            }
            loop {
                let mut v = CVector::zeros(layout.total());
                for b in &basis {
                    let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                    v.axpy(c, b, Complex64::new(1.0, 0.0));
                }
                if let Ok(s) = m.lift(v) {
                    return Some(s);
                }
            }
        }
        None => {
            let n = m.omega_size().expect("finite model");
            let members: Vec<usize> = (0..n)
                .filter(|&i| x.p_unchecked(m, &State::Index(i)) >= 1.0 - m.tol.tol_eq)
                .collect();
            members.choose(rng).map(|&i| State::Index(i))
        }
    }
}

/// A state near `x`: `x + η g` renormalized, with `g` Gaussian. Finite
/// models return `x`.
pub fn nearby_state(m: &SpModel, x: &State, eta: f64, rng: &mut impl Rng) -> State {
    match m.layout() {
        Some(_) => {
            let mut v = x.amplitudes().expect("linear state").clone();
            v += gaussian_vector(v.len(), rng) * Complex64::new(eta, 0.0);
            match (x, normalize(v)) {
                (State::Sectored { sector, .. }, Ok(v)) => State::Sectored {
                    sector: *sector,
                    amplitudes: v,
                },
                (_, Ok(v)) => State::Vector(v),
                (_, Err(_)) => x.clone(),
            }
        }
        None => x.clone(),
    }
}

/// A state with `p(x, X) ≈ 1 − gap`: a member of `X̄` mixed with a member of
/// `X⊥` from the same sector at the given weight. Returns the member of `X̄`
/// alone when there is no such partner, and a random state when `X` is zero.
pub fn state_near_subspace(m: &SpModel, inside: &Subspace, outside: &Subspace, gap: f64, rng: &mut impl Rng) -> State {
    let a = random_member(m, inside, rng);
    let b = a.as_ref().and_then(|a| random_member_in(m, outside, sector_of(a), rng));
    match (a, b) {
        (Some(a), Some(b)) if m.is_linear() => {
            let (Ok(va), Ok(vb)) = (m.embed(&a), m.embed(&b)) else {
                return a;
            };
            let v = va * Complex64::new((1.0 - gap).sqrt(), 0.0) + vb * Complex64::new(gap.sqrt(), 0.0);
            m.lift(v).unwrap_or(a)
        }
        (Some(a), _) => a,
        _ => random_state(m, rng),
    }
}
