//! Per-axiom probes.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{min_probe, scan, Outcome, Probe};
use crate::checker::CheckConfig;
use crate::error::Result;
use crate::geometry::{complement, extend_to_basis, o_project, o_projection_search, project, OrthoSet, Subspace};
use crate::observables::{
    apply, check_invariant_basis, check_morphism, check_omega_signs, fixed_point_check, hermitian_to_observable,
    image_is_basis, item3_deviation, item3_deviation_at, mean_value, InvariantBasisOutcome, Morphism, Observable,
    OmegaVerdict, OMEGA_SIGN_TOL,
};
use crate::phases::{continuity_bound, near_states, PhaseContext};
use crate::sampling::{
    haar_unitary, hermitian_with_spectrum, nearby_state, random_frame, random_member, random_state, sample_rng,
    state_near_subspace,
};
use crate::state::{states_json, CVector, State};
use crate::structure::{Axiom, SpModel};

/// Largest number of ortho-sets enumerated exactly on a finite model.
pub(crate) const ORTHO_SET_LIMIT: usize = 4096;
/// Largest `(X, Y)` split count for the exact Inequality check.
pub(crate) const SPLIT_LIMIT: usize = 1024;
/// Largest triple count for the exact Continuity check.
pub(crate) const TRIPLE_LIMIT: usize = 200_000;
/// Largest Ω for which morphism checks use every state.
const MORPHISM_ALL_STATES: usize = 64;

pub(crate) struct Plan<'a> {
    m: &'a SpModel,
    samples: usize,
    seed: u64,
    frac: f64,
    round: u64,
    observable: Option<&'a Observable>,
    cliques: Option<Vec<Vec<usize>>>,
}

fn pf(m: &SpModel, i: usize, j: usize) -> f64 {
    m.similarity_unchecked(&State::Index(i), &State::Index(j))
}

fn index_states(ix: &[usize]) -> Vec<State> {
    ix.iter().map(|&i| State::Index(i)).collect()
}

/// Every ortho-set of a finite model (the empty one first, then in
/// lexicographic order), or `None` past `limit`.
pub(crate) fn enumerate_ortho_sets(m: &SpModel, limit: usize) -> Option<Vec<Vec<usize>>> {
    let n = m.omega_size()?;
    let tol = m.tolerances().tol_orth;
    let orth: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && pf(m, i, j).max(pf(m, j, i)) <= tol).collect())
        .collect();
    fn grow(orth: &[Vec<bool>], cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>, limit: usize) -> bool {
        for k in start..orth.len() {
            if cur.iter().all(|&c| orth[c][k]) {
                cur.push(k);
                out.push(cur.clone());
                if out.len() > limit || !grow(orth, cur, k + 1, out, limit) {
                    return false;
                }
                cur.pop();
            }
        }
        true
    }
    let mut out = vec![Vec::new()];
    grow(&orth, &mut Vec::new(), 0, &mut out, limit).then_some(out)
}

fn power_of_ten(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    10f64.powi(-rng.random_range(lo..=hi))
}

fn finite_margin(m: &SpModel, x: usize, a: &[State]) -> (usize, f64) {
    o_projection_search(m, x, a)
}

/// The state maximizing `p(x, z) − p(y, z)`: the top eigenvector of
/// `|x⟩⟨x| − |y⟩⟨y|`.
fn separating_state(m: &SpModel, x: &State, y: &State) -> Option<State> {
    let (vx, vy) = (m.embed(x).ok()?, m.embed(y).ok()?);
    let h: DMatrix<Complex64> = &vx * vx.adjoint() - &vy * vy.adjoint();
    let eig = SymmetricEigen::new(h);
    let k = eig.eigenvalues.imax();
    m.lift(eig.eigenvectors.column(k).into_owned()).ok()
}

impl<'a> Plan<'a> {
    pub(crate) fn new(m: &'a SpModel, cfg: &'a CheckConfig, frac: f64, round: u64) -> Self {
        Self {
            m,
            samples: cfg.samples,
            seed: cfg.seed,
            frac,
            round,
            observable: cfg.observable.as_ref(),
            cliques: enumerate_ortho_sets(m, ORTHO_SET_LIMIT),
        }
    }

    pub(crate) fn run(&self, axiom: Axiom) -> Outcome {
        match axiom {
            Axiom::Symmetry => self.symmetry(),
            Axiom::NonNegativity => self.non_negativity(),
            Axiom::Boundedness => self.boundedness(),
            Axiom::OProjection => self.o_projection(),
            Axiom::Factorization => self.factorization(),
            Axiom::Inequality => self.inequality(),
            Axiom::Continuity => self.continuity(),
            Axiom::ObservableLaws => self.observable_laws(),
            Axiom::MorphismLaws => self.morphism_laws(),
        }
    }

    fn rng(&self, axiom: Axiom, i: usize) -> ChaCha8Rng {
        sample_rng(self.seed, ((axiom as u64) << 16) | self.round, i as u64)
    }

    fn adversarial(&self, rng: &mut ChaCha8Rng) -> bool {
        self.frac > 0.0 && rng.random_bool(self.frac)
    }

    fn tol_eq(&self) -> f64 {
        self.m.tolerances().tol_eq
    }

    /// Runs `f` on `samples` seeded generators; errors count as violations.
    fn sampled<F>(&self, axiom: Axiom, f: F) -> Outcome
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Option<Probe>> + Sync + Send,
    {
        scan(self.samples, |i| {
            let mut rng = self.rng(axiom, i);
            f(&mut rng).unwrap_or_else(|e| Some(Probe::error(&e, Value::Null)))
        })
    }

    fn exact<F>(count: usize, f: F) -> Outcome
    where
        F: Fn(usize) -> Result<Option<Probe>> + Sync + Send,
    {
        scan(count, |i| {
            f(i).unwrap_or_else(|e| Some(Probe::error(&e, json!({ "config": i }))))
        })
    }

    /// A random basis split as `(first k, rest)` with `k` in `lo..=hi`.
    fn split_frame(&self, rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> (Vec<State>, Vec<State>) {
        let mut f = random_frame(self.m, rng);
        let hi = hi.min(f.len());
        let lo = lo.min(hi);
        let k = rng.random_range(lo..=hi);
        let rest = f.split_off(k);
        (f, rest)
    }

    fn span(&self, states: Vec<State>) -> Result<Subspace> {
        Subspace::new(self.m, OrthoSet::from_trusted(states))
    }

    fn symmetry(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        if let Some(n) = m.omega_size() {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
            return Self::exact(pairs.len(), |k| {
                let (i, j) = pairs[k];
                let (a, b) = (pf(m, i, j), pf(m, j, i));
                Ok(Some(Probe::new(
                    -(a - b).abs(),
                    tol,
                    json!({ "x": i, "y": j, "p_xy": a, "p_yx": b }),
                )))
            });
        }
        self.sampled(Axiom::Symmetry, |rng| {
            let x = random_state(m, rng);
            let y = if self.adversarial(rng) {
                let eta = power_of_ten(rng, 1, 6);
                nearby_state(m, &x, eta, rng)
            } else {
                random_state(m, rng)
            };
            let (a, b) = (m.similarity(&x, &y)?, m.similarity(&y, &x)?);
            Ok(Some(Probe::new(
                -(a - b).abs(),
                tol,
                json!({ "x": x.to_json(), "y": y.to_json(), "p_xy": a, "p_yx": b }),
            )))
        })
    }

    fn non_negativity(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        if let Some(n) = m.omega_size() {
            return Self::exact(n * n, |k| {
                let (i, j) = (k / n, k % n);
                let p = pf(m, i, j);
                Ok(Some(Probe::new(p, tol, json!({ "x": i, "y": j, "p": p }))))
            });
        }
        self.sampled(Axiom::NonNegativity, |rng| {
            let (x, y) = if self.adversarial(rng) {
                let f = random_frame(m, rng);
                let eta = power_of_ten(rng, 3, 9);
                (f[0].clone(), nearby_state(m, &f[1 % f.len()], eta, rng))
            } else {
                (random_state(m, rng), random_state(m, rng))
            };
            let p = m.similarity(&x, &y)?;
            Ok(Some(Probe::new(
                p,
                tol,
                json!({ "x": x.to_json(), "y": y.to_json(), "p": p }),
            )))
        })
    }

    fn boundedness_probe(&self, x: &State, a: &[State], witness: Value) -> Result<Probe> {
        let m = self.m;
        let tol = self.tol_eq();
        let p = m.similarity_to_states(x, a)?;
        let pxx = m.similarity(x, x)?;
        let mut w = witness;
        w["p_xA"] = json!(p);
        w["p_xx"] = json!(pxx);
        Ok(min_probe([
            Probe::new(1.0 - p, a.len().max(1) as f64 * tol, w.clone()),
            Probe::new(-(pxx - 1.0).abs(), tol, w),
        ])
        .expect("two probes"))
    }

    fn boundedness(&self) -> Outcome {
        let m = self.m;
        if let (Some(n), Some(cliques)) = (m.omega_size(), &self.cliques) {
            let c = cliques.len();
            return Self::exact(n * c, |k| {
                let (x, a) = (k / c, &cliques[k % c]);
                self.boundedness_probe(&State::Index(x), &index_states(a), json!({ "x": x, "A": a }))
                    .map(Some)
            });
        }
        self.sampled(Axiom::Boundedness, |rng| {
            let d = m.dimension().unwrap_or(1);
            let (a, rest) = self.split_frame(rng, 0, d);
            let x = if self.adversarial(rng) {
                let gap = power_of_ten(rng, 2, 12);
                state_near_subspace(m, &self.span(a.clone())?, &self.span(rest)?, gap, rng)
            } else {
                random_state(m, rng)
            };
            let w = json!({ "x": x.to_json(), "A": states_json(&a) });
            self.boundedness_probe(&x, &a, w).map(Some)
        })
    }

    /// Violation of the o-projection postcondition at `x` for the ortho-set
    /// `a` (which `x` is not already in).
    fn o_projection_probe(&self, x: &State, a: &[State], pa: f64, witness: Value) -> Result<Probe> {
        let m = self.m;
        let mut w = witness;
        w["p_xA"] = json!(pa);
        let violation = match x {
            State::Index(i) => {
                let (y, v) = finite_margin(m, *i, a);
                w["y"] = json!(y);
                v
            }
            _ => {
                let y = o_project(m, x, &OrthoSet::from_trusted(a.to_vec()))?;
                let pya = m.similarity_to_states(&y, a)?;
                let pxy = m.similarity(x, &y)?;
                w["y"] = y.to_json();
                pya.max((pa + pxy - 1.0).abs())
            }
        };
        w["violation"] = json!(violation);
        Ok(Probe::new(-violation, self.tol_eq(), w))
    }

    fn o_projection(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        if let (Some(n), Some(cliques)) = (m.omega_size(), &self.cliques) {
            let nonempty: Vec<&Vec<usize>> = cliques.iter().filter(|c| !c.is_empty()).collect();
            let c = nonempty.len();
            return Self::exact(n * c, |k| {
                let (x, a) = (k / c, nonempty[k % c]);
                let states = index_states(a);
                let pa = m.similarity_to_members(&State::Index(x), &states);
                if pa >= 1.0 - tol {
                    return Ok(None);
                }
                self.o_projection_probe(&State::Index(x), &states, pa, json!({ "x": x, "A": a }))
                    .map(Some)
            });
        }
        let d = m.dimension().unwrap_or(1);
        self.sampled(Axiom::OProjection, |rng| {
            if d < 2 {
                return Ok(None);
            }
            let (a, rest) = self.split_frame(rng, 1, d - 1);
            let x = if self.adversarial(rng) {
                let gap = power_of_ten(rng, 2, 8);
                state_near_subspace(m, &self.span(a.clone())?, &self.span(rest)?, gap, rng)
            } else {
                random_state(m, rng)
            };
            let pa = m.similarity_to_states(&x, &a)?;
            if pa >= 1.0 - tol {
                return Ok(None);
            }
            let w = json!({ "x": x.to_json(), "A": states_json(&a) });
            self.o_projection_probe(&x, &a, pa, w).map(Some)
        })
    }

    fn factorization(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        if let (Some(n), Some(cliques)) = (m.omega_size(), &self.cliques) {
            let nonempty: Vec<&Vec<usize>> = cliques.iter().filter(|c| !c.is_empty()).collect();
            let c = nonempty.len();
            return Self::exact(n * c, |k| {
                let (x, a) = (k / c, nonempty[k % c]);
                let states = index_states(a);
                let pa = m.similarity_to_members(&State::Index(x), &states);
                let members: Vec<usize> = (0..n)
                    .filter(|&i| m.similarity_to_members(&State::Index(i), &states) >= 1.0 - tol)
                    .collect();
                let mut best: Option<(usize, usize, f64)> = None;
                for &y in members.iter().filter(|&&y| (pf(m, x, y) - pa).abs() <= tol) {
                    let (mut zw, mut worst) = (y, 0.0f64);
                    for &z in &members {
                        let dev = (pf(m, x, z) - pf(m, x, y) * pf(m, y, z)).abs();
                        if dev > worst {
                            (zw, worst) = (z, dev);
                        }
                    }
                    if best.is_none_or(|b| worst < b.2) {
                        best = Some((y, zw, worst));
                    }
                }
                let w = json!({ "x": x, "A": a, "p_xA": pa });
                Ok(Some(match best {
                    Some((y, z, dev)) => {
                        let mut w = w;
                        w["y"] = json!(y);
                        w["z"] = json!(z);
                        w["deviation"] = json!(dev);
                        Probe::new(-dev, tol, w)
                    }
                    None => {
                        let miss = members
                            .iter()
                            .map(|&y| (pf(m, x, y) - pa).abs())
                            .fold(f64::INFINITY, f64::min);
                        let mut w = w;
                        w["no_projection"] = json!(miss);
                        Probe::new(-miss.min(1.0), tol, w)
                    }
                }))
            });
        }
        let d = m.dimension().unwrap_or(1);
        self.sampled(Axiom::Factorization, |rng| {
            let (a, rest) = self.split_frame(rng, 1, d);
            let x_sub = self.span(a.clone())?;
            let x = if self.adversarial(rng) {
                let gap = power_of_ten(rng, 2, 10);
                state_near_subspace(m, &self.span(rest)?, &x_sub, gap, rng)
            } else {
                random_state(m, rng)
            };
            let px = x_sub.similarity(m, &x)?;
            if px <= m.tolerances().rho_floor {
                return Ok(None);
            }
            let t = project(m, &x, &x_sub)?;
            let z = random_member(m, &x_sub, rng).expect("nonempty subspace");
            let pxt = m.similarity(&x, &t)?;
            let dev = (pxt - px)
                .abs()
                .max((m.similarity(&x, &z)? - pxt * m.similarity(&t, &z)?).abs());
            Ok(Some(Probe::new(
                -dev,
                tol,
                json!({
                    "x": x.to_json(), "A": states_json(&a), "t": t.to_json(), "z": z.to_json(),
                    "p_xX": px, "deviation": dev,
                }),
            )))
        })
    }

    fn inequality_probe(&self, ctx: &PhaseContext, a: &State, b: &State, witness: Value) -> Result<Probe> {
        let margin = ctx.check_inequality(a, b)?;
        let mut w = witness;
        w["margin"] = json!(margin);
        Ok(Probe::new(margin, self.tol_eq(), w))
    }

    fn inequality(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        if let (Some(n), Some(cliques)) = (m.omega_size(), &self.cliques) {
            let splits: Vec<(usize, u64)> = cliques
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_empty() && c.len() < 20)
                .flat_map(|(i, c)| (0..(1u64 << c.len())).map(move |mask| (i, mask)))
                .take(SPLIT_LIMIT + 1)
                .collect();
            if splits.len() <= SPLIT_LIMIT {
                return Self::exact(splits.len(), |k| {
                    let (ci, mask) = splits[k];
                    let c = &cliques[ci];
                    let (xs, ys): (Vec<usize>, Vec<usize>) =
                        (0..c.len()).partition::<Vec<usize>, _>(|&b| mask >> b & 1 == 1);
                    let xs: Vec<usize> = xs.iter().map(|&b| c[b]).collect();
                    let ys: Vec<usize> = ys.iter().map(|&b| c[b]).collect();
                    let ctx = PhaseContext::new(m, self.span(index_states(&xs))?, self.span(index_states(&ys))?)?;
                    let zbar: Vec<usize> = (0..n)
                        .filter(|&i| ctx.z().p_unchecked(m, &State::Index(i)) >= 1.0 - tol)
                        .collect();
                    let mut worst: Option<Probe> = None;
                    for a in 0..n {
                        for &b in &zbar {
                            let w = json!({ "X": xs, "Y": ys, "a": a, "b": b });
                            let p = self.inequality_probe(&ctx, &State::Index(a), &State::Index(b), w)?;
                            worst = min_probe(worst.into_iter().chain([p]));
                        }
                    }
                    Ok(worst)
                });
            }
        }
        self.sampled(Axiom::Inequality, |rng| {
            let frame = random_frame(m, rng);
            let d = frame.len();
            let mut kx = rng.random_range(0..=d);
            let ky = rng.random_range(0..=d - kx);
            if kx + ky == 0 {
                kx = 1;
            }
            let xs = frame[..kx].to_vec();
            let ys = frame[kx..kx + ky].to_vec();
            let rest = frame[kx + ky..].to_vec();
            let ctx = PhaseContext::new(m, self.span(xs.clone())?, self.span(ys.clone())?)?;
            let adversarial = self.adversarial(rng);
            let a = if adversarial && !rest.is_empty() {
                let gap = power_of_ten(rng, 1, 10);
                let inside = if rng.random_bool(0.5) { ctx.x() } else { ctx.y() };
                state_near_subspace(m, inside, &self.span(rest)?, gap, rng)
            } else {
                random_state(m, rng)
            };
            let b = if adversarial {
                let gap = power_of_ten(rng, 1, 10);
                state_near_subspace(m, ctx.x(), ctx.y(), gap, rng)
            } else {
                random_member(m, ctx.z(), rng).expect("nonempty Z")
            };
            let w = json!({
                "X": states_json(&xs), "Y": states_json(&ys), "a": a.to_json(), "b": b.to_json(),
            });
            self.inequality_probe(&ctx, &a, &b, w).map(Some)
        })
    }

    fn continuity(&self) -> Outcome {
        let m = self.m;
        let tol = self.tol_eq();
        let probe = |x: &State, y: &State, z: &State, w: Value| -> Result<Probe> {
            let slack = continuity_bound(m, x, y, z)?;
            let mut w = w;
            w["slack"] = json!(slack);
            Ok(Probe::new(slack, tol, w))
        };
        if let Some(n) = m.omega_size() {
            if n.saturating_mul(n).saturating_mul(n) <= TRIPLE_LIMIT {
                return Self::exact(n * n * n, |k| {
                    let (x, y, z) = (k / (n * n), k / n % n, k % n);
                    let w = json!({ "x": x, "y": y, "z": z });
                    probe(&State::Index(x), &State::Index(y), &State::Index(z), w).map(Some)
                });
            }
        }
        self.sampled(Axiom::Continuity, |rng| {
            let x = random_state(m, rng);
            let (y, z) = if self.adversarial(rng) {
                let eta = power_of_ten(rng, 1, 4);
                let y = nearby_state(m, &x, eta, rng);
                let z = separating_state(m, &x, &y).unwrap_or_else(|| random_state(m, rng));
                (y, z)
            } else {
                (random_state(m, rng), random_state(m, rng))
            };
            let w = json!({ "x": x.to_json(), "y": y.to_json(), "z": z.to_json() });
            probe(&x, &y, &z, w).map(Some)
        })
    }

    /// Observable for the ObservableLaws check: the configured one, else a
    /// seeded random one with small integer eigenvalues (so that degenerate
    /// and zero eigenvalues occur).
    fn default_observable(&self) -> Result<Option<Observable>> {
        let m = self.m;
        let mut rng = sample_rng(self.seed, ((Axiom::ObservableLaws as u64) << 16) | 0xffff, 0);
        let spectrum = |d: usize, rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..d).map(|_| f64::from(rng.random_range(-2i32..=2))).collect()
        };
        if let Some(n) = m.omega_size() {
            if m.matrix().is_some() {
                return Ok(None);
            }
            return Observable::from_values(m, &spectrum(n, &mut rng)).map(Some);
        }
        let dims = m
            .sector_dims()
            .map(<[usize]>::to_vec)
            .unwrap_or_else(|| vec![m.dimension().expect("linear model")]);
        let total: usize = dims.iter().sum();
        let mut h = DMatrix::<Complex64>::zeros(total, total);
        let mut start = 0;
        for d in dims {
            let spec = spectrum(d, &mut rng);
            let block = hermitian_with_spectrum(&spec, &mut rng);
            h.view_mut((start, start), (d, d)).copy_from(&block);
            start += d;
        }
        hermitian_to_observable(m, &h).map(Some)
    }

    /// Item 3 of the transformation rule, orthogonality preservation,
    /// commutation with the eigenspace projections, the ω sign rules, the
    /// fixed-point property and the mean-value bound. On linear models the
    /// fixed-point property is checked through the identity
    /// `1 − p(r(a), a) = 1 − r̂(a)² / Σ_j λ_j² p(a, X_j)`, which vanishes
    /// exactly on eigenvectors and does not depend on where the tolerance
    /// boundary falls.
    fn observable_probes(&self, r: &Observable, a: &State, b: &State, rng: &mut ChaCha8Rng) -> Result<Vec<Probe>> {
        let m = self.m;
        let tol = *m.tolerances();
        let w = json!({ "a": a.to_json(), "b": b.to_json() });
        let with = |k: &str, v: Value| {
            let mut w = w.clone();
            w[k] = v;
            w
        };
        let mut out = Vec::new();
        let dev = item3_deviation(m, r, a)?;
        out.push(Probe::new(-dev, tol.tol_eq, with("item3", json!(dev))));
        let i = rng.random_range(0..r.parts().len());
        if let Some(bi) = random_member(m, &r.parts()[i].subspace, rng) {
            let dev = item3_deviation_at(m, r, a, i, &bi)?;
            out.push(Probe::new(
                -dev,
                tol.tol_eq,
                with("item3_at", json!({ "part": i, "b": bi.to_json(), "deviation": dev })),
            ));
        }
        let ra = apply(m, r, a)?;
        let w: f64 = r
            .parts()
            .iter()
            .map(|p| p.lambda * p.lambda * p.subspace.p_unchecked(m, a))
            .sum();
        let w = if w <= tol.tol_orth * r.bound() * r.bound() {
            0.0
        } else {
            w
        };
        for (i, part) in r.parts().iter().enumerate() {
            let pa = part.subspace.similarity(m, a)?;
            let pra = part.subspace.similarity(m, &ra)?;
            if pa <= tol.tol_orth {
                // r scales p(a, X_i) by λ_i² / w, so a nearly orthogonal state
                // may be carried well inside X_i when w is small.
                let gain = if w > 0.0 { part.lambda * part.lambda / w } else { 1.0 };
                out.push(Probe::new(
                    -pra,
                    10.0 * tol.tol_orth + gain * pa,
                    with("orthogonality", json!({ "part": i, "p_a": pa, "p_ra": pra })),
                ));
            }
            if pa > tol.rho_floor && pra > tol.rho_floor {
                let t = project(m, a, &part.subspace)?;
                let tr = project(m, &ra, &part.subspace)?;
                let dev = 1.0 - m.similarity(&t, &tr)?;
                out.push(Probe::new(
                    -dev,
                    tol.tol_eq,
                    with("projection", json!({ "part": i, "deviation": dev })),
                ));
            }
        }
        if r.parts().len() >= 2 {
            let j = rng.random_range(0..r.parts().len());
            let k = (j + rng.random_range(1..r.parts().len())) % r.parts().len();
            match check_omega_signs(m, r, a, b, j, k)? {
                OmegaVerdict::Pass { deviation } | OmegaVerdict::Fail { deviation } => {
                    let margin = if deviation.is_finite() { -deviation } else { -1.0 };
                    out.push(Probe::new(
                        margin,
                        OMEGA_SIGN_TOL,
                        with("omega", json!({ "j": j, "k": k, "deviation": margin.abs() })),
                    ));
                }
                OmegaVerdict::Skipped => {}
            }
        }
        let fp = fixed_point_check(m, r, a)?;
        let mv = mean_value(m, r, a)?;
        if m.is_linear() {
            let predicted = if w == 0.0 { 0.0 } else { 1.0 - mv * mv / w };
            let moved = 1.0 - m.similarity(&ra, a)?;
            let dev = (moved - predicted).abs();
            out.push(Probe::new(
                -dev,
                tol.tol_eq,
                with(
                    "fixed_point",
                    json!({ "flags": fp, "moved": moved, "predicted": predicted }),
                ),
            ));
        } else {
            let margin = if fp.fixed == fp.eigenvector { 0.0 } else { -1.0 };
            out.push(Probe::new(margin, 0.0, with("fixed_point", json!({ "flags": fp }))));
        }
        out.push(Probe::new(
            r.bound() - mv.abs(),
            tol.tol_eq * r.bound().max(1.0),
            with("mean", json!({ "value": mv, "bound": r.bound() })),
        ));
        Ok(out)
    }

    fn observable_laws(&self) -> Outcome {
        let m = self.m;
        let built;
        let r = match self.observable {
            Some(r) => r,
            None => match self.default_observable() {
                Ok(Some(r)) => {
                    built = r;
                    &built
                }
                Ok(None) => {
                    return Outcome {
                        count: self.samples,
                        worst: None,
                    }
                }
                Err(e) => {
                    return Outcome {
                        count: self.samples,
                        worst: Some((0, Probe::error(&e, json!("default observable")))),
                    }
                }
            },
        };
        self.sampled(Axiom::ObservableLaws, |rng| {
            let parts = r.parts();
            let i = rng.random_range(0..parts.len());
            let a = if self.adversarial(rng) {
                let gap = power_of_ten(rng, 2, 8);
                state_near_subspace(m, &parts[i].subspace, &complement(m, &parts[i].subspace)?, gap, rng)
            } else if rng.random_bool(0.25) {
                random_member(m, &complement(m, &parts[i].subspace)?, rng).unwrap_or_else(|| random_state(m, rng))
            } else {
                random_state(m, rng)
            };
            let b = random_state(m, rng);
            Ok(min_probe(self.observable_probes(r, &a, &b, rng)?))
        })
    }

    fn morphism_probes(&self, f: &Morphism, states: &[State], basis: Option<&OrthoSet>) -> Result<Vec<Probe>> {
        let m = self.m;
        let tol = self.tol_eq();
        let mut out = Vec::new();
        let c = check_morphism(m, f, states)?;
        let w = json!({ "morphism": f.name(), "states": states_json(states) });
        let mut wc = w.clone();
        wc["check"] = json!(c);
        out.push(Probe::new(-c.similarity_deviation, tol, wc.clone()));
        if !c.injective {
            out.push(Probe::new(-1.0, 0.0, wc));
        }
        if let Some(b) = basis {
            if !image_is_basis(m, f, b)? {
                let mut w = w.clone();
                w["image_not_basis"] = json!(true);
                out.push(Probe::new(-1.0, 0.0, w));
            }
        }
        Ok(out)
    }

    fn invariant_probe(&self, f: &Morphism, b: &OrthoSet, a: &OrthoSet, states: &[State]) -> Result<Probe> {
        let w = json!({ "morphism": f.name(), "A": a.to_json(), "states": states_json(states) });
        let out = check_invariant_basis(self.m, f, b, a, states)?;
        let margin = match &out {
            InvariantBasisOutcome::Checked {
                item1, item2, item3, ..
            } => -item1.max(*item2).max(*item3),
            InvariantBasisOutcome::NotApplicable { worst } => -worst,
        };
        let mut w = w;
        w["invariant_basis"] = json!(out);
        Ok(Probe::new(margin, self.tol_eq(), w))
    }

    fn morphism_laws(&self) -> Outcome {
        let m = self.m;
        let canonical = extend_to_basis(m, &OrthoSet::empty(), None).ok();
        if let Some(n) = m.omega_size() {
            let automorphisms: Vec<Vec<usize>> = match m.matrix() {
                None => Vec::new(),
                Some(_) if n > MORPHISM_ALL_STATES => vec![(0..n).collect()],
                Some(_) => {
                    let mut out = vec![(0..n).collect::<Vec<_>>()];
                    for i in 0..n {
                        for j in i + 1..n {
                            let mut p: Vec<usize> = (0..n).collect();
                            p.swap(i, j);
                            let preserved = (0..n)
                                .all(|x| (0..n).all(|y| (pf(m, p[x], p[y]) - pf(m, x, y)).abs() <= self.tol_eq()));
                            if preserved {
                                out.push(p);
                            }
                        }
                    }
                    out
                }
            };
            return self.sampled(Axiom::MorphismLaws, |rng| {
                let perm = if m.matrix().is_some() {
                    automorphisms.choose(rng).expect("identity").clone()
                } else {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(rng);
                    p
                };
                let f = Morphism::permutation(m, perm)?;
                let states: Vec<State> = if n <= MORPHISM_ALL_STATES {
                    (0..n).map(State::Index).collect()
                } else {
                    (0..MORPHISM_ALL_STATES).map(|_| random_state(m, rng)).collect()
                };
                let mut probes = self.morphism_probes(&f, &states, canonical.as_ref())?;
                if let Some(b) = &canonical {
                    let k = rng.random_range(1..=b.len().max(1)).min(b.len());
                    let a = OrthoSet::from_trusted(b.members()[..k].to_vec());
                    probes.push(self.invariant_probe(&Morphism::identity(), b, &a, &states)?);
                }
                Ok(min_probe(probes))
            });
        }
        let dims = m
            .sector_dims()
            .map(<[usize]>::to_vec)
            .unwrap_or_else(|| vec![m.dimension().expect("linear model")]);
        let total: usize = dims.iter().sum();
        self.sampled(Axiom::MorphismLaws, |rng| {
            let mut u = DMatrix::<Complex64>::zeros(total, total);
            let mut start = 0;
            for &d in &dims {
                u.view_mut((start, start), (d, d)).copy_from(&haar_unitary(d, rng));
                start += d;
            }
            let f = Morphism::unitary(m, u)?;
            let x = random_state(m, rng);
            let y = if self.adversarial(rng) {
                let eta = power_of_ten(rng, 1, 6);
                nearby_state(m, &x, eta, rng)
            } else {
                random_state(m, rng)
            };
            let z = random_state(m, rng);
            let states = vec![x, y, z];
            let mut probes = self.morphism_probes(&f, &states, canonical.as_ref())?;
            let phases: Vec<Complex64> = (0..total)
                .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                .collect();
            let g = Morphism::unitary(m, DMatrix::from_diagonal(&DVector::from_vec(phases)))?;
            if let Some(b) = &canonical {
                let mut members = b.members().to_vec();
                members.shuffle(rng);
                let k = rng.random_range(1..=members.len());
                let a = OrthoSet::from_trusted(members[..k].to_vec());
                probes.push(self.invariant_probe(&g, b, &a, &states)?);
            }
            Ok(min_probe(probes))
        })
    }
}

/// Continuity probes on the near-state family embedded in the first two
/// coordinates of a sector of dimension at least two.
pub(crate) fn near_state_sweep(m: &SpModel) -> Outcome {
    let Some(dims) = m
        .sector_dims()
        .map(<[usize]>::to_vec)
        .or_else(|| m.is_linear().then(|| vec![m.dimension().unwrap_or(0)]))
    else {
        return Outcome { count: 0, worst: None };
    };
    let Some(sector) = dims.iter().position(|&d| d >= 2) else {
        return Outcome { count: 0, worst: None };
    };
    let sectored = m.sector_dims().is_some();
    let d = dims[sector];
    let embed = |s: &State| -> Option<State> {
        let v = s.amplitudes()?;
        let mut w = CVector::zeros(d);
        w.rows_mut(0, 2).copy_from(v);
        Some(if sectored {
            State::Sectored { sector, amplitudes: w }
        } else {
            State::Vector(w)
        })
    };
    let rs: Vec<f64> = (1..=9).map(|k| f64::from(k) / 10.0).collect();
    let small = [0.0, 1e-3, 1e-2];
    let mut grid: Vec<(f64, f64, f64)> = Vec::new();
    for &r in &rs {
        for &e in &small {
            for &dl in &small {
                grid.push((r, e, dl));
            }
        }
    }
    let tol = m.tolerances().tol_eq;
    scan(grid.len(), |k| {
        let (r, eps, delta) = grid[k];
        let (x, y, u) = near_states(r, eps, delta).ok()?;
        let (x, y, u) = (embed(&x)?, embed(&y)?, embed(&u)?);
        let w = json!({ "r": r, "eps": eps, "delta": delta, "x": x.to_json(), "y": y.to_json(), "z": u.to_json() });
        Some(match continuity_bound(m, &x, &y, &u) {
            Ok(slack) => {
                let mut w = w;
                w["slack"] = json!(slack);
                Probe::new(slack, tol, w)
            }
            Err(e) => Probe::error(&e, w),
        })
    })
}
