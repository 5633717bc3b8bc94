//! Acceptance criteria: one PASS/FAIL line per criterion, exit status 1 when
//! any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use sp_structure::checker::{run_suite, AxiomReport, CheckConfig, Verdict};
use sp_structure::geometry::{cascade_o_project, complement, extend_to_basis, intersection, o_project, ortho_sum};
use sp_structure::models::{make_classical, make_hilbert, make_sectored, SectorDescriptor};
use sp_structure::observables::{
    apply, check_omega_signs, fixed_point_check, hermitian_to_observable, item3_deviation, mean_continuity_slack,
    mean_value, mean_value_via_basis, Observable, OmegaVerdict,
};
use sp_structure::phases::{continuity_bound, near_states, PhaseContext};
use sp_structure::sampling::{
    hermitian_with_spectrum, random_frame, random_hermitian, random_member, random_ortho_set, random_state, sample_rng,
};
use sp_structure::{Axiom, OrthoSet, SpModel, State, Subspace};

const CORE_AXIOMS: [Axiom; 7] = [
    Axiom::Symmetry,
    Axiom::NonNegativity,
    Axiom::Boundedness,
    Axiom::OProjection,
    Axiom::Factorization,
    Axiom::Inequality,
    Axiom::Continuity,
];

type Criterion = (&'static str, fn() -> Line);

struct Line {
    pass: bool,
    text: String,
}

fn line(pass: bool, text: String) -> Line {
    Line { pass, text }
}

fn spcheck(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_spcheck"))
        .args(args)
        .env_remove("SPCHECK_SEED")
        .output()
        .expect("spcheck runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn rng(criterion: u64, i: u64) -> ChaCha8Rng {
    sample_rng(0xACCE, criterion, i)
}

fn span(m: &SpModel, states: &[State]) -> Subspace {
    Subspace::span(m, states.to_vec()).unwrap()
}

/// `Σ |⟨b, x⟩|²` over a basis, from the raw amplitudes.
fn brute_p(basis: &OrthoSet, x: &State) -> f64 {
    let xv = x.amplitudes().unwrap();
    basis.iter().map(|b| b.amplitudes().unwrap().dotc(xv).norm_sqr()).sum()
}

fn spin_half() -> Line {
    let start = Instant::now();
    let out = spcheck(&["demo", "spin-half"]);
    let elapsed = start.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&out.stdout);
    let value = text
        .lines()
        .find_map(|l| l.strip_prefix("p(|+z>,|+x>) = "))
        .and_then(|v| v.trim().parse::<f64>().ok());
    let m = make_hilbert(2).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let direct = m.similarity(&State::real(&[1.0, 0.0]), &State::real(&[h, h])).unwrap();
    let pass = out.status.success()
        && value.is_some_and(|v| (v - 0.5).abs() <= 1e-12)
        && (direct - 0.5).abs() <= 1e-12
        && elapsed < 1.0;
    line(
        pass,
        format!("spin-1/2 demo prints p = {value:?}, library gives {direct}, {elapsed:.3} s"),
    )
}

fn core_failures(reports: &[AxiomReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| CORE_AXIOMS.contains(&r.axiom))
        .filter(|r| r.verdict == Verdict::Fail || r.worst_margin.is_some_and(|w| w < -1e-9))
        .map(|r| format!("{} {:.3e}", r.axiom, r.worst_margin.unwrap_or(f64::NAN)))
        .collect()
}

fn hilbert_suite() -> Line {
    let start = Instant::now();
    let cfg = CheckConfig::default();
    let mut failures = Vec::new();
    for d in 1..=8 {
        let reports = run_suite(&make_hilbert(d).unwrap(), &cfg).unwrap();
        for f in core_failures(&reports) {
            failures.push(format!("d={d}: {f}"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 30.0;
    line(
        pass,
        format!(
            "hilbert d=1..8, 1000 samples, seed 0: {} violations [{}], {elapsed:.1} s",
            failures.len(),
            failures.join("; ")
        ),
    )
}

fn classical_suite() -> Line {
    let cfg = CheckConfig::default();
    let mut failures = Vec::new();
    let (mut configs, mut nonzero) = (0usize, 0usize);
    let mut r = rng(3, 0);
    for n in 1..=10 {
        let m = make_classical(n).unwrap();
        let reports = run_suite(&m, &cfg).unwrap();
        for f in core_failures(&reports) {
            failures.push(format!("n={n}: {f}"));
        }
        let exhaustive = n <= 6;
        let count = if exhaustive { 3usize.pow(n as u32) } else { 300 };
        for code in 0..count {
            let mut labels = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                labels.push(if exhaustive { c % 3 } else { r.random_range(0..3) });
                c /= 3;
            }
            let pick = |l: usize| -> Vec<State> { (0..n).filter(|&i| labels[i] == l).map(State::index).collect() };
            let (xs, ys) = (pick(1), pick(2));
            if xs.is_empty() || ys.is_empty() {
                continue;
            }
            let ctx = PhaseContext::new(&m, span(&m, &xs), span(&m, &ys)).unwrap();
            for a in 0..n {
                for b in 0..n {
                    if let Ok(q) = ctx.phase_quantities(&State::index(a), &State::index(b)) {
                        configs += 1;
                        if q.alpha != 0.0 || q.rho != 0.0 {
                            nonzero += 1;
                        }
                    }
                }
            }
        }
    }
    line(
        failures.is_empty() && nonzero == 0,
        format!(
            "classical n=1..10: {} suite violations [{}]; alpha, rho nonzero on {nonzero} of {configs} configurations",
            failures.len(),
            failures.join("; ")
        ),
    )
}

fn sectored_suite() -> Line {
    let m = make_sectored(&SectorDescriptor::new(vec![2, 3])).unwrap();
    let reports = run_suite(&m, &CheckConfig::default()).unwrap();
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| format!("{} {:.3e}", r.axiom, r.worst_margin.unwrap_or(f64::NAN)))
        .collect();
    let mut r = rng(4, 0);
    let states: Vec<State> = (0..300).map(|_| random_state(&m, &mut r)).collect();
    let sector = |s: &State| match s {
        State::Sectored { sector, .. } => *sector,
        _ => usize::MAX,
    };
    let (mut pairs, mut leaks) = (0usize, 0usize);
    for x in &states {
        for y in &states {
            if sector(x) != sector(y) {
                pairs += 1;
                if m.similarity(x, y).unwrap() != 0.0 {
                    leaks += 1;
                }
            }
        }
    }
    line(
        failures.is_empty() && leaks == 0,
        format!(
            "sectored [2,3], 1000 samples, seed 0: failing axioms [{}]; cross-sector p nonzero on {leaks} of {pairs} pairs",
            failures.join("; ")
        ),
    )
}

fn near_state_tightness() -> Line {
    let m = make_hilbert(2).unwrap();
    let mut ok = true;
    let mut cells = Vec::new();
    for r in [0.2, 0.5, 0.8] {
        for eps in [1e-2, 1e-3] {
            let (x, y, u) = near_states(r, eps, 0.0).unwrap();
            let gap = 1.0 - m.similarity(&x, &y).unwrap();
            let stated = eps * eps / (r * (1.0 - r));
            let rel = (gap - stated).abs() / stated;
            let slack = continuity_bound(&m, &x, &y, &u).unwrap();
            ok &= rel <= 0.05 && slack < gap.sqrt();
            cells.push(format!(
                "r={r} eps={eps:.0e}: ratio {:.4}, slack {slack:.3e}",
                gap / stated
            ));
        }
    }
    line(
        ok,
        format!("near-state gap vs eps^2/(r(1-r)) within 5%: {}", cells.join("; ")),
    )
}

fn cascade() -> Line {
    let m = make_hilbert(6).unwrap();
    let mut bad = 0;
    for seed in 0..100 {
        let mut r = rng(6, seed);
        let a = random_ortho_set(&m, 4, 4, &mut r);
        let x = random_state(&m, &mut r);
        let bulk = o_project(&m, &x, &a).unwrap();
        let chain = cascade_o_project(&m, &x, &a).unwrap();
        if !m.states_equivalent(&bulk, &chain) {
            bad += 1;
        }
    }
    line(
        bad == 0,
        format!("cascade vs bulk o-projection, d=6, |A|=4: {bad} of 100 seeds differ"),
    )
}

fn observable_from(m: &SpModel, d: usize, i: u64, r: &mut ChaCha8Rng) -> Observable {
    let h = if i.is_multiple_of(3) {
        let spectrum: Vec<f64> = (0..d).map(|_| r.random_range(-2..=2) as f64).collect();
        hermitian_with_spectrum(&spectrum, r)
    } else {
        random_hermitian(d, r)
    };
    hermitian_to_observable(m, &h).unwrap()
}

fn hermitian_bridge() -> Line {
    let (mut structure, mut item3, mut omega_fail, mut omega_checked, mut other) = (0, 0.0f64, 0, 0, 0);
    let mut omega_dev = 0.0f64;
    for i in 0..100u64 {
        let d = 2 + (i as usize % 5);
        let m = make_hilbert(d).unwrap();
        let tol = *m.tolerances();
        let mut r = rng(7, i);
        let obs = observable_from(&m, d, i, &mut r);
        let parts = obs.parts();
        let dims: usize = parts.iter().map(|p| p.subspace.dim()).sum();
        let mut ok = dims == d;
        for (j, pj) in parts.iter().enumerate() {
            ok &= pj.lambda.abs() <= obs.bound();
            for pk in &parts[j + 1..] {
                ok &= (pj.lambda - pk.lambda).abs() > tol.tol_eig;
                for b in pk.subspace.basis().iter() {
                    ok &= pj.subspace.similarity(&m, b).unwrap() <= tol.tol_orth;
                }
            }
        }
        structure += usize::from(!ok);
        for _ in 0..10 {
            let (a, b) = (random_state(&m, &mut r), random_state(&m, &mut r));
            item3 = item3.max(item3_deviation(&m, &obs, &a).unwrap());
            for j in 0..parts.len() {
                for k in j + 1..parts.len() {
                    match check_omega_signs(&m, &obs, &a, &b, j, k).unwrap() {
                        OmegaVerdict::Pass { deviation } => {
                            omega_checked += 1;
                            omega_dev = omega_dev.max(deviation);
                        }
                        OmegaVerdict::Fail { deviation } => {
                            omega_fail += 1;
                            omega_dev = omega_dev.max(deviation);
                        }
                        OmegaVerdict::Skipped => {}
                    }
                }
            }
            let ra = apply(&m, &obs, &a).unwrap();
            for part in parts {
                let outside = complement(&m, &part.subspace).unwrap();
                if let Some(z) = random_member(&m, &outside, &mut r) {
                    let rz = apply(&m, &obs, &z).unwrap();
                    other += usize::from(part.subspace.similarity(&m, &rz).unwrap() > 10.0 * tol.tol_orth);
                }
                if part.subspace.similarity(&m, &ra).unwrap() > 1e-6 {
                    let lhs = sp_structure::geometry::project(&m, &ra, &part.subspace).unwrap();
                    let rhs = sp_structure::geometry::project(&m, &a, &part.subspace).unwrap();
                    other += usize::from(!m.states_equivalent(&lhs, &rhs));
                }
                let e = random_member(&m, &part.subspace, &mut r).unwrap();
                let fp = fixed_point_check(&m, &obs, &e).unwrap();
                other += usize::from(!(fp.fixed && fp.eigenvector));
            }
        }
    }
    let pass = structure == 0 && item3 <= 1e-9 && omega_fail == 0 && omega_dev <= 1e-7 && other == 0;
    line(
        pass,
        format!(
            "hermitian bridge, 100 matrices d=2..6: {structure} structural defects, item-3 max deviation {item3:.2e}, \
             omega {omega_checked} checked / {omega_fail} failed (max deviation {omega_dev:.2e}), {other} eigenspace-law violations"
        ),
    )
}

fn mean_values() -> Line {
    let mut worst_basis = 0.0f64;
    for i in 0..500u64 {
        let d = 2 + (i as usize % 5);
        let m = make_hilbert(d).unwrap();
        let mut r = rng(8, i);
        let obs = observable_from(&m, d, i, &mut r);
        let mut basis = Vec::new();
        for part in obs.parts() {
            let seed = OrthoSet::new(&m, vec![random_member(&m, &part.subspace, &mut r).unwrap()]).unwrap();
            basis.extend(extend_to_basis(&m, &seed, Some(&part.subspace)).unwrap().into_members());
        }
        let x = random_state(&m, &mut r);
        let dev = (mean_value(&m, &obs, &x).unwrap() - mean_value_via_basis(&m, &obs, &basis, &x).unwrap()).abs();
        worst_basis = worst_basis.max(dev);
    }
    let (mut worst_slack, mut negative, mut negative_positive_spectrum) = (f64::INFINITY, 0, 0);
    for i in 0..1000u64 {
        let d = 2 + (i as usize % 5);
        let m = make_hilbert(d).unwrap();
        let mut r = rng(80, i);
        let obs = observable_from(&m, d, i, &mut r);
        let (x, y) = (random_state(&m, &mut r), random_state(&m, &mut r));
        let s = mean_continuity_slack(&m, &obs, &x, &y).unwrap();
        worst_slack = worst_slack.min(s);
        negative += usize::from(s < -1e-9);
        if obs.parts().iter().all(|p| p.lambda >= 0.0) {
            negative_positive_spectrum += usize::from(s < -1e-9);
        }
    }
    line(
        worst_basis <= 1e-10 && worst_slack >= -1e-9,
        format!(
            "mean values: eigenbasis sum max deviation {worst_basis:.2e} over 500 pairs; \
             continuity slack min {worst_slack:.3e}, {negative} of 1000 pairs below -1e-9 \
             ({negative_positive_spectrum} with a non-negative spectrum)"
        ),
    )
}

fn lattice() -> Line {
    let tol = 1e-9;
    let (mut configs, mut bad_sum, mut bad_inv, mut bad_osum, mut bad_int) = (0, 0, 0, 0, 0);
    for d in 2..=6usize {
        let m = make_hilbert(d).unwrap();
        for k in 0..4u64 {
            configs += 1;
            let mut r = rng(9, d as u64 * 16 + k);
            let frame = random_frame(&m, &mut r);
            let kx = r.random_range(1..d);
            let start = r.random_range(0..d);
            let kw = r.random_range(0..=d - kx);
            let x = span(&m, &frame[..kx]);
            let w = span(&m, &frame[kx..kx + kw]);
            let y_span = span(&m, &frame[start..]);
            let seed = OrthoSet::new(&m, vec![random_member(&m, &y_span, &mut r).unwrap()]).unwrap();
            let y = Subspace::new(&m, extend_to_basis(&m, &seed, Some(&y_span)).unwrap()).unwrap();
            let xc = complement(&m, &x).unwrap();
            let xcc = complement(&m, &xc).unwrap();
            let sum = ortho_sum(&m, &x, &w).unwrap();
            let meet = intersection(&m, &x, &y).unwrap();
            for i in 0..500 {
                let s = match i % 3 {
                    0 => random_state(&m, &mut r),
                    1 => random_member(&m, &x, &mut r).unwrap(),
                    _ => random_member(&m, if meet.dim() > 0 { &meet } else { &y }, &mut r).unwrap(),
                };
                let (px, pxc) = (brute_p(x.basis(), &s), brute_p(xc.basis(), &s));
                bad_sum += usize::from((px + pxc - 1.0).abs() > tol);
                bad_sum += usize::from((x.similarity(&m, &s).unwrap() - px).abs() > tol);
                let in_x = px >= 1.0 - tol;
                let in_y = brute_p(y.basis(), &s) >= 1.0 - tol;
                bad_inv += usize::from(xcc.contains(&m, &s).unwrap() != in_x);
                bad_inv += usize::from((brute_p(xcc.basis(), &s) - px).abs() > tol);
                let in_sum = px + brute_p(w.basis(), &s) >= 1.0 - tol;
                bad_osum += usize::from(sum.contains(&m, &s).unwrap() != in_sum);
                bad_int += usize::from(meet.contains(&m, &s).unwrap() != (in_x && in_y));
            }
        }
    }
    line(
        bad_sum + bad_inv + bad_osum + bad_int == 0,
        format!(
            "subspace lattice, {configs} configurations x 500 states, d=2..6: mismatches complement-sum {bad_sum}, \
             involution {bad_inv}, ortho-sum {bad_osum}, intersection {bad_int}"
        ),
    )
}

fn negative_controls() -> Line {
    let find = |report: &Value, axiom: &str| -> Value {
        report["reports"]
            .as_array()
            .and_then(|rs| rs.iter().find(|r| r["axiom"] == axiom).cloned())
            .unwrap_or(Value::Null)
    };
    let asym = spcheck(&["check", "--model", &fixture("asymmetric.json")]);
    let asym_report: Value = serde_json::from_slice(&asym.stdout).unwrap_or(Value::Null);
    let sym = find(&asym_report, "Symmetry");
    let asym_ok = asym.status.code() == Some(1)
        && sym["verdict"] == "fail"
        && sym["witness"]["detail"]["x"] == 0
        && sym["witness"]["detail"]["y"] == 1
        && sym["worst_margin"].as_f64().is_some_and(|w| (w + 0.1).abs() < 1e-12);
    let def = spcheck(&["check", "--model", &fixture("deficient.json")]);
    let def_report: Value = serde_json::from_slice(&def.stdout).unwrap_or(Value::Null);
    let op = find(&def_report, "OProjection");
    let def_ok = def.status.code() == Some(1)
        && op["verdict"] == "fail"
        && op["witness"]["detail"]["x"] == 0
        && op["witness"]["detail"]["A"] == serde_json::json!([1]);
    line(
        asym_ok && def_ok,
        format!(
            "negative controls: asymmetric exit {:?}, Symmetry witness ({}, {}); deficient exit {:?}, OProjection witness x={} A={}",
            asym.status.code(),
            sym["witness"]["detail"]["x"],
            sym["witness"]["detail"]["y"],
            def.status.code(),
            op["witness"]["detail"]["x"],
            op["witness"]["detail"]["A"],
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("spin-half", spin_half),
        ("hilbert-suite", hilbert_suite),
        ("classical-suite", classical_suite),
        ("sectored-suite", sectored_suite),
        ("near-state-tightness", near_state_tightness),
        ("cascade", cascade),
        ("hermitian-bridge", hermitian_bridge),
        ("mean-values", mean_values),
        ("subspace-lattice", lattice),
        ("negative-controls", negative_controls),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let l = check();
        println!(
            "{} {:>2} {name}: {}",
            if l.pass { "PASS" } else { "FAIL" },
            i + 1,
            l.text
        );
        if !l.pass {
            failed.push(i + 1);
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
