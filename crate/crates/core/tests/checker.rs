//! Suite and fuzz verdicts on the built-in models and the crafted bad
//! matrix models.

mod common;

use common::*;
use serde_json::Value;
use sp_structure::checker::{any_fail, fuzz, run_suite, AxiomReport, CheckConfig, FuzzConfig, Verdict};
use sp_structure::models::{
    load_matrix_model, make_classical, make_hilbert, make_matrix, make_sectored, parse_builtin, SectorDescriptor,
};
use sp_structure::sampling::{random_state, sample_rng};
use sp_structure::{Axiom, SpModel, Tolerances};

fn report(reports: &[AxiomReport], a: Axiom) -> &AxiomReport {
    reports.iter().find(|r| r.axiom == a).unwrap()
}

fn cfg(samples: usize, seed: u64) -> CheckConfig {
    CheckConfig {
        samples,
        seed,
        ..CheckConfig::default()
    }
}

fn amplitudes(v: &Value) -> Vec<C> {
    v["amplitudes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| c(z[0].as_f64().unwrap(), z[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn one_report_per_axiom_in_fixed_order() {
    let reports = run_suite(&make_hilbert(2).unwrap(), &cfg(10, 0)).unwrap();
    let order: Vec<Axiom> = reports.iter().map(|r| r.axiom).collect();
    assert_eq!(order, Axiom::ALL.to_vec());
    assert!(reports.iter().all(|r| r.seed == 0));
}

#[test]
fn hilbert_four_passes_at_seed_42() {
    let reports = run_suite(&make_hilbert(4).unwrap(), &cfg(1000, 42)).unwrap();
    for r in &reports {
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    }
}

#[test]
fn classical_models_pass_with_zero_inequality_margin() {
    for n in 1..=10 {
        let reports = run_suite(&make_classical(n).unwrap(), &cfg(200, 3)).unwrap();
        assert!(!any_fail(&reports), "n = {n}");
        assert_eq!(report(&reports, Axiom::Inequality).worst_margin.unwrap_or(0.0), 0.0);
    }
    let reports = run_suite(&make_classical(1).unwrap(), &cfg(10, 0)).unwrap();
    assert_eq!(report(&reports, Axiom::OProjection).verdict, Verdict::NotApplicable);
}

#[test]
fn asymmetric_matrix_fails_symmetry_at_the_declared_pair() {
    let mm = load_matrix_model(include_bytes!("../../spcheck/tests/fixtures/asymmetric.json")).unwrap();
    let (gap, pair) = mm.asymmetry();
    let reports = run_suite(&make_matrix(mm), &cfg(10, 0)).unwrap();
    let r = report(&reports, Axiom::Symmetry);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.worst_margin.unwrap() + gap).abs() < 1e-12);
    assert!((gap - 0.1).abs() < 1e-12);
    assert_eq!(pair, (0, 1));
    assert_eq!(
        (r.witness["detail"]["x"].as_u64(), r.witness["detail"]["y"].as_u64()),
        (Some(0), Some(1))
    );
}

#[test]
fn two_state_matrix_has_no_o_projection() {
    let mm = load_matrix_model(include_bytes!("../../spcheck/tests/fixtures/deficient.json")).unwrap();
    let reports = run_suite(&make_matrix(mm), &cfg(10, 0)).unwrap();
    let r = report(&reports, Axiom::OProjection);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.witness["detail"]["x"], 0);
    assert_eq!(r.witness["detail"]["A"], serde_json::json!([1]));
    assert_eq!(report(&reports, Axiom::Symmetry).verdict, Verdict::Pass);
}

#[test]
fn tolerance_decides_the_perturbed_model() {
    let m = parse_builtin("perturbed-hilbert:3:1e-6").unwrap();
    let loose = CheckConfig {
        tolerances: Tolerances::default().with_probability_slack(1e-4).unwrap(),
        ..cfg(300, 1)
    };
    let tight = CheckConfig {
        tolerances: Tolerances::default().with_probability_slack(1e-12).unwrap(),
        ..cfg(300, 1)
    };
    let (loose, tight) = (run_suite(&m, &loose).unwrap(), run_suite(&m, &tight).unwrap());
    for a in [Axiom::OProjection, Axiom::Factorization, Axiom::Inequality] {
        assert_eq!(report(&loose, a).verdict, Verdict::Pass, "{a} at 1e-4");
    }
    for a in [Axiom::OProjection, Axiom::Factorization] {
        assert_eq!(report(&tight, a).verdict, Verdict::Fail, "{a} at 1e-12");
    }
}

#[test]
fn fuzz_finds_the_half_constant_counterexample() {
    let m = make_hilbert(2).unwrap();
    let reports = fuzz(&m, &cfg(200, 0), FuzzConfig::default()).unwrap();
    let r = report(&reports, Axiom::Continuity);
    assert_eq!(r.verdict, Verdict::Fail);
    let worst = r.worst_margin.unwrap();
    assert!((-1.0 / 16.0 - 1e-12..-0.06).contains(&worst), "{worst}");
    let d = &r.witness["detail"];
    let (x, y, z) = (amplitudes(&d["x"]), amplitudes(&d["y"]), amplitudes(&d["z"]));
    let g = 1.0 - prob(&x, &y);
    let slack = prob(&y, &z) + 0.5 * g.sqrt() + g - prob(&x, &z);
    assert!((slack - worst).abs() < 1e-12);
    for a in Axiom::ALL.into_iter().filter(|&a| a != Axiom::Continuity) {
        assert_ne!(report(&reports, a).verdict, Verdict::Fail, "{a}");
    }
}

#[test]
fn near_state_sweep_fails_only_where_a_plane_exists() {
    let m = make_classical(1).unwrap();
    let reports = fuzz(&m, &cfg(10, 0), FuzzConfig { rounds: 1 }).unwrap();
    assert!(!any_fail(&reports));
    let m = make_hilbert(3).unwrap();
    let reports = fuzz(&m, &cfg(1, 0), FuzzConfig { rounds: 1 }).unwrap();
    let r = report(&reports, Axiom::Continuity);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.witness["round"] == 0);
}

#[test]
fn fuzz_is_deterministic() {
    let m = make_hilbert(3).unwrap();
    let a = fuzz(&m, &cfg(50, 5), FuzzConfig { rounds: 2 }).unwrap();
    let b = fuzz(&m, &cfg(50, 5), FuzzConfig { rounds: 2 }).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

fn sectored(dims: &[usize]) -> SpModel {
    make_sectored(&SectorDescriptor::new(dims.to_vec())).unwrap()
}

#[test]
fn sectored_cross_similarity_vanishes() {
    let m = sectored(&[2, 3]);
    let mut rng = sample_rng(11, 0, 0);
    let states: Vec<_> = (0..200).map(|_| random_state(&m, &mut rng)).collect();
    let sector = |s: &sp_structure::State| match s {
        sp_structure::State::Sectored { sector, .. } => *sector,
        _ => unreachable!(),
    };
    for x in &states {
        for y in &states {
            if sector(x) != sector(y) {
                assert_eq!(m.similarity(x, y).unwrap(), 0.0);
            }
        }
    }
    let reports = run_suite(&m, &cfg(300, 2)).unwrap();
    for a in Axiom::ALL.into_iter().filter(|&a| a != Axiom::Continuity) {
        assert_ne!(report(&reports, a).verdict, Verdict::Fail, "{a}");
    }
}
