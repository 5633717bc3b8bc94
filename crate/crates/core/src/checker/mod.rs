//! The verdict engine: one report per axiom, decided by seeded sampling on
//! linear models and by enumeration of the finite Ω where that is feasible.
//!
//! Each configuration yields a margin (non-negative when the law holds
//! exactly) and an allowance (the tolerance it is judged against). The
//! report keeps the configuration with the smallest `margin + allowance`,
//! ties broken by configuration index, so verdicts and witnesses do not
//! depend on thread scheduling.

mod axioms;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::observables::Observable;
use crate::structure::{Axiom, SpModel};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

/// Verdict for one axiom. `worst_margin` is the margin of the reported
/// configuration (absent when nothing was applicable); a fail means it lies
/// below minus the allowance, and `witness` reproduces it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub worst_margin: Option<f64>,
    pub witness: Value,
    pub samples: usize,
    pub seed: u64,
}

/// Suite configuration. `samples` is the budget per axiom for sampled
/// checks; enumerated checks on finite models ignore it.
#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Observable judged by the ObservableLaws check; a seeded random one is
    /// used when absent.
    pub observable: Option<Observable>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            tolerances: Tolerances::default(),
            observable: None,
        }
    }
}

impl CheckConfig {
    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "observable": self.observable.is_some(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub rounds: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self { rounds: 4 }
    }
}

/// Fraction of adversarial samples in the first fuzz round; it doubles
/// every round.
pub const FUZZ_BASE_FRACTION: f64 = 0.125;

#[derive(Debug, Clone)]
pub(crate) struct Probe {
    margin: f64,
    allowance: f64,
    witness: Value,
}

impl Probe {
    pub(crate) fn new(margin: f64, allowance: f64, witness: Value) -> Self {
        if margin.is_nan() {
            return Self {
                margin: -1.0,
                allowance,
                witness: json!({ "nan": true, "at": witness }),
            };
        }
        Self {
            margin: margin + 0.0,
            allowance,
            witness,
        }
    }

    /// A configuration whose evaluation failed; counted as a maximal
    /// violation.
    pub(crate) fn error(e: &Error, witness: Value) -> Self {
        Self {
            margin: -1.0,
            allowance: 0.0,
            witness: json!({ "error": e.to_string(), "at": witness }),
        }
    }

    fn excess(&self) -> f64 {
        self.margin + self.allowance
    }
}

pub(crate) fn worse(a: Probe, b: Probe) -> Probe {
    if b.excess() < a.excess() {
        b
    } else {
        a
    }
}

/// Worst probe over an iterator, first one winning ties.
pub(crate) fn min_probe(probes: impl IntoIterator<Item = Probe>) -> Option<Probe> {
    probes.into_iter().reduce(worse)
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub(crate) count: usize,
    pub(crate) worst: Option<(usize, Probe)>,
}

fn better_key(a: &(usize, Probe), b: &(usize, Probe)) -> bool {
    match b.1.excess().total_cmp(&a.1.excess()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Equal => b.0 < a.0,
        std::cmp::Ordering::Greater => false,
    }
}

/// Evaluates configurations `0..count` in parallel and keeps the worst.
pub(crate) fn scan<F>(count: usize, f: F) -> Outcome
where
    F: Fn(usize) -> Option<Probe> + Sync + Send,
{
    let worst = (0..count)
        .into_par_iter()
        .filter_map(|i| f(i).map(|p| (i, p)))
        .reduce_with(|a, b| if better_key(&a, &b) { b } else { a });
    Outcome { count, worst }
}

impl Outcome {
    fn excess(&self) -> Option<f64> {
        self.worst.as_ref().map(|(_, p)| p.excess())
    }

    fn into_report(self, axiom: Axiom, seed: u64, extra: Option<(&str, Value)>) -> AxiomReport {
        match self.worst {
            None => AxiomReport {
                axiom,
                verdict: Verdict::NotApplicable,
                worst_margin: None,
                witness: Value::Null,
                samples: self.count,
                seed,
            },
            Some((index, probe)) => {
                let verdict = if probe.excess() < 0.0 {
                    Verdict::Fail
                } else {
                    Verdict::Pass
                };
                let mut witness = json!({ "sample": index });
                if let Some((k, v)) = extra {
                    witness[k] = v;
                }
                witness["detail"] = probe.witness;
                AxiomReport {
                    axiom,
                    verdict,
                    worst_margin: Some(probe.margin),
                    witness,
                    samples: self.count,
                    seed,
                }
            }
        }
    }
}

/// Runs every axiom check on `m` under the configured tolerances, in the
/// fixed order of [`Axiom::ALL`].
pub fn run_suite(m: &SpModel, cfg: &CheckConfig) -> Result<Vec<AxiomReport>> {
    let m = m.clone().with_tolerances(cfg.tolerances)?;
    let plan = axioms::Plan::new(&m, cfg, 0.0, 0);
    Ok(Axiom::ALL
        .iter()
        .map(|&a| plan.run(a).into_report(a, cfg.seed, None))
        .collect())
}

/// Adversarial search: `rounds` suite runs whose adversarial fraction starts
/// at [`FUZZ_BASE_FRACTION`] and doubles each round, plus a sweep of the
/// near-state family for Continuity. Per axiom the worst configuration over
/// all rounds is reported.
pub fn fuzz(m: &SpModel, cfg: &CheckConfig, fuzz: FuzzConfig) -> Result<Vec<AxiomReport>> {
    let m = m.clone().with_tolerances(cfg.tolerances)?;
    let rounds = fuzz.rounds.max(1);
    let mut out = Vec::with_capacity(Axiom::ALL.len());
    for &axiom in Axiom::ALL.iter() {
        let mut best: Option<(Outcome, u32)> = None;
        let mut total = 0;
        for round in 0..rounds {
            let frac = (FUZZ_BASE_FRACTION * 2f64.powi(round as i32)).min(1.0);
            let plan = axioms::Plan::new(&m, cfg, frac, u64::from(round) + 1);
            let mut o = plan.run(axiom);
            if axiom == Axiom::Continuity && round == 0 {
                let sweep = axioms::near_state_sweep(&m);
                o = merge(o, sweep);
            }
            total += o.count;
            best = match best {
                Some((b, r)) if !worse_outcome(&b, &o) => Some((b, r)),
                _ => Some((o, round)),
            };
        }
        let (mut o, round) = best.expect("at least one round");
        o.count = total;
        out.push(o.into_report(axiom, cfg.seed, Some(("round", json!(round)))));
    }
    Ok(out)
}

/// Whether `b` holds a strictly worse configuration than `a`.
fn worse_outcome(a: &Outcome, b: &Outcome) -> bool {
    match (a.excess(), b.excess()) {
        (_, None) => false,
        (None, Some(_)) => true,
        (Some(x), Some(y)) => y < x,
    }
}

fn merge(a: Outcome, b: Outcome) -> Outcome {
    let count = a.count + b.count;
    let worst = match (a.worst, b.worst) {
        (Some(x), Some(y)) => {
            if y.1.excess() < x.1.excess() {
                Some((a.count + y.0, y.1))
            } else {
                Some(x)
            }
        }
        (Some(x), None) => Some(x),
        (None, Some(y)) => Some((a.count + y.0, y.1)),
        (None, None) => None,
    };
    Outcome { count, worst }
}

/// Whether any report failed.
pub fn any_fail(reports: &[AxiomReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Fail)
}

/// `{"model": …, "config": …, "reports": […]}`.
pub fn report_json(m: &SpModel, cfg: &CheckConfig, reports: &[AxiomReport]) -> Value {
    json!({
        "model": m.descriptor(),
        "config": cfg.to_json(),
        "reports": reports,
    })
}

/// Plain-text rendering of a JSON report.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!("model: {}\n", report["model"]));
    out.push_str(&format!(
        "seed {}, {} samples per axiom\n",
        report["config"]["seed"], report["config"]["samples"]
    ));
    let mut counts = [0usize; 3];
    for r in report["reports"].as_array().into_iter().flatten() {
        let verdict = r["verdict"].as_str().unwrap_or("?");
        match verdict {
            "pass" => counts[0] += 1,
            "fail" => counts[1] += 1,
            _ => counts[2] += 1,
        }
        let margin = match r["worst_margin"].as_f64() {
            Some(x) => format!("{x:.3e}"),
            None => "-".to_string(),
        };
        out.push_str(&format!(
            "{:<15} {:<15} worst margin {:>11}  samples {}\n",
            r["axiom"].as_str().unwrap_or("?"),
            verdict,
            margin,
            r["samples"]
        ));
        if verdict == "fail" {
            out.push_str(&format!("    witness: {}\n", r["witness"]));
        }
    }
    out.push_str(&format!(
        "{} pass, {} fail, {} not-applicable\n",
        counts[0], counts[1], counts[2]
    ));
    out
}
