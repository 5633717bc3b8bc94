//! Worked examples printed by `spcheck demo`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::fmt::Write;

use sp_structure::models::make_hilbert;
use sp_structure::observables::{apply, check_omega_signs, hermitian_to_observable, mean_value, OmegaVerdict};
use sp_structure::phases::{continuity_bound, near_states as family};
use sp_structure::{Complex64, DMatrix};
use sp_structure::{Result, State};

/// Rounds to 12 decimals and drops trailing zeros.
pub fn short(x: f64) -> String {
    let s = format!("{:.12}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn spin_half() -> Result<String> {
    let m = make_hilbert(2)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let up_z = State::real(&[1.0, 0.0]);
    let down_z = State::real(&[0.0, 1.0]);
    let up_x = State::real(&[h, h]);
    let down_x = State::real(&[h, -h]);
    let mut out = String::new();
    writeln!(out, "spin-1/2, transition probabilities").unwrap();
    for (name, a, b) in [
        ("p(|+z>,|+x>)", &up_z, &up_x),
        ("p(|+z>,|-x>)", &up_z, &down_x),
        ("p(|+z>,|-z>)", &up_z, &down_z),
        ("p(|+x>,|-x>)", &up_x, &down_x),
    ] {
        writeln!(out, "{name} = {}", short(m.similarity(a, b)?)).unwrap();
    }
    Ok(out)
}

pub fn near_states() -> Result<String> {
    let m = make_hilbert(2)?;
    let mut out = String::new();
    writeln!(
        out,
        "{:>5} {:>7} {:>6} {:>13} {:>13} {:>8} {:>13} {:>13}",
        "r", "eps", "delta", "1-p(x,y)", "eps^2/(r(1-r))", "ratio", "slack(z=u)", "sqrt(1-p)/2"
    )
    .unwrap();
    for r in [0.2, 0.5, 0.8] {
        for eps in [1e-2, 1e-3] {
            let delta = 0.0;
            let (x, y, u) = family(r, eps, delta)?;
            let gap = 1.0 - m.similarity(&x, &y)?;
            let stated = eps * eps / (r * (1.0 - r));
            let slack = continuity_bound(&m, &x, &y, &u)?;
            writeln!(
                out,
                "{:>5} {:>7.0e} {:>6} {:>13.6e} {:>13.6e} {:>8.4} {:>13.6e} {:>13.6e}",
                r,
                eps,
                delta,
                gap,
                stated,
                gap / stated,
                slack,
                0.5 * gap.sqrt()
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn hermitian(entries: [[Complex64; 2]; 2]) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| entries[i][j])
}

pub fn pauli() -> Result<String> {
    let m = make_hilbert(2)?;
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let sigmas = [
        ("sigma_x", hermitian([[o, l], [l, o]])),
        ("sigma_y", hermitian([[o, -i], [i, o]])),
        ("sigma_z", hermitian([[l, o], [o, -l]])),
    ];
    let (theta, phi) = (FRAC_PI_3, FRAC_PI_4);
    let a = State::vector([
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]);
    let b = State::real(&[0.6, 0.8]);
    let bloch = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let mut out = String::new();
    writeln!(out, "state a = cos(pi/6)|0> + e^(i pi/4) sin(pi/6)|1>").unwrap();
    for ((name, h), expected) in sigmas.iter().zip(bloch) {
        let r = hermitian_to_observable(&m, h)?;
        let lambdas: Vec<String> = r.parts().iter().map(|p| short(p.lambda)).collect();
        let ra = apply(&m, &r, &a)?;
        let omega = match check_omega_signs(&m, &r, &a, &b, 0, 1)? {
            OmegaVerdict::Pass { .. } => "negated",
            OmegaVerdict::Fail { .. } => "violated",
            OmegaVerdict::Skipped => "undefined",
        };
        writeln!(
            out,
            "{name}: eigenvalues [{}], mean {} (Bloch {}), p(r(a), a) = {}, omega(a, b) {omega}",
            lambdas.join(", "),
            short(mean_value(&m, &r, &a)?),
            short(expected),
            short(m.similarity(&ra, &a)?),
        )
        .unwrap();
    }
    Ok(out)
}
