//! Concrete model constructors and the JSON fixture formats.
//!
//! Fixture schemas (all JSON, complex numbers as `[re, im]` pairs):
//!
//! ```text
//! {"kind":"matrix","n":<int>,"p":[[<float>,...],...]}
//! {"kind":"hilbert_state","dim":<int>,"amplitudes":[[re,im],...]}
//! {"kind":"sectored","dims":[<int>,...]}
//! ```

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::state::{CVector, State};
use crate::structure::{Repr, SectorLayout, SpModel};

/// A finite model given extensionally by its similarity table. No axiom is
/// assumed; the checker judges it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixModel {
    pub(crate) n: usize,
    pub(crate) p: Vec<Vec<f64>>,
}

impl MatrixModel {
    /// Builds a model from a square table of finite reals.
    pub fn new(p: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::SchemaError(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::SchemaError(format!("entry ({i}, {j}) is not finite")));
            }
        }
        Ok(Self { n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.p
    }

    /// Largest `|P[i][j] − P[j][i]|` and the first pair attaining it.
    pub fn asymmetry(&self) -> (f64, (usize, usize)) {
        let mut worst = (0.0, (0, 0));
        for i in 0..self.n {
            for j in i + 1..self.n {
                let d = (self.p[i][j] - self.p[j][i]).abs();
                if d > worst.0 {
                    worst = (d, (i, j));
                }
            }
        }
        worst
    }
}

/// Hilbert dimension of each superselection sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorDescriptor {
    pub sector_dims: Vec<usize>,
}

impl SectorDescriptor {
    pub fn new(sector_dims: Vec<usize>) -> Self {
        Self { sector_dims }
    }

    pub fn is_valid(&self) -> bool {
        !self.sector_dims.is_empty() && self.sector_dims.iter().all(|&d| d >= 1)
    }
}

/// Classical model on `n` states with Kronecker-delta similarity.
pub fn make_classical(n: usize) -> Result<SpModel> {
    if n == 0 {
        return Err(Error::EmptyModel);
    }
    Ok(SpModel::from_repr(Repr::Classical { n }))
}

/// Unit vectors of `ℂ^d` with `p(x, y) = |⟨x, y⟩|²`.
pub fn make_hilbert(d: usize) -> Result<SpModel> {
    if d == 0 {
        return Err(Error::EmptyModel);
    }
    Ok(SpModel::from_repr(Repr::Hilbert {
        layout: SectorLayout::new(&[d]),
        perturbation: None,
    }))
}

/// Direct sum of Hilbert sectors with zero similarity across sectors.
pub fn make_sectored(s: &SectorDescriptor) -> Result<SpModel> {
    if !s.is_valid() {
        return Err(Error::EmptyModel);
    }
    Ok(SpModel::from_repr(Repr::Sectored {
        layout: SectorLayout::new(&s.sector_dims),
    }))
}

pub fn make_matrix(m: MatrixModel) -> SpModel {
    SpModel::from_repr(Repr::Matrix(m))
}

fn parse_json(bytes: &[u8]) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::ParseError(e.to_string()))
}

fn expect_kind(v: &Value, kind: &str) -> Result<()> {
    match v.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(Error::SchemaError(format!("expected kind \"{kind}\", got \"{k}\""))),
        None => Err(Error::SchemaError("missing string field \"kind\"".into())),
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::SchemaError(format!("missing field \"{name}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::SchemaError(format!("{what} must be a non-negative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::SchemaError(format!("{what} must be a finite number")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::SchemaError(format!("{what} must be an array")))
}

/// Parses a `[re, im]` pair.
pub(crate) fn parse_complex(v: &Value, what: &str) -> Result<Complex64> {
    let pair = as_array(v, what)?;
    if pair.len() != 2 {
        return Err(Error::SchemaError(format!("{what} must be a [re, im] pair")));
    }
    Ok(Complex64::new(as_f64(&pair[0], what)?, as_f64(&pair[1], what)?))
}

/// Parses a list of `[re, im]` pairs.
pub(crate) fn parse_complex_vector(v: &Value, what: &str) -> Result<CVector> {
    let items = as_array(v, what)?;
    let mut out = Vec::with_capacity(items.len());
    for (i, z) in items.iter().enumerate() {
        out.push(parse_complex(z, &format!("{what}[{i}]"))?);
    }
    Ok(CVector::from_vec(out))
}

pub(crate) fn parse_value(bytes: &[u8]) -> Result<Value> {
    parse_json(bytes)
}

pub(crate) fn schema_field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    field(v, name)
}

pub(crate) fn schema_usize(v: &Value, what: &str) -> Result<usize> {
    as_usize(v, what)
}

pub(crate) fn schema_f64(v: &Value, what: &str) -> Result<f64> {
    as_f64(v, what)
}

pub(crate) fn schema_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    as_array(v, what)
}

/// Loads `{"kind":"matrix","n":..,"p":[[..],..]}`.
pub fn load_matrix_model(bytes: &[u8]) -> Result<MatrixModel> {
    let v = parse_json(bytes)?;
    matrix_from_value(&v)
}

fn matrix_from_value(v: &Value) -> Result<MatrixModel> {
    expect_kind(v, "matrix")?;
    let n = as_usize(field(v, "n")?, "n")?;
    let rows = as_array(field(v, "p")?, "p")?;
    if rows.len() != n {
        return Err(Error::SchemaError(format!("p has {} rows but n = {n}", rows.len())));
    }
    let mut p = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("p[{i}]"))?;
        let mut out = Vec::with_capacity(row.len());
        for (j, e) in row.iter().enumerate() {
            out.push(as_f64(e, &format!("p[{i}][{j}]"))?);
        }
        p.push(out);
    }
    MatrixModel::new(p)
}

/// Loads `{"kind":"hilbert_state","dim":..,"amplitudes":[[re,im],..]}`. The
/// amplitudes must form a unit vector within the default `tol_eq`.
pub fn load_hilbert_state(bytes: &[u8]) -> Result<State> {
    let v = parse_json(bytes)?;
    expect_kind(&v, "hilbert_state")?;
    let dim = as_usize(field(&v, "dim")?, "dim")?;
    let amps = parse_complex_vector(field(&v, "amplitudes")?, "amplitudes")?;
    if amps.len() != dim {
        return Err(Error::SchemaError(format!(
            "dim = {dim} but {} amplitudes given",
            amps.len()
        )));
    }
    let state = State::Vector(amps);
    make_hilbert(dim.max(1))?.validate(&state)?;
    Ok(state)
}

/// Loads `{"kind":"sectored","dims":[..]}`.
pub fn load_sector_descriptor(bytes: &[u8]) -> Result<SectorDescriptor> {
    let v = parse_json(bytes)?;
    descriptor_from_value(&v)
}

fn descriptor_from_value(v: &Value) -> Result<SectorDescriptor> {
    expect_kind(v, "sectored")?;
    let dims = as_array(field(v, "dims")?, "dims")?
        .iter()
        .enumerate()
        .map(|(i, d)| as_usize(d, &format!("dims[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(SectorDescriptor::new(dims))
}

/// Loads any model file: a matrix model or a sectored descriptor.
pub fn load_model(bytes: &[u8]) -> Result<SpModel> {
    let v = parse_json(bytes)?;
    match v.get("kind").and_then(Value::as_str) {
        Some("matrix") => Ok(make_matrix(matrix_from_value(&v)?)),
        Some("sectored") => make_sectored(&descriptor_from_value(&v)?),
        Some(k) => Err(Error::SchemaError(format!("\"{k}\" is not a model kind"))),
        None => Err(Error::SchemaError("missing string field \"kind\"".into())),
    }
}

/// Parses a built-in model name:
/// `hilbert:D`, `classical:N`, `sectored:D1,D2,..` or
/// `perturbed-hilbert:D:NOISE[:SEED]`.
pub fn parse_builtin(spec: &str) -> Result<SpModel> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> Result<usize> {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::ParseError(format!("bad integer \"{s}\" in builtin model \"{spec}\"")))
    };
    match parts.as_slice() {
        ["hilbert", d] => make_hilbert(num(d)?),
        ["classical", n] => make_classical(num(n)?),
        ["sectored", dims] => {
            let dims = dims.split(',').map(num).collect::<Result<Vec<_>>>()?;
            make_sectored(&SectorDescriptor::new(dims))
        }
        ["perturbed-hilbert", d, noise, rest @ ..] if rest.len() <= 1 => {
            let noise: f64 = noise
                .parse()
                .map_err(|_| Error::ParseError(format!("bad noise \"{noise}\"")))?;
            let seed = match rest.first() {
                Some(s) => s
                    .parse::<u64>()
                    .map_err(|_| Error::ParseError(format!("bad seed \"{s}\"")))?,
                None => 0,
            };
            make_hilbert(num(d)?)?.with_perturbation(noise, seed)
        }
        _ => Err(Error::ParseError(format!("unknown builtin model \"{spec}\""))),
    }
}
