//! Reading matrices and Mobius pairs from JSON files and argument tokens.
//!
//! A matrix file is either a bare array of rows or `{"n": n, "matrix": rows}`.
//! Each entry may be a number, an expression string (see [`crate::expr`]),
//! a `[re, im]` pair or a `[re, i, j, k]` quadruple whose components are
//! numbers or real expression strings.

use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::expr::{parse_complex, parse_quaternion, parse_real};
use crate::geometry::{check_membership, HermitianSpace, Isometry};
use crate::mobius::MobiusPair;
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;
use crate::{Error, Result};

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        position: e.column(),
        message: format!("{}: line {}: {e}", path.display(), e.line()),
    })
}

fn real_component(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Invalid(format!("{what}: number out of range"))),
        Value::String(s) => parse_real(s),
        _ => Err(Error::Invalid(format!("{what}: expected a number or an expression string"))),
    }
}

pub fn quaternion_entry(v: &Value, what: &str) -> Result<Quaternion> {
    match v {
        Value::String(s) => parse_quaternion(s),
        Value::Array(parts) if parts.len() == 2 || parts.len() == 4 => {
            let mut c = [0.0; 4];
            for (slot, p) in c.iter_mut().zip(parts) {
                *slot = real_component(p, what)?;
            }
            Ok(Quaternion::from(c))
        }
        Value::Array(parts) => {
            Err(Error::Invalid(format!("{what}: arrays must have 2 (complex) or 4 (quaternion) components, got {}", parts.len())))
        }
        other => real_component(other, what).map(Quaternion::real),
    }
}

pub fn complex_entry(v: &Value, what: &str) -> Result<Complex64> {
    match v {
        Value::String(s) => parse_complex(s),
        Value::Array(parts) if parts.len() == 2 => Ok(Complex64::new(real_component(&parts[0], what)?, real_component(&parts[1], what)?)),
        Value::Array(_) => Err(Error::Invalid(format!("{what}: complex entries are [re, im]"))),
        other => real_component(other, what).map(|x| Complex64::new(x, 0.0)),
    }
}

/// A square quaternionic matrix and its `n`.
pub fn matrix_from_json(v: &Value) -> Result<(usize, QMatrix)> {
    let (declared, rows) = match v {
        Value::Array(_) => (None, v),
        Value::Object(map) => {
            let rows = map.get("matrix").ok_or_else(|| Error::Invalid("missing \"matrix\"".into()))?;
            let n = match map.get("n") {
                None => None,
                Some(Value::Number(x)) => Some(x.as_u64().ok_or_else(|| Error::Invalid("\"n\" must be a positive integer".into()))? as usize),
                Some(_) => return Err(Error::Invalid("\"n\" must be a positive integer".into())),
            };
            (n, rows)
        }
        _ => return Err(Error::Invalid("expected an array of rows or an object with \"matrix\"".into())),
    };
    let rows = rows.as_array().ok_or_else(|| Error::Invalid("\"matrix\" must be an array of rows".into()))?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Invalid(format!("row {r} is not an array")))?;
        let entries = row
            .iter()
            .enumerate()
            .map(|(c, e)| quaternion_entry(e, &format!("entry ({r},{c})")))
            .collect::<Result<Vec<_>>>()?;
        parsed.push(entries);
    }
    let m = QMatrix::from_rows(&parsed)?;
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::DimensionMismatch(format!("need a square matrix of size n+1 >= 2, got {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows() - 1;
    if let Some(d) = declared {
        if d != n {
            return Err(Error::DimensionMismatch(format!("\"n\" is {d} but the matrix is {}x{}", m.rows(), m.cols())));
        }
    }
    Ok((n, m))
}

pub fn read_matrix(path: &Path) -> Result<(usize, QMatrix)> {
    matrix_from_json(&read_json(path)?)
}

pub fn read_isometry(path: &Path, membership_tol: f64) -> Result<Isometry> {
    let (n, m) = read_matrix(path)?;
    check_membership(&m, &HermitianSpace::new(n)?, membership_tol)
}

/// `{"theta": ..., "h": [4 complex entries]}`.
pub fn mobius_from_json(v: &Value) -> Result<MobiusPair> {
    let theta = v.get("theta").ok_or_else(|| Error::Invalid("missing \"theta\"".into()))?;
    let theta = real_component(theta, "theta")?;
    let h = v.get("h").and_then(Value::as_array).ok_or_else(|| Error::Invalid("\"h\" must be an array of 4 entries".into()))?;
    mobius_from_parts(theta, h.iter().enumerate().map(|(i, e)| complex_entry(e, &format!("h[{i}]"))).collect::<Result<Vec<_>>>()?)
}

pub fn mobius_from_tokens(theta: &str, h: &[String]) -> Result<MobiusPair> {
    let theta = parse_real(theta)?;
    mobius_from_parts(theta, h.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>>>()?)
}

fn mobius_from_parts(theta: f64, h: Vec<Complex64>) -> Result<MobiusPair> {
    let h: [Complex64; 4] = h
        .try_into()
        .map_err(|v: Vec<Complex64>| Error::Invalid(format!("h needs 4 entries a b c d, got {}", v.len())))?;
    MobiusPair::new(theta, h)
}
