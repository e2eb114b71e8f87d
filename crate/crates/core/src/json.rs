//! JSON encodings of the two on-disk formats.
//!
//! Norm: `{ "field": "R"|"C", "dim": n, "support": [[x1,...,xn], ...] }`.
//! Basis: `{ "kind": "...", "vectors": [[...],...], "values": [...] }`.
//!
//! Real coordinates are plain numbers; complex coordinates are `[re, im]`
//! pairs (always pairs, even when the imaginary part is zero, which is how a
//! basis file's field is recognized on load). Round-trips are value-exact:
//! serde_json prints the shortest representation that parses back to the
//! same f64.

use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::extremal::{BasisKind, ExtremalBasis};
use crate::linalg::{ScalarField, Vector};
use crate::norm::NormSpec;

fn num(x: f64) -> Result<Value> {
    Number::from_f64(x)
        .map(Value::Number)
        .ok_or_else(|| Error::Json(format!("non-finite number {x}")))
}

fn coord_value(field: ScalarField, z: Complex64) -> Result<Value> {
    match field {
        ScalarField::Real => num(z.re),
        ScalarField::Complex => Ok(Value::Array(vec![num(z.re)?, num(z.im)?])),
    }
}

fn vector_value(v: &Vector) -> Result<Value> {
    let coords: Result<Vec<Value>> = v
        .coords()
        .iter()
        .map(|&z| coord_value(v.field(), z))
        .collect();
    Ok(Value::Array(coords?))
}

/// Coordinate-array encoding of a single vector (plain numbers for real,
/// `[re, im]` pairs for complex).
pub fn vector_to_json(v: &Vector) -> Value {
    vector_value(v).expect("vector coordinates are finite")
}

fn parse_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Json(format!("expected a number for {what}, got {v}")))
}

fn parse_vector(field: ScalarField, dim: usize, v: &Value, what: &str) -> Result<Vector> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Json(format!("expected an array for {what}")))?;
    if arr.len() != dim {
        return Err(Error::Json(format!(
            "{what}: expected {dim} coordinates, got {}",
            arr.len()
        )));
    }
    match field {
        ScalarField::Real => {
            let coords: Result<Vec<f64>> = arr
                .iter()
                .map(|x| match x {
                    Value::Number(_) => parse_f64(x, what),
                    _ => Err(Error::Json(format!(
                        "{what}: real coordinates must be plain numbers"
                    ))),
                })
                .collect();
            Vector::real(&coords?)
        }
        ScalarField::Complex => {
            let coords: Result<Vec<(f64, f64)>> = arr
                .iter()
                .map(|x| {
                    let pair = x.as_array().ok_or_else(|| {
                        Error::Json(format!(
                            "{what}: complex coordinates must be [re, im] pairs"
                        ))
                    })?;
                    if pair.len() != 2 {
                        return Err(Error::Json(format!(
                            "{what}: complex coordinate has arity {}, expected 2",
                            pair.len()
                        )));
                    }
                    Ok((parse_f64(&pair[0], what)?, parse_f64(&pair[1], what)?))
                })
                .collect();
            Vector::complex(&coords?)
        }
    }
}

pub fn norm_to_json(f: &NormSpec) -> Value {
    let support: Vec<Value> = f
        .support()
        .iter()
        .map(|u| vector_value(u).expect("support coordinates are finite"))
        .collect();
    json!({
        "field": f.field().to_string(),
        "dim": f.dim(),
        "support": support,
    })
}

pub fn norm_from_json(v: &Value) -> Result<NormSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Json("norm file must be a JSON object".into()))?;
    let field = match obj.get("field").and_then(Value::as_str) {
        Some("R") => ScalarField::Real,
        Some("C") => ScalarField::Complex,
        other => {
            return Err(Error::Json(format!(
                "field must be \"R\" or \"C\", got {other:?}"
            )))
        }
    };
    let dim =
        obj.get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("dim must be a positive integer".into()))? as usize;
    let support_val = obj
        .get("support")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("support must be an array of vectors".into()))?;
    let support: Result<Vec<Vector>> = support_val
        .iter()
        .map(|u| parse_vector(field, dim, u, "support vector"))
        .collect();
    NormSpec::new(field, dim, support?)
}

pub fn norm_from_str(s: &str) -> Result<NormSpec> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    norm_from_json(&v)
}

pub fn norm_to_string(f: &NormSpec) -> String {
    serde_json::to_string_pretty(&norm_to_json(f)).expect("valid value")
}

fn kind_from_str(s: &str) -> Result<BasisKind> {
    match s {
        "minimal" => Ok(BasisKind::Minimal),
        "maximal" => Ok(BasisKind::Maximal),
        "external" => Ok(BasisKind::External),
        other => Err(Error::Json(format!("unknown basis kind {other:?}"))),
    }
}

pub fn basis_to_json(b: &ExtremalBasis) -> Value {
    let vectors: Vec<Value> = b
        .vectors()
        .iter()
        .map(|v| vector_value(v).expect("basis coordinates are finite"))
        .collect();
    let values: Vec<Value> = b
        .values()
        .iter()
        .map(|&x| num(x).expect("basis values are finite"))
        .collect();
    json!({
        "kind": b.kind().as_str(),
        "vectors": vectors,
        "values": values,
    })
}

/// Parse a basis file. The field is inferred from the coordinate encoding:
/// `[re, im]` pairs mean complex, plain numbers mean real.
pub fn basis_from_json(v: &Value) -> Result<ExtremalBasis> {
    let obj: &Map<String, Value> = v
        .as_object()
        .ok_or_else(|| Error::Json("basis file must be a JSON object".into()))?;
    let kind = kind_from_str(
        obj.get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Json("kind must be a string".into()))?,
    )?;
    let vectors_val = obj
        .get("vectors")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("vectors must be an array".into()))?;
    if vectors_val.is_empty() {
        return Err(Error::Json("basis must contain at least one vector".into()));
    }
    let first = vectors_val[0]
        .as_array()
        .ok_or_else(|| Error::Json("basis vectors must be arrays".into()))?;
    if first.is_empty() {
        return Err(Error::Json("basis vectors must be nonempty".into()));
    }
    let field = if first[0].is_array() {
        ScalarField::Complex
    } else {
        ScalarField::Real
    };
    let dim = first.len();
    let vectors: Result<Vec<Vector>> = vectors_val
        .iter()
        .map(|u| parse_vector(field, dim, u, "basis vector"))
        .collect();
    let values_val = obj
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Json("values must be an array".into()))?;
    let values: Result<Vec<f64>> = values_val.iter().map(|x| parse_f64(x, "value")).collect();
    ExtremalBasis::from_parts(kind, vectors?, values?)
}

pub fn basis_from_str(s: &str) -> Result<ExtremalBasis> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Json(e.to_string()))?;
    basis_from_json(&v)
}

pub fn basis_to_string(b: &ExtremalBasis) -> String {
    serde_json::to_string_pretty(&basis_to_json(b)).expect("valid value")
}
