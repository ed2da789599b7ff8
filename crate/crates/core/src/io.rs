//! JSON file formats and a canonical writer.
//!
//! Canonical output sorts object keys, writes integers as integers and every
//! float as `{:.16e}` (17 significant digits), so equal values always
//! serialize to identical bytes.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grothendieck::DiagonalFactorization;
use crate::linalg::{CMatrix, CVector};
use crate::norms::CbFactorization;
use crate::query::QueryAlgorithm;
use crate::signs::{SignTable, SignVector};
use crate::tensor::{ComplexTensor, DenseTensor, Form, MultiIndex, RealTensor};

pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let f = n.as_f64().expect("json number is finite");
                write!(out, "{f:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(out, &map[key]);
            }
            out.push('}');
        }
    }
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field `{name}`")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::Parse(format!("field `{path}`: expected a nonnegative integer")))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Parse(format!("field `{path}`: expected a number")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("field `{path}`: expected an array")))
}

fn float(x: f64) -> Value {
    // serde_json keeps 1.0 as a float, so integral values still print as floats
    json!(x)
}

fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// A number or a `[re, im]` pair.
fn parse_complex(v: &Value, path: &str) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(Complex64::new(
            as_f64(re, &format!("{path}[0]"))?,
            as_f64(im, &format!("{path}[1]"))?,
        )),
        _ => Err(Error::Parse(format!(
            "field `{path}`: expected a number or [re, im]"
        ))),
    }
}

pub fn form_to_json(p: &Form) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(alpha, c)| json!({"alpha": alpha.exponents(), "coeff": float(*c)}))
        .collect();
    json!({"n": p.n(), "degree": p.degree(), "terms": terms})
}

pub fn form_from_json(v: &Value) -> Result<Form> {
    let n = as_usize(field(v, "n")?, "n")?;
    let degree = as_usize(field(v, "degree")?, "degree")?;
    let mut p = Form::zero(n, degree);
    for (k, term) in as_array(field(v, "terms")?, "terms")?.iter().enumerate() {
        let path = format!("terms[{k}]");
        let alpha = as_array(field(term, "alpha")?, &format!("{path}.alpha"))?
            .iter()
            .map(|a| as_usize(a, &format!("{path}.alpha")).map(|x| x as u32))
            .collect::<Result<Vec<_>>>()?;
        let c = as_f64(field(term, "coeff")?, &format!("{path}.coeff"))?;
        p.add_term(MultiIndex::new(alpha), c)
            .map_err(|e| Error::Parse(format!("field `{path}`: {e}")))?;
    }
    Ok(p)
}

pub fn tensor_to_json(t: &RealTensor) -> Value {
    let entries: Vec<Value> = t.entries().iter().map(|&x| float(x)).collect();
    json!({"order": t.order(), "dim": t.dim(), "complex": false, "entries": entries})
}

pub fn complex_tensor_to_json(t: &ComplexTensor) -> Value {
    let entries: Vec<Value> = t.entries().iter().map(|&z| complex(z)).collect();
    json!({"order": t.order(), "dim": t.dim(), "complex": true, "entries": entries})
}

/// Tensor file; a complex file is returned in its complex form.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorFile {
    Real(RealTensor),
    Complex(ComplexTensor),
}

pub fn tensor_from_json(v: &Value) -> Result<TensorFile> {
    let order = as_usize(field(v, "order")?, "order")?;
    let dim = as_usize(field(v, "dim")?, "dim")?;
    let is_complex = field(v, "complex")?
        .as_bool()
        .ok_or_else(|| Error::Parse("field `complex`: expected a boolean".into()))?;
    let raw = as_array(field(v, "entries")?, "entries")?;
    if is_complex {
        let entries = raw
            .iter()
            .enumerate()
            .map(|(k, e)| parse_complex(e, &format!("entries[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorFile::Complex(DenseTensor::from_entries(
            order, dim, entries,
        )?))
    } else {
        let entries = raw
            .iter()
            .enumerate()
            .map(|(k, e)| as_f64(e, &format!("entries[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(TensorFile::Real(DenseTensor::from_entries(
            order, dim, entries,
        )?))
    }
}

pub fn real_matrix_to_json(m: &DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&x| float(x)).collect()))
            .collect(),
    )
}

/// Nested rows of numbers; an object is read through its `matrix` field.
pub fn real_matrix_from_json(v: &Value) -> Result<DMatrix<f64>> {
    let v = v.get("matrix").unwrap_or(v);
    let rows = as_array(v, "matrix")?;
    let cols = rows
        .first()
        .map_or(Ok(0), |r| as_array(r, "matrix[0]").map(|r| r.len()))?;
    let mut m = DMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("matrix[{i}]"))?;
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "field `matrix[{i}]`: ragged row of length {}",
                row.len()
            )));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = as_f64(x, &format!("matrix[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

pub fn complex_matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect()))
            .collect(),
    )
}

pub fn complex_matrix_from_json(v: &Value, path: &str) -> Result<CMatrix> {
    let rows = as_array(v, path)?;
    let cols = rows
        .first()
        .map_or(Ok(0), |r| as_array(r, path).map(|r| r.len()))?;
    let mut m = CMatrix::zeros(rows.len(), cols);
    for (i, row) in rows.iter().enumerate() {
        let row = as_array(row, &format!("{path}[{i}]"))?;
        if row.len() != cols {
            return Err(Error::Parse(format!("field `{path}[{i}]`: ragged row")));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(z, &format!("{path}[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

fn complex_vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

fn complex_vector_from_json(v: &Value, path: &str) -> Result<CVector> {
    let items = as_array(v, path)?;
    let entries = items
        .iter()
        .enumerate()
        .map(|(k, z)| parse_complex(z, &format!("{path}[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(entries))
}

pub fn circuit_to_json(alg: &QueryAlgorithm) -> Value {
    json!({
        "n": alg.n(),
        "t": alg.t(),
        "w": alg.w(),
        "unitaries": alg.unitaries().iter().map(complex_matrix_to_json).collect::<Vec<_>>(),
        "observable": complex_matrix_to_json(alg.observable()),
    })
}

/// Parses and validates a circuit; unitarity and observable violations
/// surface as the library's invariant errors.
pub fn circuit_from_json(v: &Value) -> Result<QueryAlgorithm> {
    let n = as_usize(field(v, "n")?, "n")?;
    let t = as_usize(field(v, "t")?, "t")?;
    let w = as_usize(field(v, "w")?, "w")?;
    let unitaries = as_array(field(v, "unitaries")?, "unitaries")?
        .iter()
        .enumerate()
        .map(|(k, m)| complex_matrix_from_json(m, &format!("unitaries[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let observable = complex_matrix_from_json(field(v, "observable")?, "observable")?;
    QueryAlgorithm::new(n, t, w, unitaries, observable)
}

pub fn cb_factorization_to_json(f: &CbFactorization) -> Value {
    let pairs: Vec<Value> = f
        .pairs()
        .iter()
        .map(|(a, b)| json!([complex_matrix_to_json(a), complex_matrix_to_json(b)]))
        .collect();
    json!({
        "t": f.t(),
        "d": f.d(),
        "dim": f.dim(),
        "u": complex_vector_to_json(f.u()),
        "v": complex_vector_to_json(f.v()),
        "pairs": pairs,
    })
}

pub fn cb_factorization_from_json(v: &Value) -> Result<CbFactorization> {
    let t = as_usize(field(v, "t")?, "t")?;
    let d = as_usize(field(v, "d")?, "d")?;
    let dim = as_usize(field(v, "dim")?, "dim")?;
    let u = complex_vector_from_json(field(v, "u")?, "u")?;
    let w = complex_vector_from_json(field(v, "v")?, "v")?;
    let pairs = as_array(field(v, "pairs")?, "pairs")?
        .iter()
        .enumerate()
        .map(|(k, p)| match p.as_array().map(|a| a.as_slice()) {
            Some([a, b]) => Ok((
                complex_matrix_from_json(a, &format!("pairs[{k}][0]"))?,
                complex_matrix_from_json(b, &format!("pairs[{k}][1]"))?,
            )),
            _ => Err(Error::Parse(format!("field `pairs[{k}]`: expected [U, V]"))),
        })
        .collect::<Result<Vec<_>>>()?;
    CbFactorization::new(t, d, dim, u, w, pairs)
}

pub fn diagonal_factorization_to_json(f: &DiagonalFactorization, seed: u64) -> Value {
    let vector = |x: &DVector<f64>| Value::Array(x.iter().map(|&e| float(e)).collect());
    json!({
        "u": vector(&f.u),
        "v": vector(&f.v),
        "B": real_matrix_to_json(&f.b),
        "K": float(f.k),
        "norm_A": float(f.norm_a),
        "lambda_min": float(f.lambda_min),
        "seed": seed,
    })
}

pub fn table_to_json(table: &SignTable) -> Value {
    let map: Map<String, Value> = table
        .iter()
        .map(|(x, value)| (x.to_string(), float(value)))
        .collect();
    Value::Object(map)
}

/// Map from bitstrings to values; all keys must have the same length.
/// An object with a `values` field is read through that field.
pub fn table_from_json(v: &Value) -> Result<SignTable> {
    let v = v.get("values").unwrap_or(v);
    let map = v
        .as_object()
        .ok_or_else(|| Error::Parse("expected an object mapping bitstrings to numbers".into()))?;
    let n = map.keys().next().map_or(0, |k| k.len());
    let mut table = SignTable::new(n);
    for (key, value) in map {
        let x = SignVector::parse(key)?;
        table
            .insert(x, as_f64(value, key)?)
            .map_err(|e| Error::Parse(format!("field `{key}`: {e}")))?;
    }
    Ok(table)
}

/// `{"kind", "value", "slack", "payload", "seed"}`.
pub fn certificate_json(kind: &str, value: f64, slack: f64, payload: Value, seed: u64) -> Value {
    json!({
        "kind": kind,
        "value": float(value),
        "slack": float(slack),
        "payload": payload,
        "seed": seed,
    })
}
