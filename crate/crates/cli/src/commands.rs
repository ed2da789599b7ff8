use std::fs;
use std::path::Path;

use cbforms::grothendieck::{diagonal_factorize, grothendieck_value, DEFAULT_RESTARTS};
use cbforms::io::{self, TensorFile};
use cbforms::norms::{
    certify_cbdeg_upper, inf_to_one_norm, operator_norm, sup_norm_estimate, sup_norm_hypercube,
    CONTRACTION_SLACK, HARD_ENUMERATION_LIMIT, UNIT_TOL,
};
use cbforms::query::{algorithm_of_factorization, one_query_from_quadratic, QueryAlgorithm};
use cbforms::separations::certify_separation;
use cbforms::signs::{SignTable, SignVector};
use cbforms::tensor::{eval_diagonal, form_of_tensor, symmetric_tensor_of_form, Form};
use cbforms::Error;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::{Common, Format};

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_FAILURE: u8 = 4;

const RECONSTRUCTION_TOL: f64 = 1e-9;
const B_NORM_SLACK: f64 = 1e-7;
const ESTIMATE_RESTARTS: usize = 64;
/// Largest `n` accepted by `separate`; the dense cubic tensor has `n^3` entries.
const MAX_SEPARATION_N: usize = 128;

#[derive(Debug)]
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::EnumerationCap { .. } | Error::TensorTooLarge { .. } => EXIT_CAP,
            Error::SolverFailure { .. } | Error::Uncertified(_) | Error::SliceNorm { .. } => EXIT_FAILURE,
            _ => EXIT_INPUT,
        };
        let mut message = e.to_string();
        if let Error::EnumerationCap { .. } = e {
            message.push_str(&format!(
                "; raise --cap-enum (at most {HARD_ENUMERATION_LIMIT}) or pass --estimate"
            ));
        }
        Self { code, message }
    }
}

type CmdResult = Result<u8, CmdError>;

fn read_json(path: &Path) -> Result<Value, CmdError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CmdError::input(format!("cannot read {}: {e}", path.display())))?;
    io::parse(&text).map_err(|e| CmdError::input(format!("{}: {e}", path.display())))
}

fn input(common: &Common) -> Result<Value, CmdError> {
    let path = common
        .input
        .as_deref()
        .ok_or_else(|| CmdError::input("missing --in"))?;
    read_json(path)
}

fn meta(common: &Common, tolerances: Value) -> Value {
    json!({
        "tool": "cbforms",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": common.seed,
        "cap_enum": common.cap_enum,
        "tolerances": tolerances,
    })
}

fn with_meta(mut v: Value, meta: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("meta".into(), meta);
    }
    v
}

fn text_lines(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                text_lines(&map[k], &p, out);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            out.push_str(&format!("{prefix}: [{} items]\n", items.len()));
        }
        other => out.push_str(&format!("{prefix}: {}\n", io::to_canonical_string(other))),
    }
}

/// Writes canonical JSON to `--out` (or stdout); in text mode a flat
/// `key: value` summary goes to stdout.
fn emit(common: &Common, lines: &[Value]) -> Result<(), CmdError> {
    let mut body = String::new();
    for v in lines {
        body.push_str(&io::to_canonical_string(v));
        body.push('\n');
    }
    if let Some(path) = &common.out {
        fs::write(path, &body).map_err(|e| CmdError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    match common.format {
        Format::Json if common.out.is_none() => print!("{body}"),
        Format::Json => {}
        Format::Text => {
            let mut text = String::new();
            for v in lines {
                text_lines(v, "", &mut text);
            }
            print!("{text}");
        }
    }
    Ok(())
}

fn is_form(v: &Value) -> bool {
    v.get("terms").is_some()
}

fn is_tensor(v: &Value) -> bool {
    v.get("entries").is_some()
}

pub fn convert(common: &Common) -> CmdResult {
    let v = input(common)?;
    let out = if is_form(&v) {
        let p = io::form_from_json(&v)?;
        io::tensor_to_json(&symmetric_tensor_of_form(&p)?.into_dense())
    } else if is_tensor(&v) {
        match io::tensor_from_json(&v)? {
            TensorFile::Real(t) => io::form_to_json(&form_of_tensor(&t)),
            TensorFile::Complex(_) => return Err(CmdError::input("only real tensors convert to forms")),
        }
    } else {
        return Err(CmdError::input("input is neither a form nor a tensor file"));
    };
    emit(common, &[with_meta(out, meta(common, json!({})))])?;
    Ok(0)
}

fn sup_norm_report(common: &Common, p: &Form) -> Result<Value, CmdError> {
    match sup_norm_hypercube(p, common.cap_enum) {
        Ok(value) => Ok(json!({"value": value, "method": "exact"})),
        Err(Error::EnumerationCap { .. }) if common.estimate => Ok(json!({
            "value": sup_norm_estimate(p, common.seed, ESTIMATE_RESTARTS),
            "method": "estimate",
            "bound": "lower",
        })),
        Err(e) => Err(e.into()),
    }
}

pub fn norms(common: &Common) -> CmdResult {
    let v = input(common)?;
    let report = if is_form(&v) {
        let p = io::form_from_json(&v)?;
        json!({"kind": "form_norms", "n": p.n(), "degree": p.degree(), "sup_norm": sup_norm_report(common, &p)?})
    } else if is_tensor(&v) {
        let t = match io::tensor_from_json(&v)? {
            TensorFile::Real(t) => t,
            TensorFile::Complex(_) => return Err(CmdError::input("sup norm needs a real tensor")),
        };
        let p = form_of_tensor(&t);
        json!({"kind": "form_norms", "n": p.n(), "degree": p.degree(), "sup_norm": sup_norm_report(common, &p)?})
    } else {
        let a = io::real_matrix_from_json(&v)?;
        let inf_to_one = match inf_to_one_norm(&a, common.cap_enum) {
            Ok(value) => json!({"value": value, "method": "exact"}),
            Err(Error::EnumerationCap { .. }) if common.estimate => {
                let sdp = grothendieck_value(&a, common.seed, DEFAULT_RESTARTS);
                json!({
                    "method": "estimate",
                    "lower": sdp.rounding_value,
                    "relaxation": sdp.value,
                })
            }
            Err(e) => return Err(e.into()),
        };
        json!({
            "kind": "matrix_norms",
            "rows": a.nrows(),
            "cols": a.ncols(),
            "inf_to_one": inf_to_one,
            "operator": {"value": operator_norm(&a), "method": "power_iteration"},
        })
    };
    emit(common, &[with_meta(report, meta(common, json!({})))])?;
    Ok(0)
}

pub fn factorize(common: &Common) -> CmdResult {
    let a = io::real_matrix_from_json(&input(common)?)?;
    let tol = common.tol.unwrap_or(RECONSTRUCTION_TOL);
    let f = diagonal_factorize(&a, None, common.cap_enum)?;
    let err = f.reconstruction_error(&a);
    let b_norm = f.b_norm();
    if err > tol {
        return Err(CmdError::failure(format!("reconstruction error {err:e} exceeds {tol:e}")));
    }
    if b_norm > f.norm_a * (1.0 + B_NORM_SLACK) {
        return Err(CmdError::failure(format!(
            "||B|| = {b_norm} exceeds ||A||_inf->1 = {} (lambda_min {:e})",
            f.norm_a, f.lambda_min
        )));
    }
    let mut out = io::diagonal_factorization_to_json(&f, common.seed);
    if let Value::Object(map) = &mut out {
        map.insert("reconstruction_error".into(), json!(err));
        map.insert("B_norm".into(), json!(b_norm));
    }
    let tolerances = json!({"reconstruction": tol, "b_norm_slack": B_NORM_SLACK});
    emit(common, &[with_meta(out, meta(common, tolerances))])?;
    Ok(0)
}

fn read_domain(path: &Path, n: usize) -> Result<Vec<SignVector>, CmdError> {
    let v = read_json(path)?;
    let items = v
        .as_array()
        .ok_or_else(|| CmdError::input("domain file must be an array of bitstrings"))?;
    items
        .iter()
        .map(|s| {
            let s = s.as_str().ok_or_else(|| CmdError::input("domain entries must be strings"))?;
            let x = SignVector::parse(s)?;
            if x.len() != n {
                return Err(CmdError::input(format!("domain entry {s} does not have {n} bits")));
            }
            Ok(x)
        })
        .collect()
}

/// Largest `|table(x) - g(x)|` where `g` is a form or tensor over `n` or
/// `2n` variables, evaluated at `x` or `(x, 1)`.
fn compare(table: &SignTable, path: &Path) -> Result<f64, CmdError> {
    let v = read_json(path)?;
    let n = table.n();
    let eval: Box<dyn Fn(&SignVector) -> Result<f64, CmdError>> = if is_form(&v) {
        let p = io::form_from_json(&v)?;
        let wide = p.n() == 2 * n;
        if !wide && p.n() != n {
            return Err(CmdError::input(format!("comparison form has {} variables", p.n())));
        }
        Box::new(move |x| Ok(p.eval(&if wide { x.with_ones() } else { x.to_f64() })))
    } else {
        let t = match io::tensor_from_json(&v)? {
            TensorFile::Real(t) => t,
            TensorFile::Complex(_) => return Err(CmdError::input("comparison tensor must be real")),
        };
        let wide = t.dim() == 2 * n;
        if !wide && t.dim() != n {
            return Err(CmdError::input(format!("comparison tensor has dimension {}", t.dim())));
        }
        Box::new(move |x| Ok(eval_diagonal(&t, &if wide { x.with_ones() } else { x.to_f64() })?))
    };
    let mut worst: f64 = 0.0;
    for (x, value) in table.iter() {
        worst = worst.max((value - eval(x)?).abs());
    }
    Ok(worst)
}

pub fn simulate(common: &Common, compile: bool, quadratic: bool, domain: Option<&Path>) -> CmdResult {
    let v = input(common)?;
    let mut extra = Map::new();
    let alg: QueryAlgorithm = if compile {
        algorithm_of_factorization(&io::cb_factorization_from_json(&v)?)?
    } else if quadratic {
        let a = io::real_matrix_from_json(&v)?;
        let one = one_query_from_quadratic(&a, common.cap_enum)?;
        extra.insert("K".into(), json!(one.k));
        one.algorithm
    } else {
        io::circuit_from_json(&v)?
    };
    let n = alg.n();
    let table = match domain {
        Some(path) => alg.expectation_table(Some(&read_domain(path, n)?))?,
        None => {
            if n > common.cap_enum.min(HARD_ENUMERATION_LIMIT) {
                return Err(Error::EnumerationCap { n, cap: common.cap_enum }.into());
            }
            alg.expectation_table(None)?
        }
    };
    if let Some(path) = &common.compare {
        let deviation = compare(&table, path)?;
        if common.format == Format::Json && common.out.is_some() {
            eprintln!("max deviation: {deviation:e}");
        }
        extra.insert("max_deviation".into(), json!(deviation));
    }
    let mut out = json!({"n": n, "t": alg.t(), "values": io::table_to_json(&table)});
    if let Value::Object(map) = &mut out {
        map.extend(extra);
    }
    emit(common, &[with_meta(out, meta(common, json!({})))])?;
    Ok(0)
}

pub fn separate(common: &Common, sizes: &[usize], seeds: &[u64], tau: f64) -> CmdResult {
    if let Some(&n) = sizes.iter().find(|&&n| n > MAX_SEPARATION_N) {
        return Err(CmdError {
            code: EXIT_CAP,
            message: format!("n = {n} exceeds the separation size limit {MAX_SEPARATION_N}"),
        });
    }
    let seeds = if seeds.is_empty() { vec![common.seed] } else { seeds.to_vec() };
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(n, seed)| certify_separation(n, seed, tau, common.cap_enum))
        .collect::<Result<Vec<_>, _>>()?;
    let all_ok = reports.iter().all(|r| r.floor_satisfied);
    let lines = reports
        .iter()
        .map(|r| {
            let mut m = meta(common, json!({"floor": 1e-8}));
            m["seed"] = json!(r.seed);
            serde_json::to_value(r).map(|v| with_meta(v, m))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CmdError::input(e.to_string()))?;
    emit(common, &lines)?;
    Ok(if all_ok { 0 } else { EXIT_FAILURE })
}

pub fn certify(common: &Common, fact_path: &Path, eps: f64) -> CmdResult {
    let table = io::table_from_json(&input(common)?)?;
    let fact = io::cb_factorization_from_json(&read_json(fact_path)?)?;
    let verdict = certify_cbdeg_upper(&table, eps, &fact)?;
    let mut max_error: f64 = 0.0;
    for (x, fx) in table.iter() {
        max_error = max_error.max((fact.eval_diagonal(&x.with_ones())?.re - fx).abs());
    }
    let payload = json!({
        "certified": verdict,
        "t": fact.t(),
        "eps": eps,
        "domain_size": table.len(),
        "max_error": max_error,
    });
    let cert = io::certificate_json("cbdeg_upper", fact.t() as f64, fact.check().slack(), payload, common.seed);
    let tolerances = json!({"unit": UNIT_TOL, "contraction": CONTRACTION_SLACK});
    emit(common, &[with_meta(cert, meta(common, tolerances))])?;
    Ok(if verdict { 0 } else { EXIT_FAILURE })
}
