use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use cbforms::io;
use cbforms::linalg::CMatrix;
use cbforms::query::{tensor_of_algorithm, QueryAlgorithm};
use cbforms::random;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_cbforms"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, io::to_canonical_string(v)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_out(o: &Output) -> Value {
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

#[test]
fn convert_x1x2_to_halves() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", &json!({"n": 2, "degree": 2, "terms": [{"alpha": [1, 1], "coeff": 1}]}));
    let v = json_out(&run(&["convert", "--in", s(&f)]));
    let entries: Vec<f64> = v["entries"].as_array().unwrap().iter().map(|e| e.as_f64().unwrap()).collect();
    assert_eq!(entries, vec![0.0, 0.5, 0.5, 0.0]);
    assert_eq!(v["meta"]["seed"], 0);
    assert!(v["meta"]["version"].is_string());
}

#[test]
fn malformed_input_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"n\": 2,").unwrap();
    let out = dir.path().join("out.json");
    let o = run(&["convert", "--in", s(&bad), "--out", s(&out)]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line"));
    assert!(!out.exists());
}

#[test]
fn norms_of_small_matrices() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", &io::real_matrix_to_json(&nalgebra::DMatrix::identity(4, 4)));
    assert_eq!(json_out(&run(&["norms", "--in", s(&id)]))["inf_to_one"]["value"], 4.0);
    let h = write(&dir, "h.json", &json!([[1, 1], [1, -1]]));
    let v = json_out(&run(&["norms", "--in", s(&h)]));
    assert_eq!(v["inf_to_one"]["value"], 2.0);
    assert_eq!(v["inf_to_one"]["method"], "exact");
}

#[test]
fn norms_cap_exit_3_unless_estimating() {
    let dir = TempDir::new().unwrap();
    let mut terms = Vec::new();
    for i in 0..29 {
        let mut alpha = vec![0; 30];
        alpha[i] = 1;
        alpha[i + 1] = 1;
        terms.push(json!({"alpha": alpha, "coeff": 1}));
    }
    let f = write(&dir, "f.json", &json!({"n": 30, "degree": 2, "terms": terms}));
    let o = run(&["norms", "--in", s(&f)]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("--estimate"));
    let v = json_out(&run(&["norms", "--in", s(&f), "--estimate"]));
    assert_eq!(v["sup_norm"]["method"], "estimate");
    // a lower bound from local search; the exact value is 29
    let value = v["sup_norm"]["value"].as_f64().unwrap();
    assert!((20.0..=29.0).contains(&value));
}

#[test]
fn factorize_examples() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", &io::real_matrix_to_json(&nalgebra::DMatrix::identity(3, 3)));
    let v = json_out(&run(&["factorize", "--in", s(&id)]));
    for u in v["u"].as_array().unwrap() {
        assert!((u.as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    }
    let zero = write(&dir, "z.json", &json!([[0, 0], [0, 0]]));
    assert_eq!(run(&["factorize", "--in", s(&zero)]).code, 2);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random::sign_matrix(&mut rng, 6);
    let m = write(&dir, "m.json", &io::real_matrix_to_json(&a));
    let v = json_out(&run(&["factorize", "--in", s(&m)]));
    let norm = cbforms::norms::inf_to_one_norm(&a, 24).unwrap();
    let b = io::real_matrix_from_json(&v["B"]).unwrap();
    assert!(cbforms::norms::operator_norm(&b) <= norm * (1.0 + 1e-7));
    let k = v["K"].as_f64().unwrap();
    let (u, w) = (&v["u"], &v["v"]);
    for i in 0..6 {
        for j in 0..6 {
            let r = k * u[i].as_f64().unwrap() * b[(i, j)] * w[j].as_f64().unwrap();
            assert!((r - a[(i, j)]).abs() < 1e-9);
        }
    }
}

#[test]
fn simulate_one_query_circuit() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &json!([[0, 0.5], [0.5, 0]]));
    let v = json_out(&run(&["simulate", "--quadratic", "--in", s(&a)]));
    let k = v["K"].as_f64().unwrap();
    for (bits, value) in v["values"].as_object().unwrap() {
        let x: Vec<f64> = bits.chars().map(|c| if c == '0' { 1.0 } else { -1.0 }).collect();
        assert!((value.as_f64().unwrap() - x[0] * x[1] / k).abs() < 1e-8);
    }
}

fn identity_observable_circuit(n: usize) -> Value {
    let dim = 2 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u0 = random::unitary(&mut rng, dim);
    let u1 = random::unitary(&mut rng, dim);
    let alg = QueryAlgorithm::new(n, 1, 1, vec![u0, u1], CMatrix::identity(dim, dim)).unwrap();
    io::circuit_to_json(&alg)
}

#[test]
fn identity_observable_gives_all_ones() {
    let dir = TempDir::new().unwrap();
    let c = write(&dir, "c.json", &identity_observable_circuit(2));
    let v = json_out(&run(&["simulate", "--in", s(&c)]));
    let values = v["values"].as_object().unwrap();
    assert_eq!(values.len(), 4);
    for value in values.values() {
        assert!((value.as_f64().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn simulate_compare_against_extracted_tensor() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 2;
    let dim = 4 * n;
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |i, _| {
        Complex64::new(if i % 2 == 0 { 0.7 } else { -0.4 }, 0.0)
    }));
    let v = random::unitary(&mut rng, dim);
    let q = &v * d * v.adjoint();
    let q = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
    let us = (0..3).map(|_| random::unitary(&mut rng, dim)).collect();
    let alg = QueryAlgorithm::new(n, 2, 2, us, q).unwrap();
    let c = write(&dir, "c.json", &io::circuit_to_json(&alg));
    let t = write(&dir, "t.json", &io::tensor_to_json(&tensor_of_algorithm(&alg).unwrap()));
    let out = json_out(&run(&["simulate", "--in", s(&c), "--compare", s(&t)]));
    assert!(out["max_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn invalid_circuit_exits_2() {
    let dir = TempDir::new().unwrap();
    let mut c = identity_observable_circuit(1);
    c["unitaries"][0][0][0] = json!([2.0, 0.0]);
    let c = write(&dir, "c.json", &c);
    assert_eq!(run(&["simulate", "--in", s(&c)]).code, 2);
}

#[test]
fn separate_single_and_degenerate() {
    let o = run(&["separate", "--n", "8", "--seeds", "3"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.lines().count(), 1);
    let r: Value = serde_json::from_str(o.stdout.lines().next().unwrap()).unwrap();
    assert_eq!(r["schema"], "cbforms.separation/1");
    assert_eq!(r["meta"]["seed"], 3);
    let o = run(&["separate", "--n", "2"]);
    assert_eq!(o.code, 0);
    let r: Value = serde_json::from_str(&o.stdout).unwrap();
    assert!(r["ratio"].as_f64().unwrap().is_finite());
    assert_eq!(run(&["separate", "--n", "4000"]).code, 3);
}

#[test]
fn separate_batch_keeps_input_order() {
    let o = run(&["separate", "--n", "8,12,16", "--seeds", "0,1,2,3,4"]);
    assert_eq!(o.code, 0);
    let reports: Vec<Value> = o.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 15);
    for (k, r) in reports.iter().enumerate() {
        assert_eq!(r["n"], [8, 12, 16][k / 5]);
        assert_eq!(r["seed"], (k % 5) as u64);
    }
}

/// Factorization with `T((x,1),(x,1)) = y_j y_k`: single-row factors picking
/// variables `j` and `k` of `y = (x, 1)`.
fn picking_factorization(n: usize, j: usize, k: usize) -> Value {
    let column = |p: usize| -> Value { Value::Array((0..2 * n).map(|r| json!([[if r == p { 1.0 } else { 0.0 }, 0.0]])).collect()) };
    json!({
        "t": 1, "d": 1, "dim": 2 * n,
        "u": [[1.0, 0.0]], "v": [[1.0, 0.0]],
        "pairs": [[column(j), column(j)], [column(k), column(k)]],
    })
}

#[test]
fn certify_dictator() {
    let dir = TempDir::new().unwrap();
    let mut table = serde_json::Map::new();
    for x in cbforms::signs::all_sign_vectors(2) {
        table.insert(x.to_string(), json!(x.to_f64()[0]));
    }
    let f = write(&dir, "f.json", &Value::Object(table));
    let good = write(&dir, "good.json", &picking_factorization(2, 0, 2));
    let bad = write(&dir, "bad.json", &picking_factorization(2, 1, 2));
    let o = run(&["certify", "--in", s(&f), "--fact", s(&good), "--eps", "0"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["kind"], "cbdeg_upper");
    assert_eq!(v["payload"]["certified"], true);
    assert_ne!(run(&["certify", "--in", s(&f), "--fact", s(&bad), "--eps", "0"]).code, 0);
}

#[test]
fn certify_checks_only_the_promise_domain() {
    let dir = TempDir::new().unwrap();
    // f = x_2 on the promise x_1 = x_2; the dictator on x_1 agrees there
    let f = write(&dir, "f.json", &json!({"00": 1.0, "11": -1.0}));
    let fact = write(&dir, "fact.json", &picking_factorization(2, 0, 2));
    assert_eq!(run(&["certify", "--in", s(&f), "--fact", s(&fact)]).code, 0);
    let full = write(&dir, "full.json", &json!({"00": 1.0, "11": -1.0, "01": -1.0}));
    assert_eq!(run(&["certify", "--in", s(&full), "--fact", s(&fact)]).code, 4);
}

fn dyadic_symmetric_tensor() -> impl Strategy<Value = Value> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(order, dim)| {
        let reps = cbforms::tensor::sorted_tuples(dim, order);
        prop::collection::vec(-64i32..64, reps.len()).prop_map(move |nums| {
            let mut t = cbforms::tensor::DenseTensor::<f64>::zeros(order, dim).unwrap();
            for (rep, k) in reps.iter().zip(nums) {
                cbforms::tensor::for_each_multiset_permutation(rep, |p| t.set(p, k as f64 / 16.0));
            }
            io::tensor_to_json(&t)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convert_round_trip_is_byte_identical(t in dyadic_symmetric_tensor()) {
        let dir = TempDir::new().unwrap();
        let input = write(&dir, "t.json", &t);
        let form = dir.path().join("form.json");
        let back = dir.path().join("back.json");
        let again = dir.path().join("again.json");
        prop_assert_eq!(run(&["convert", "--in", s(&input), "--out", s(&form)]).code, 0);
        prop_assert_eq!(run(&["convert", "--in", s(&form), "--out", s(&back)]).code, 0);
        prop_assert_eq!(run(&["convert", "--in", s(&back), "--out", s(&again)]).code, 0);
        let mut expected = t.clone();
        expected["meta"] = serde_json::from_str::<Value>(&fs::read_to_string(&back).unwrap()).unwrap()["meta"].clone();
        prop_assert_eq!(fs::read_to_string(&back).unwrap(), io::to_canonical_string(&expected) + "\n");
        prop_assert_eq!(fs::read(&form).unwrap(), fs::read(&again).unwrap());
    }
}
