use cbforms::norms::{
    cb_lower_bound, certify_cb_at_most_one, inf_to_one_norm, real_part, sup_norm_hypercube,
    CommutationCheck, CommutingFamily,
};
use cbforms::random;
use cbforms::signs::all_sign_vectors;
use cbforms::tensor::{eval_tensor, form_of_tensor, symmetric_tensor_of_form, DenseTensor};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `max_{x,y} x^T A y` by enumerating both sides.
fn brute_inf_to_one(a: &DMatrix<f64>) -> f64 {
    let (p, q) = a.shape();
    let mut best = f64::NEG_INFINITY;
    for xb in 0..1u32 << p {
        for yb in 0..1u32 << q {
            let mut s = 0.0;
            for i in 0..p {
                for j in 0..q {
                    let sx = if xb >> i & 1 == 1 { -1.0 } else { 1.0 };
                    let sy = if yb >> j & 1 == 1 { -1.0 } else { 1.0 };
                    s += sx * a[(i, j)] * sy;
                }
            }
            best = best.max(s);
        }
    }
    best
}

fn matrix(max_dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(p, q)| {
        prop::collection::vec(-2.0f64..2.0, p * q).prop_map(move |e| DMatrix::from_vec(p, q, e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inf_to_one_matches_brute_force_and_transpose(a in matrix(6)) {
        let v = inf_to_one_norm(&a, 24).unwrap();
        prop_assert!((v - brute_inf_to_one(&a)).abs() <= 1e-12 * (1.0 + v));
        prop_assert!((v - inf_to_one_norm(&a.transpose(), 24).unwrap()).abs() <= 1e-12 * (1.0 + v));
    }

    #[test]
    fn scalar_witness_is_the_point_value(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::sign_matrix(&mut rng, n);
        let sym = DenseTensor::from_fn(2, n, |i| 0.5 * (a[(i[0], i[1])] + a[(i[1], i[0])])).unwrap();
        let p = form_of_tensor(&sym);
        let t = symmetric_tensor_of_form(&p).unwrap();
        let sup = sup_norm_hypercube(&p, 24).unwrap();
        let mut best: f64 = 0.0;
        for x in all_sign_vectors(n) {
            let m: Vec<DMatrix<f64>> = x.to_f64().iter().map(|&s| DMatrix::from_element(1, 1, s)).collect();
            let fam = CommutingFamily::from_real(&m, CommutationCheck::Exact).unwrap();
            let value = cb_lower_bound(&t, &fam).unwrap().value;
            prop_assert!((value - p.eval(&x.to_f64()).abs()).abs() <= 1e-12);
            best = best.max(value);
        }
        prop_assert!((best - sup).abs() <= 1e-12);
    }
}

#[test]
fn quadratic_sup_below_bilinear_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = random::sign_matrix(&mut rng, 6);
        let t = DenseTensor::from_entries(2, 6, m.transpose().iter().copied().collect()).unwrap();
        let sup = sup_norm_hypercube(&form_of_tensor(&t), 24).unwrap();
        assert!(sup <= inf_to_one_norm(&m, 24).unwrap() + 1e-12);
    }
}

#[test]
fn certified_tensors_are_bounded_on_sign_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3usize {
        let dim = 2 * n;
        for _ in 0..4 {
            let f = random::factorization(&mut rng, 1, 2, 3, dim);
            let cert = certify_cb_at_most_one(&f).unwrap();
            assert!(cert.certified);
            let t = real_part(&cert.tensor);
            let signs: Vec<Vec<f64>> = all_sign_vectors(dim).map(|x| x.to_f64()).collect();
            for y1 in &signs {
                for y2 in &signs {
                    assert!(eval_tensor(&t, &[y1, y2]).unwrap().abs() <= 1.0 + 1e-10);
                }
            }
        }
    }
}

#[test]
fn lower_bounds_never_exceed_certified_upper_bounds() {
    // a certified factorization has cb norm at most one, so every commuting
    // witness applied to its real tensor gives at most one
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let f = random::factorization(&mut rng, 1, 1, 2, 4);
        let t = real_part(&certify_cb_at_most_one(&f).unwrap().tensor);
        let t = symmetric_tensor_of_form(&form_of_tensor(&t)).unwrap();
        for x in all_sign_vectors(4) {
            let m: Vec<DMatrix<f64>> = x
                .to_f64()
                .iter()
                .map(|&s| DMatrix::from_element(1, 1, s))
                .collect();
            let fam = CommutingFamily::from_real(&m, CommutationCheck::Exact).unwrap();
            assert!(cb_lower_bound(&t, &fam).unwrap().value <= 1.0 + 1e-8);
        }
    }
}
