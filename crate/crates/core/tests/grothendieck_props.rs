use cbforms::grothendieck::{
    diagonal_factorize, grothendieck_value, hahn_banach_feasibility_check, DEFAULT_RESTARTS,
};
use cbforms::random;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn value_invariant_under_sign_flips() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random::sign_matrix(&mut rng, 6);
    let base = grothendieck_value(&a, 0, DEFAULT_RESTARTS).value;
    for _ in 0..20 {
        let r: Vec<f64> = (0..6)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let c: Vec<f64> = (0..6)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let flipped = DMatrix::from_fn(6, 6, |i, j| r[i] * a[(i, j)] * c[j]);
        let v = grothendieck_value(&flipped, 0, DEFAULT_RESTARTS).value;
        assert!((v - base).abs() <= 1e-6 * base, "{v} vs {base}");
    }
}

#[test]
fn feasibility_is_monotone_in_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let a = random::sign_matrix(&mut rng, 5);
        let f = diagonal_factorize(&a, None, 24).unwrap();
        let (sigma, mu) = (f.sigma(), f.mu());
        let mut last = f64::NEG_INFINITY;
        for k in [f.k, f.k * 1.05, f.k * 1.2, 1.7823_f64.max(f.k * 1.3)] {
            let lm = hahn_banach_feasibility_check(&a, &sigma, &mu, k, 24).unwrap();
            assert!(lm >= -1e-10);
            assert!(lm >= last - 1e-12);
            last = lm;
        }
        for probe in f.trace.iter().filter(|p| p.k >= f.k) {
            assert!(hahn_banach_feasibility_check(&a, &sigma, &mu, probe.k, 24).unwrap() >= -1e-10);
        }
    }
}

#[test]
fn factorization_of_identity_is_uniform() {
    let f = diagonal_factorize(&DMatrix::identity(4, 4), None, 24).unwrap();
    for x in f.u.iter().chain(f.v.iter()) {
        assert!((x - 0.5).abs() < 1e-6);
    }
    assert!(f.reconstruction_error(&DMatrix::identity(4, 4)) < 1e-12);
}
