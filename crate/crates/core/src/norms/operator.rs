use nalgebra::{ComplexField, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const START_SEED: u64 = 0x5eed_0f_0e7a;
/// Repeated squarings of the Gram matrix before the plain power steps.
const SQUARINGS: usize = 40;
/// Above this size squaring is too expensive; plain power iteration is used.
const SQUARING_LIMIT: usize = 256;

/// Largest singular value.
///
/// Power iteration on `M^* M` from a fixed pseudo-random start. The Gram
/// matrix is first raised to the power `2^40` by normalized repeated
/// squaring, so that nearly degenerate top singular values still converge;
/// the Rayleigh quotient of the resulting vector is then refined by plain
/// power steps until its relative change drops below machine precision.
pub fn operator_norm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // work with the smaller Gram matrix
    let gram = if m.ncols() <= m.nrows() {
        m.adjoint() * m
    } else {
        m * m.adjoint()
    };
    let scale = max_abs(&gram);
    if scale == 0.0 {
        return 0.0;
    }
    let gram = gram * T::from_real(1.0 / scale);
    let dim = gram.nrows();

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let start = DVector::<T>::from_fn(dim, |_, _| T::from_real(rng.random_range(0.5..1.5)));

    let mut v = if dim <= SQUARING_LIMIT {
        let mut p = gram.clone();
        for _ in 0..SQUARINGS {
            let sq = &p * &p;
            let s = max_abs(&sq);
            if s == 0.0 || !s.is_finite() {
                break;
            }
            p = sq * T::from_real(1.0 / s);
        }
        let v = &p * &start;
        if v.norm() > 0.0 {
            v
        } else {
            start
        }
    } else {
        start
    };
    v /= T::from_real(v.norm());

    let max_steps = if dim <= SQUARING_LIMIT { 200 } else { 20_000 };
    let mut lambda = rayleigh(&gram, &v);
    for _ in 0..max_steps {
        let w = &gram * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        v = w / T::from_real(nw);
        let next = rayleigh(&gram, &v);
        let done = (next - lambda).abs() <= 1e-16 * next.abs();
        lambda = next.max(lambda);
        if done {
            break;
        }
    }
    (lambda.max(0.0) * scale).sqrt()
}

fn rayleigh<T: ComplexField<RealField = f64>>(g: &DMatrix<T>, v: &DVector<T>) -> f64 {
    v.dotc(&(g * v)).real()
}

fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.clone().modulus()).fold(0.0, f64::max)
}
