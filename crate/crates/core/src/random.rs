//! Seeded random instances: unitaries, contractions and factorizations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{CMatrix, CVector};
use crate::norms::{operator_norm, CbFactorization};

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn unit_vector<R: Rng>(rng: &mut R, len: usize) -> CVector {
    loop {
        let v = CVector::from_fn(len, |_, _| gaussian_complex(rng));
        let n = v.norm();
        if n > 1e-8 {
            return v / Complex64::new(n, 0.0);
        }
    }
}

/// Haar-distributed unitary from the QR decomposition of a Gaussian matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// Gaussian matrix scaled to operator norm `scale`.
pub fn contraction<R: Rng>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> CMatrix {
    let g = gaussian_matrix(rng, rows, cols);
    let n = operator_norm(&g);
    if n == 0.0 {
        g
    } else {
        g * Complex64::new(scale / n, 0.0)
    }
}

/// Factorization with random unit vectors and contractions of norm in `[0.5, 1)`.
pub fn factorization<R: Rng>(
    rng: &mut R,
    t: usize,
    d: usize,
    m: usize,
    dim: usize,
) -> CbFactorization {
    let u = unit_vector(rng, m);
    let v = unit_vector(rng, m);
    let pairs = (0..2 * t)
        .map(|_| {
            let a = rng.random_range(0.5..1.0);
            let b = rng.random_range(0.5..1.0);
            (
                contraction(rng, d * dim, m, a),
                contraction(rng, d * dim, m, b),
            )
        })
        .collect();
    CbFactorization::new(t, d, dim, u, v, pairs).expect("shapes are consistent")
}

/// Real `n x n` matrix with independent uniform `+1/-1` entries.
pub fn sign_matrix<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(unitarity_residual(&unitary(&mut rng, 12)) < 1e-13);
    }

    #[test]
    fn factorization_is_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = factorization(&mut rng, 1, 2, 3, 4);
        assert!(f.check().passes());
    }
}
