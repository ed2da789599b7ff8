//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn to_complex_vector(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Frobenius norm of `M^* M - I`, an upper bound on the operator-norm residual.
pub fn unitarity_residual<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let gram = m.adjoint() * m;
    let n = m.nrows();
    (gram - DMatrix::<T>::identity(n, n)).norm()
}

/// Frobenius norm of `M - M^*`.
pub fn hermiticity_residual<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    (m - m.adjoint()).norm()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen<T: ComplexField<RealField = f64>>(h: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    // symmetrize first so round-off asymmetry cannot leak into the solver
    let sym = (h + h.adjoint()) * T::from_real(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])].clone()
    });
    (values, vectors)
}

/// Smallest eigenvalue of a real symmetric matrix with a unit eigenvector.
pub fn lambda_min(h: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (values, vectors) = hermitian_eigen(h);
    (values[0], vectors.column(0).into_owned())
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative eigenvalues from round-off are clamped to zero.
pub fn psd_sqrt<T: ComplexField<RealField = f64>>(h: &DMatrix<T>) -> DMatrix<T> {
    let (values, vectors) = hermitian_eigen(h);
    let n = h.nrows();
    let mut scaled = vectors.clone();
    for (c, &lam) in values.iter().enumerate() {
        let s = T::from_real(lam.max(0.0).sqrt());
        for r in 0..n {
            scaled[(r, c)] *= s.clone();
        }
    }
    scaled * vectors.adjoint()
}
