use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::norms::inf_to_one_norm;

/// `p(x) = x^T A x + b^T x + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPolynomial {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
}

impl QuadraticPolynomial {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: f64) -> Result<Self> {
        if !a.is_square() || a.nrows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "quadratic part is {}x{}, linear part has length {}",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        x.dot(&(&self.a * &x)) + self.b.dot(&x) + self.c
    }
}

/// Homogenized quadratic: `q(y) = y^T M y` with `q((x, 1)) = scale * p(x)` on signs.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogenized {
    pub matrix: DMatrix<f64>,
    pub scale: f64,
    /// `||M||_{inf -> 1}` after scaling; at most 1.
    pub norm: f64,
}

/// Embeds a quadratic polynomial into an `(n+1)`-variate quadratic form of
/// `inf->1` norm at most one. The constant is instance-wise:
/// `scale = 1 / max(1, ||[[A_sym, b/2], [b^T/2, c]]||_{inf->1})`.
pub fn homogenize_quadratic(p: &QuadraticPolynomial, cap: usize) -> Result<Homogenized> {
    let n = p.n();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 0.5 * (p.a[(i, j)] + p.a[(j, i)]);
        }
        m[(i, n)] = 0.5 * p.b[i];
        m[(n, i)] = 0.5 * p.b[i];
    }
    m[(n, n)] = p.c;
    let raw_norm = inf_to_one_norm(&m, cap)?;
    let scale = 1.0 / raw_norm.max(1.0);
    Ok(Homogenized {
        matrix: m * scale,
        scale,
        norm: raw_norm * scale,
    })
}
