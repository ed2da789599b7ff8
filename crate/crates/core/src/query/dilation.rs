use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, CVector};
use crate::norms::{operator_norm, CONTRACTION_SLACK};

pub const UNIT_VECTOR_TOL: f64 = 1e-10;

/// `[[W, (1 - W W^*)^{1/2}], [(1 - W^* W)^{1/2}, -W^*]]` for square `W`.
///
/// A norm in `(1, 1 + slack]` is scaled back to one first; beyond that the
/// input is rejected.
pub fn dilate_contraction(w: &CMatrix) -> Result<CMatrix> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot dilate a {}x{} matrix",
            w.nrows(),
            w.ncols()
        )));
    }
    let norm = operator_norm(w);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContractive { norm });
    }
    let scaled;
    let w = if norm > 1.0 {
        scaled = w * Complex64::new(1.0 / norm, 0.0);
        &scaled
    } else {
        w
    };
    // D = (1 - W^* W)^{1/2} from one eigendecomposition, and the other
    // defect as 1 - W (1 + D)^{-1} W^*, which equals (1 - W W^*)^{1/2} and
    // keeps W D = D' W to rounding even when singular values sit at one
    let n = w.nrows();
    let (values, vectors) = hermitian_eigen(&(w.adjoint() * w));
    let diag = |f: &dyn Fn(f64) -> f64| {
        let d = CVector::from_iterator(
            n,
            values
                .iter()
                .map(|&l| Complex64::new(f((1.0 - l).max(0.0).sqrt()), 0.0)),
        );
        &vectors * CMatrix::from_diagonal(&d) * vectors.adjoint()
    };
    let bottom = diag(&|d| d);
    let top = CMatrix::identity(n, n) - w * diag(&|d| 1.0 / (1.0 + d)) * w.adjoint();
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(w);
    out.view_mut((0, n), (n, n)).copy_from(&top);
    out.view_mut((n, 0), (n, n)).copy_from(&bottom);
    out.view_mut((n, n), (n, n)).copy_from(&(-w.adjoint()));
    Ok(out)
}

/// A unitary whose first column is `c`: a phase times the Householder
/// reflection exchanging `e_1` and `c` with its first entry made real.
pub fn complete_to_unitary(c: &CVector) -> Result<CMatrix> {
    let n = c.len();
    let norm = c.norm();
    if n == 0 || (norm - 1.0).abs() > UNIT_VECTOR_TOL {
        return Err(Error::Invariant(format!(
            "vector of norm {norm} is not a unit vector"
        )));
    }
    let c1 = c[0];
    let phase = if c1.norm() > 0.0 {
        c1 / c1.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    // c' = c / phase has a real nonnegative first entry
    let cp = c / phase;
    let mut v = -cp.clone();
    v[0] += Complex64::new(1.0, 0.0);
    let vv = v.norm_squared();
    let mut h = CMatrix::identity(n, n);
    if vv > 0.0 {
        h -= (&v * v.adjoint()) * Complex64::new(2.0 / vv, 0.0);
    }
    // put c in exactly; the reflection reproduces it only up to rounding
    h.set_column(0, &cp);
    Ok(h * phase)
}
