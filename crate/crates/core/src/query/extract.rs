use num_complex::Complex64;

use super::algorithm::QueryAlgorithm;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::tensor::{DenseTensor, RealTensor};

pub const MAX_EXTRACT_ORDER: usize = 4;
pub const MAX_EXTRACT_BITS: usize = 8;

/// Register position of variable `i` of `y = (x, 1)`: `x_j` sits on
/// `|1, j>` and the constant `y_{n+j}` on `|0, j>`.
pub fn position_of_variable(i: usize, n: usize) -> usize {
    (i + n) % (2 * n)
}

/// The real `2t`-tensor `T` with `T((x,1), .., (x,1)) = psi_x^* Q psi_x`.
///
/// With `P_i` the projector onto the register position of variable `i`,
/// `T_{i1..i2t} = l(i1..it) U_t^* Q U_t l(i2t..i_{t+1})^*` where
/// `l(i1..ik) = e_1^* U_0^* P_i1 U_1^* .. U_{k-1}^* P_ik`; the real part of
/// this complex tensor is returned.
pub fn tensor_of_algorithm(alg: &QueryAlgorithm) -> Result<RealTensor> {
    let (n, t, w) = (alg.n(), alg.t(), alg.w());
    if 2 * t > MAX_EXTRACT_ORDER || n > MAX_EXTRACT_BITS {
        return Err(Error::TensorTooLarge {
            order: 2 * t,
            dim: 2 * n,
            max_order: MAX_EXTRACT_ORDER,
            max_entries: (2 * MAX_EXTRACT_BITS).pow(MAX_EXTRACT_ORDER as u32),
        });
    }
    let dim = 2 * n;
    let u = alg.unitaries();
    let last = &u[t];
    let middle: CMatrix = last.adjoint() * alg.observable() * last;

    // rows l(i1..it) for all tuples in row-major order
    let start = u[0].adjoint().row(0).into_owned();
    let mut rows = vec![start];
    for k in 1..=t {
        let mut next = Vec::with_capacity(rows.len() * dim);
        for row in &rows {
            for i in 0..dim {
                let p = position_of_variable(i, n);
                let mut projected = row.clone() * Complex64::new(0.0, 0.0);
                projected
                    .columns_mut(p * w, w)
                    .copy_from(&row.columns(p * w, w));
                next.push(if k < t {
                    projected * u[k].adjoint()
                } else {
                    projected
                });
            }
        }
        rows = next;
    }

    let tuples = rows.len();
    let left = CMatrix::from_fn(tuples, alg.dim(), |r, c| rows[r][c]);
    // right factor column for tail (i_{t+1}..i_2t) is l(i_2t..i_{t+1})^*
    let gram = &left * &middle * left.adjoint();

    let reversed_index = |mut flat: usize| -> usize {
        let mut out = 0;
        for _ in 0..t {
            out = out * dim + flat % dim;
            flat /= dim;
        }
        out
    };
    let mut entries = Vec::with_capacity(tuples * tuples);
    for a in 0..tuples {
        for b in 0..tuples {
            entries.push(gram[(a, reversed_index(b))].re);
        }
    }
    DenseTensor::from_entries(2 * t, dim, entries)
}
