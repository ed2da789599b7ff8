//! Forms, dense tensors and the conversions between them.
//!
//! A degree-`t` form `p(x) = sum_alpha c_alpha x^alpha` corresponds to the
//! unique symmetric tensor with entries `c_{e_i1 + .. + e_it} / tau(i1..it)`,
//! where `tau` counts the distinct orderings of the index tuple.

mod chebyshev;
mod dense;
mod form;
mod homogenize;
mod perm;
mod scalar;

pub use chebyshev::{chebyshev, chebyshev_form_value};
pub use dense::{
    checked_len, for_each_multiset_permutation, sorted_tuples, DenseTensor, SymmetricTensor,
    MAX_ENTRIES, MAX_ORDER,
};
pub use form::{eval_form, Form, MultiIndex};
pub use homogenize::{homogenize_quadratic, Homogenized, QuadraticPolynomial};
pub use perm::Permutation;
pub use scalar::Scalar;

use crate::error::{Error, Result};
use scalar::canonical_sum;

pub type RealTensor = DenseTensor<f64>;
pub type ComplexTensor = DenseTensor<num_complex::Complex64>;

/// Number of distinct orderings of `tuple`: `t! / prod_v mult(v)!`.
pub fn tau(tuple: &[usize]) -> u64 {
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    let mut result: u64 = 1;
    let mut run = 0u64;
    for (k, w) in sorted.iter().enumerate() {
        run = if k > 0 && sorted[k - 1] == *w {
            run + 1
        } else {
            1
        };
        // multiply by (k+1) and divide by the current run length; stays integral
        result = result * (k as u64 + 1) / run;
    }
    result
}

pub fn symmetric_tensor_of_form<S: Scalar>(p: &Form<S>) -> Result<SymmetricTensor<S>> {
    let mut t = DenseTensor::zeros(p.degree(), p.n())?;
    for (alpha, c) in p.terms() {
        let tuple = alpha.to_sorted_tuple();
        let entry = c.clone() / S::from_usize(tau(&tuple) as usize);
        for_each_multiset_permutation(&tuple, |perm| t.set(perm, entry.clone()));
    }
    Ok(SymmetricTensor::new_unchecked(t))
}

/// Collects `sum T_{i1..it} x_i1 .. x_it` into a form.
///
/// Orbit sums are taken in canonical order; an orbit carrying a single
/// repeated value `v` contributes exactly `tau * v`.
pub fn form_of_tensor<S: Scalar>(t: &DenseTensor<S>) -> Form<S> {
    let mut form = Form::zero(t.dim(), t.order());
    let mut values = Vec::new();
    for rep in sorted_tuples(t.dim(), t.order()) {
        values.clear();
        for_each_multiset_permutation(&rep, |perm| values.push(t.get(perm).clone()));
        let (sum, constant) = canonical_sum(&mut values);
        let coeff = if constant {
            sum * S::from_usize(values.len())
        } else {
            sum
        };
        if !coeff.is_zero() {
            form.add_term(MultiIndex::from_tuple(t.dim(), &rep), coeff)
                .expect("orbit representative has the tensor's order");
        }
    }
    form
}

/// `(T o sigma)_{i1..it} = T_{i_sigma(1) .. i_sigma(t)}`.
pub fn permute_tensor<S: Scalar>(
    t: &DenseTensor<S>,
    sigma: &Permutation,
) -> Result<DenseTensor<S>> {
    if sigma.len() != t.order() {
        return Err(Error::DimensionMismatch(format!(
            "permutation on {} slots applied to a tensor of order {}",
            sigma.len(),
            t.order()
        )));
    }
    let mut src = vec![0; t.order()];
    DenseTensor::from_fn(t.order(), t.dim(), |tuple| {
        sigma.apply_to_tuple(tuple, &mut src);
        t.get(&src).clone()
    })
}

/// Average of `T o sigma` over all slot permutations.
pub fn symmetrize<S: Scalar>(t: &DenseTensor<S>) -> SymmetricTensor<S> {
    let mut out = t.clone();
    let mut values = Vec::new();
    for rep in sorted_tuples(t.dim(), t.order()) {
        values.clear();
        for_each_multiset_permutation(&rep, |perm| values.push(t.get(perm).clone()));
        let (sum, constant) = canonical_sum(&mut values);
        let mean = if constant {
            sum
        } else {
            sum / S::from_usize(values.len())
        };
        for_each_multiset_permutation(&rep, |perm| out.set(perm, mean.clone()));
    }
    SymmetricTensor::new_unchecked(out)
}

/// Multilinear evaluation `T(x_1, .., x_t)`.
pub fn eval_tensor<S: Scalar>(t: &DenseTensor<S>, args: &[&[S]]) -> Result<S> {
    if args.len() != t.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} arguments for a tensor of order {}",
            args.len(),
            t.order()
        )));
    }
    if let Some(bad) = args.iter().find(|a| a.len() != t.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "argument of length {} for dimension {}",
            bad.len(),
            t.dim()
        )));
    }
    let n = t.dim();
    let mut cur: Vec<S> = t.entries().to_vec();
    // contract the last slot repeatedly
    for x in args.iter().rev() {
        let next_len = cur.len() / n.max(1);
        let mut next = Vec::with_capacity(next_len);
        for block in cur.chunks(n.max(1)).take(next_len) {
            let s = block
                .iter()
                .zip(x.iter())
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            next.push(s);
        }
        cur = next;
    }
    Ok(cur.pop().unwrap_or_else(S::zero))
}

/// `T(y, .., y)`.
pub fn eval_diagonal<S: Scalar>(t: &DenseTensor<S>, y: &[S]) -> Result<S> {
    let args: Vec<&[S]> = vec![y; t.order()];
    eval_tensor(t, &args)
}
