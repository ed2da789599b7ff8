use std::ops::Deref;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Largest tensor order accepted by dense storage.
pub const MAX_ORDER: usize = 4;
/// Largest number of stored entries (`dim^order`).
pub const MAX_ENTRIES: usize = 1 << 24;

/// Checks the dense storage guard and returns `dim^order`.
pub fn checked_len(order: usize, dim: usize) -> Result<usize> {
    let too_large = || Error::TensorTooLarge {
        order,
        dim,
        max_order: MAX_ORDER,
        max_entries: MAX_ENTRIES,
    };
    if order > MAX_ORDER {
        return Err(too_large());
    }
    let mut len = 1usize;
    for _ in 0..order {
        len = len.checked_mul(dim).ok_or_else(too_large)?;
        if len > MAX_ENTRIES {
            return Err(too_large());
        }
    }
    Ok(len)
}

/// Order-`t` array over `[dim]^t`, stored row-major by index tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<S> {
    order: usize,
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> DenseTensor<S> {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Ok(Self {
            order,
            dim,
            entries: vec![S::zero(); len],
        })
    }

    pub fn from_entries(order: usize, dim: usize, entries: Vec<S>) -> Result<Self> {
        let len = checked_len(order, dim)?;
        if entries.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} entries for order {order} and dimension {dim}, got {}",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|e| !e.is_finite()) {
            return Err(Error::Invariant(format!("entry {pos} is not finite")));
        }
        Ok(Self {
            order,
            dim,
            entries,
        })
    }

    /// Builds a tensor by evaluating `f` on every index tuple.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> S) -> Result<Self> {
        let len = checked_len(order, dim)?;
        let mut entries = Vec::with_capacity(len);
        let mut tuple = vec![0usize; order];
        for flat in 0..len {
            unflatten_into(flat, dim, &mut tuple);
            entries.push(f(&tuple));
        }
        Self::from_entries(order, dim, entries)
    }

    pub fn get(&self, tuple: &[usize]) -> &S {
        &self.entries[self.flat_index(tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], value: S) {
        let idx = self.flat_index(tuple);
        self.entries[idx] = value;
    }

    pub fn map<R: Scalar>(&self, f: impl Fn(&S) -> R) -> DenseTensor<R> {
        DenseTensor {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, factor: S) -> Self {
        self.map(|e| e.clone() * factor.clone())
    }
}

impl<S> DenseTensor<S> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn flat_index(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.order, "index tuple has wrong length");
        tuple.iter().fold(0, |acc, &i| {
            assert!(
                i < self.dim,
                "index {i} out of range for dimension {}",
                self.dim
            );
            acc * self.dim + i
        })
    }

    pub fn tuple_of(&self, flat: usize) -> Vec<usize> {
        let mut tuple = vec![0; self.order];
        unflatten_into(flat, self.dim, &mut tuple);
        tuple
    }
}

pub(crate) fn unflatten_into(mut flat: usize, dim: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = flat % dim.max(1);
        flat /= dim.max(1);
    }
}

/// A tensor invariant under every permutation of its index slots.
///
/// Values of this type are only produced by constructions that are
/// symmetric by design ([`symmetrize`](super::symmetrize),
/// [`symmetric_tensor_of_form`](super::symmetric_tensor_of_form)) or by
/// [`SymmetricTensor::try_from_dense`], which checks exact equality.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensor<S>(DenseTensor<S>);

impl<S: Scalar> SymmetricTensor<S> {
    pub(crate) fn new_unchecked(inner: DenseTensor<S>) -> Self {
        Self(inner)
    }

    /// Accepts `t` only if every orbit of index tuples carries bit-identical values.
    pub fn try_from_dense(t: DenseTensor<S>) -> Result<Self> {
        for rep in sorted_tuples(t.dim(), t.order()) {
            let first = t.get(&rep).clone();
            let mut bad = None;
            for_each_multiset_permutation(&rep, |perm| {
                if bad.is_none() && *t.get(perm) != first {
                    bad = Some(perm.to_vec());
                }
            });
            if let Some(perm) = bad {
                return Err(Error::Invariant(format!(
                    "tensor is not symmetric: entries {rep:?} and {perm:?} differ"
                )));
            }
        }
        Ok(Self(t))
    }

    pub fn into_dense(self) -> DenseTensor<S> {
        self.0
    }
}

impl<S> Deref for SymmetricTensor<S> {
    type Target = DenseTensor<S>;
    fn deref(&self) -> &DenseTensor<S> {
        &self.0
    }
}

impl<S> AsRef<DenseTensor<S>> for SymmetricTensor<S> {
    fn as_ref(&self) -> &DenseTensor<S> {
        &self.0
    }
}

/// Nondecreasing tuples in `[dim]^order`, one per multiset.
pub fn sorted_tuples(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if order == 0 {
        out.push(Vec::new());
        return out;
    }
    if dim == 0 {
        return out;
    }
    let mut cur = vec![0usize; order];
    loop {
        out.push(cur.clone());
        // advance to the next nondecreasing tuple
        let mut k = order;
        while k > 0 && cur[k - 1] == dim - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        let v = cur[k - 1] + 1;
        for slot in cur.iter_mut().skip(k - 1) {
            *slot = v;
        }
    }
    out
}

/// Calls `f` once for every distinct ordering of `tuple`.
pub fn for_each_multiset_permutation(tuple: &[usize], mut f: impl FnMut(&[usize])) {
    let mut cur = tuple.to_vec();
    cur.sort_unstable();
    loop {
        f(&cur);
        if !next_permutation(&mut cur) {
            break;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
