use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

/// Coefficient field for forms and tensors.
///
/// Besides ring arithmetic the trait fixes a total order used to sum orbit
/// values in a canonical order, which makes symmetrization independent of
/// the order in which entries are visited.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_usize(k: usize) -> Self;
    fn canonical_cmp(&self, other: &Self) -> Ordering;
    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn from_usize(k: usize) -> Self {
        k as f64
    }
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Complex64 {
    fn from_usize(k: usize) -> Self {
        Complex64::new(k as f64, 0.0)
    }
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.re
            .total_cmp(&other.re)
            .then(self.im.total_cmp(&other.im))
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Scalar for Rational64 {
    fn from_usize(k: usize) -> Self {
        Rational64::from_integer(k as i64)
    }
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn is_finite(&self) -> bool {
        true
    }
}

/// Sum in canonical order; if every value is identical the value itself is
/// returned so that averaging a constant orbit is exact.
pub(crate) fn canonical_sum<S: Scalar>(values: &mut [S]) -> (S, bool) {
    let all_equal = values.windows(2).all(|w| w[0] == w[1]);
    if all_equal {
        return (values.first().cloned().unwrap_or_else(S::zero), true);
    }
    values.sort_by(|a, b| a.canonical_cmp(b));
    let sum = values.iter().cloned().fold(S::zero(), |acc, v| acc + v);
    (sum, false)
}
