use std::collections::BTreeMap;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Exponent vector `alpha` of a monomial `x^alpha`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(alpha: Vec<u32>) -> Self {
        Self(alpha)
    }

    /// Counts occurrences of each variable in an index tuple.
    pub fn from_tuple(n: usize, tuple: &[usize]) -> Self {
        let mut alpha = vec![0u32; n];
        for &i in tuple {
            alpha[i] += 1;
        }
        Self(alpha)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// The sorted index tuple with this exponent pattern.
    pub fn to_sorted_tuple(&self) -> Vec<usize> {
        let mut tuple = Vec::with_capacity(self.degree());
        for (i, &a) in self.0.iter().enumerate() {
            tuple.extend(std::iter::repeat_n(i, a as usize));
        }
        tuple
    }

    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&a, _)| a > 0)
            .map(|(&a, &xi)| xi.powi(a as i32))
            .product()
    }
}

/// Homogeneous polynomial stored sparsely; zero coefficients are never kept.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<S = f64> {
    n: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self> {
        let mut form = Self::zero(n, degree);
        for (alpha, c) in terms {
            form.add_term(alpha, c)?;
        }
        Ok(form)
    }

    /// Adds `c * x^alpha`, merging with an existing term.
    pub fn add_term(&mut self, alpha: MultiIndex, c: S) -> Result<()> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "multi-index of length {} in a form over {} variables",
                alpha.len(),
                self.n
            )));
        }
        if alpha.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: alpha.degree(),
            });
        }
        if !c.is_finite() {
            return Err(Error::Invariant("non-finite coefficient".into()));
        }
        let merged = match self.terms.remove(&alpha) {
            Some(old) => old + c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(alpha, merged);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, S> {
        &self.terms
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> S {
        self.terms.get(alpha).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: S) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        for (alpha, c) in &self.terms {
            let v = c.clone() * factor.clone();
            if !v.is_zero() {
                out.terms.insert(alpha.clone(), v);
            }
        }
        out
    }
}

impl Form<f64> {
    pub fn eval(&self, x: &[f64]) -> f64 {
        eval_form(self, x)
    }
}

/// `sum_alpha c_alpha x^alpha`.
pub fn eval_form(p: &Form<f64>, x: &[f64]) -> f64 {
    assert_eq!(x.len(), p.n(), "point has wrong length");
    p.terms()
        .iter()
        .map(|(alpha, c)| c * alpha.monomial(x))
        .sum()
}
