//! Sign vectors `x in {+1,-1}^n` and tables indexed by them.
//!
//! A sign vector is written as a bitstring with `'0'` for `+1` and `'1'`
//! for `-1`, matching `x_i = (-1)^{b_i}`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(Vec<bool>);

impl SignVector {
    /// Bit `i` of `bits` set means `x_i = -1`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    pub fn from_signs(x: &[f64]) -> Result<Self> {
        x.iter()
            .map(|&v| match v {
                v if v == 1.0 => Ok(false),
                v if v == -1.0 => Ok(true),
                other => Err(Error::Parse(format!("{other} is not a sign"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn parse(bitstring: &str) -> Result<Self> {
        bitstring
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "invalid character {other:?} in bitstring {bitstring:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect()
    }

    /// `(x, 1, .., 1)` of length `2n`.
    pub fn with_ones(&self) -> Vec<f64> {
        let mut y = self.to_f64();
        y.extend(std::iter::repeat_n(1.0, self.len()));
        y
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All `2^n` sign vectors, in increasing bit order.
pub fn all_sign_vectors(n: usize) -> impl Iterator<Item = SignVector> {
    assert!(n < 64, "too many variables to enumerate");
    (0..1u64 << n).map(move |bits| SignVector::from_bits(n, bits))
}

/// Real values on a subset of the hypercube.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignTable {
    n: usize,
    values: BTreeMap<SignVector, f64>,
}

impl SignTable {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, x: SignVector, value: f64) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "sign vector of length {} in a table over {} bits",
                x.len(),
                self.n
            )));
        }
        self.values.insert(x, value);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, x: &SignVector) -> Option<f64> {
        self.values.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SignVector, f64)> {
        self.values.iter().map(|(k, &v)| (k, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = &SignVector> {
        self.values.keys()
    }

    /// Largest absolute difference on the common domain; `None` if the domains differ.
    pub fn max_deviation(&self, other: &SignTable) -> Option<f64> {
        if self.n != other.n || self.values.len() != other.values.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (x, v) in &self.values {
            worst = worst.max((v - other.values.get(x)?).abs());
        }
        Some(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_round_trip() {
        let x = SignVector::parse("0110").unwrap();
        assert_eq!(x.to_f64(), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(x.to_string(), "0110");
        assert_eq!(SignVector::from_signs(&x.to_f64()).unwrap(), x);
        assert!(SignVector::parse("012").is_err());
        assert!(SignVector::from_signs(&[0.5]).is_err());
    }

    #[test]
    fn with_ones_appends_all_ones_block() {
        let x = SignVector::parse("10").unwrap();
        assert_eq!(x.with_ones(), vec![-1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn enumerates_full_cube() {
        assert_eq!(all_sign_vectors(5).count(), 32);
    }
}
