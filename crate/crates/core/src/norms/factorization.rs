use nalgebra::RowDVector;
use num_complex::Complex64;

use super::operator::operator_norm;
use super::witness::CONTRACTION_SLACK;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::signs::SignTable;
use crate::tensor::{ComplexTensor, DenseTensor, RealTensor};

pub const UNIT_TOL: f64 = 1e-10;

/// Unit vectors `u, v` and `2t` contraction pairs `(U_k, V_k)`, each a map
/// `C^m -> C^d (x) C^dim`, realizing
/// `T_{i1..i2t} = u^* K_1(i1) .. K_2t(i2t) v` with
/// `K_k(i) = U_k^* (E_ii (x) 1_d) V_k`.
///
/// Rows of `U_k, V_k` are indexed by `i * d + a` for variable `i` and
/// multiplicity index `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct CbFactorization {
    t: usize,
    d: usize,
    m: usize,
    dim: usize,
    u: CVector,
    v: CVector,
    pairs: Vec<(CMatrix, CMatrix)>,
}

/// Outcome of checking the factorization invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationCheck {
    pub unit_residual: f64,
    pub max_contraction_norm: f64,
}

impl FactorizationCheck {
    pub fn passes(&self) -> bool {
        self.unit_residual <= UNIT_TOL && self.max_contraction_norm <= 1.0 + CONTRACTION_SLACK
    }

    pub fn slack(&self) -> f64 {
        (self.max_contraction_norm - 1.0).max(0.0)
    }
}

impl CbFactorization {
    /// Checks shapes only; the norm invariants are checked by
    /// [`certify_cb_at_most_one`].
    pub fn new(
        t: usize,
        d: usize,
        dim: usize,
        u: CVector,
        v: CVector,
        pairs: Vec<(CMatrix, CMatrix)>,
    ) -> Result<Self> {
        let m = u.len();
        if v.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "u has length {m}, v has length {}",
                v.len()
            )));
        }
        if pairs.len() != 2 * t {
            return Err(Error::DimensionMismatch(format!(
                "{} contraction pairs for half-degree {t}",
                pairs.len()
            )));
        }
        for (k, (a, b)) in pairs.iter().enumerate() {
            for (name, x) in [("U", a), ("V", b)] {
                if x.nrows() != d * dim || x.ncols() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "{name}_{} is {}x{}, expected {}x{m}",
                        k + 1,
                        x.nrows(),
                        x.ncols(),
                        d * dim
                    )));
                }
            }
        }
        Ok(Self {
            t,
            d,
            m,
            dim,
            u,
            v,
            pairs,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn u(&self) -> &CVector {
        &self.u
    }

    pub fn v(&self) -> &CVector {
        &self.v
    }

    pub fn pairs(&self) -> &[(CMatrix, CMatrix)] {
        &self.pairs
    }

    pub fn check(&self) -> FactorizationCheck {
        let unit_residual = (self.u.norm() - 1.0).abs().max((self.v.norm() - 1.0).abs());
        let max_contraction_norm = self
            .pairs
            .iter()
            .flat_map(|(a, b)| [operator_norm(a), operator_norm(b)])
            .fold(0.0, f64::max);
        FactorizationCheck {
            unit_residual,
            max_contraction_norm,
        }
    }

    /// `K_k(i)` for slot `k` (zero-based).
    pub fn slot_matrix(&self, k: usize, i: usize) -> CMatrix {
        let (a, b) = &self.pairs[k];
        let rows = i * self.d..(i + 1) * self.d;
        let ua = a.rows(rows.start, self.d);
        let vb = b.rows(rows.start, self.d);
        ua.adjoint() * vb
    }

    /// `sum_i y_i K_k(i)`.
    fn slot_combination(&self, k: usize, y: &[f64]) -> CMatrix {
        let mut acc = CMatrix::zeros(self.m, self.m);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                acc += self.slot_matrix(k, i) * Complex64::new(yi, 0.0);
            }
        }
        acc
    }

    /// `T(y, .., y)` computed from the factors without materializing `T`.
    pub fn eval_diagonal(&self, y: &[f64]) -> Result<Complex64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for dimension {}",
                y.len(),
                self.dim
            )));
        }
        let mut row = self.u.adjoint();
        for k in 0..2 * self.t {
            row = row * self.slot_combination(k, y);
        }
        Ok((row * &self.v)[(0, 0)])
    }

    /// The order-`2t` tensor realized by the factors.
    pub fn materialize(&self) -> Result<ComplexTensor> {
        let order = 2 * self.t;
        let len = crate::tensor::checked_len(order, self.dim)?;
        let slots: Vec<Vec<CMatrix>> = (0..order)
            .map(|k| (0..self.dim).map(|i| self.slot_matrix(k, i)).collect())
            .collect();
        let mut entries = Vec::with_capacity(len);
        fill(&slots, self.u.adjoint(), &self.v, 0, &mut entries);
        DenseTensor::from_entries(order, self.dim, entries)
    }
}

fn fill(
    slots: &[Vec<CMatrix>],
    row: RowDVector<Complex64>,
    v: &CVector,
    depth: usize,
    out: &mut Vec<Complex64>,
) {
    if depth == slots.len() {
        out.push((row * v)[(0, 0)]);
        return;
    }
    for k in &slots[depth] {
        fill(slots, &row * k, v, depth + 1, out);
    }
}

/// Real part `(T + conj T) / 2` of a complex tensor.
pub fn real_part(t: &ComplexTensor) -> RealTensor {
    t.map(|z| z.re)
}

#[derive(Clone, Debug)]
pub struct UpperCertificate {
    pub tensor: ComplexTensor,
    /// True asserts `||T||_cb <= 1`.
    pub certified: bool,
    pub check: FactorizationCheck,
}

/// Materializes the factorization's tensor and certifies `||T||_cb <= 1`
/// when the factors satisfy the unit and contraction invariants.
pub fn certify_cb_at_most_one(fact: &CbFactorization) -> Result<UpperCertificate> {
    let check = fact.check();
    Ok(UpperCertificate {
        tensor: fact.materialize()?,
        certified: check.passes(),
        check,
    })
}

/// True iff `|Re T((x,1), .., (x,1)) - f(x)| <= 2 eps` on the table's domain,
/// which bounds the eps-error query complexity of `f` by `t`.
pub fn certify_cbdeg_upper(f: &SignTable, eps: f64, fact: &CbFactorization) -> Result<bool> {
    if fact.dim() != 2 * f.n() {
        return Err(Error::DimensionMismatch(format!(
            "factorization over {} variables for a function of {} bits",
            fact.dim(),
            f.n()
        )));
    }
    let check = fact.check();
    if !check.passes() {
        return Err(Error::Uncertified(format!(
            "unit residual {:e}, largest contraction norm {}",
            check.unit_residual, check.max_contraction_norm
        )));
    }
    for (x, fx) in f.iter() {
        let value = fact.eval_diagonal(&x.with_ones())?.re;
        if (value - fx).abs() > 2.0 * eps {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::{all_sign_vectors, SignVector};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn basis_column(len: usize, j: usize) -> CMatrix {
        CMatrix::from_fn(len, 1, |r, _| c(if r == j { 1.0 } else { 0.0 }))
    }

    fn scalar_factorization(dim: usize, slots: &[usize]) -> CbFactorization {
        let pairs = slots
            .iter()
            .map(|&j| (basis_column(dim, j), basis_column(dim, j)))
            .collect();
        CbFactorization::new(
            slots.len() / 2,
            1,
            dim,
            CVector::from_element(1, c(1.0)),
            CVector::from_element(1, c(1.0)),
            pairs,
        )
        .unwrap()
    }

    #[test]
    fn scalar_factorization_gives_diagonal_unit() {
        let fact = scalar_factorization(3, &[1, 1]);
        let cert = certify_cb_at_most_one(&fact).unwrap();
        assert!(cert.certified);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert_eq!(*cert.tensor.get(&[i, j]), c(expected));
            }
        }
    }

    #[test]
    fn subunit_vector_refused() {
        let mut fact = scalar_factorization(2, &[0, 0]);
        fact.u = CVector::from_element(1, c(0.5));
        assert!(!certify_cb_at_most_one(&fact).unwrap().certified);
    }

    #[test]
    fn dictator_certificate() {
        // p(y) = y_1 y_{n+1} restricted to (x, 1) is x_1
        let n = 3;
        let fact = scalar_factorization(2 * n, &[0, n]);
        let mut f = SignTable::new(n);
        for x in all_sign_vectors(n) {
            let v = x.to_f64()[0];
            f.insert(x, v).unwrap();
        }
        assert!(certify_cbdeg_upper(&f, 0.0, &fact).unwrap());

        let zero = CbFactorization::new(
            1,
            1,
            2 * n,
            CVector::from_element(1, c(1.0)),
            CVector::from_element(1, c(1.0)),
            vec![(CMatrix::zeros(2 * n, 1), CMatrix::zeros(2 * n, 1)); 2],
        )
        .unwrap();
        assert!(!certify_cbdeg_upper(&f, 0.0, &zero).unwrap());
    }

    #[test]
    fn constant_certificate() {
        // y_{n+1}^2 equals one on (x, 1)
        let n = 2;
        let fact = scalar_factorization(2 * n, &[n, n]);
        let mut f = SignTable::new(n);
        for x in all_sign_vectors(n) {
            f.insert(x, 1.0).unwrap();
        }
        assert!(certify_cbdeg_upper(&f, 0.0, &fact).unwrap());
        let mut partial = SignTable::new(n);
        partial
            .insert(SignVector::parse("01").unwrap(), 1.0)
            .unwrap();
        assert!(certify_cbdeg_upper(&partial, 0.0, &fact).unwrap());
    }

    #[test]
    fn diagonal_evaluation_matches_materialized_tensor() {
        let dim = 2;
        let d = 2;
        let m = 2;
        let mk = |s: f64| {
            CMatrix::from_fn(d * dim, m, |r, col| {
                Complex64::new(0.3 * s * (r as f64 - col as f64), 0.1 * (r + col) as f64)
            })
        };
        let u = CVector::from_vec(vec![c(0.6), Complex64::new(0.0, 0.8)]);
        let v = CVector::from_vec(vec![c(1.0), c(0.0)]);
        let fact = CbFactorization::new(
            1,
            d,
            dim,
            u,
            v,
            vec![(mk(1.0), mk(-0.5)), (mk(0.7), mk(0.2))],
        )
        .unwrap();
        let t = fact.materialize().unwrap();
        let y = [0.7, -1.3];
        let mut direct = c(0.0);
        for i in 0..dim {
            for j in 0..dim {
                direct += t.get(&[i, j]) * c(y[i] * y[j]);
            }
        }
        assert!((fact.eval_diagonal(&y).unwrap() - direct).norm() < 1e-14);
    }
}
