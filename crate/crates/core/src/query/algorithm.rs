use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, unitarity_residual, CMatrix, CVector};
use crate::norms::operator_norm;
use crate::signs::{SignTable, SignVector};

pub const UNITARY_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const OBSERVABLE_SLACK: f64 = 1e-10;
pub const IMAGINARY_TOL: f64 = 1e-12;

/// Expected output sign per input.
pub type ExpectationTable = SignTable;

/// The phase oracle `Diag((1, .., 1, x_1, .., x_n)) (x) 1_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOracle {
    x: Vec<f64>,
}

impl PhaseOracle {
    pub fn new(x: &SignVector) -> Self {
        Self { x: x.to_f64() }
    }

    /// Converts a bit oracle input (`b_i` in `{0,1}`) to phases `(-1)^{b_i}`.
    pub fn from_bits(bits: &[bool]) -> Self {
        Self {
            x: bits.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Phase on register position `p = aux * n + j`.
    pub fn phase(&self, p: usize) -> f64 {
        let n = self.x.len();
        if p < n {
            1.0
        } else {
            self.x[p - n]
        }
    }

    pub fn apply(&self, psi: &mut CVector, w: usize) {
        for (p, block) in psi.as_mut_slice().chunks_mut(w).enumerate() {
            if self.phase(p) < 0.0 {
                block.iter_mut().for_each(|z| *z = -*z);
            }
        }
    }
}

/// `t`-query algorithm on `A(2) (x) Q(n) (x) W(w)`: the state
/// `U_t D U_{t-1} .. U_1 D U_0 e_1` measured with the observable `Q`.
///
/// Basis index of `|a, j, k>` is `(a * n + j) * w + k`.
#[derive(Clone, Debug)]
pub struct QueryAlgorithm {
    n: usize,
    t: usize,
    w: usize,
    unitaries: Vec<CMatrix>,
    observable: CMatrix,
}

/// Diagnostics from one simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Run {
    pub value: f64,
    pub imaginary: f64,
    /// Largest `| ||psi||_2 - 1 |` after any gate.
    pub norm_drift: f64,
}

impl QueryAlgorithm {
    /// Validates shapes, unitarity and the observable bounds.
    pub fn new(
        n: usize,
        t: usize,
        w: usize,
        unitaries: Vec<CMatrix>,
        observable: CMatrix,
    ) -> Result<Self> {
        let dim = 2 * n * w;
        if unitaries.len() != t + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} unitaries for {t} queries (expected {})",
                unitaries.len(),
                t + 1
            )));
        }
        for (k, u) in unitaries
            .iter()
            .chain(std::iter::once(&observable))
            .enumerate()
        {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {k} is {}x{}, register dimension is {dim}",
                    u.nrows(),
                    u.ncols()
                )));
            }
        }
        for u in &unitaries {
            let residual = unitarity_residual(u);
            if residual > UNITARY_TOL {
                return Err(Error::NotUnitary { residual });
            }
        }
        let h = hermiticity_residual(&observable);
        if h > HERMITIAN_TOL {
            return Err(Error::Invariant(format!(
                "observable is not Hermitian (residual {h:e})"
            )));
        }
        let norm = operator_norm(&observable);
        if norm > 1.0 + OBSERVABLE_SLACK {
            return Err(Error::NotContractive { norm });
        }
        Ok(Self {
            n,
            t,
            w,
            unitaries,
            observable,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn dim(&self) -> usize {
        2 * self.n * self.w
    }

    pub fn unitaries(&self) -> &[CMatrix] {
        &self.unitaries
    }

    pub fn observable(&self) -> &CMatrix {
        &self.observable
    }

    /// Final state `psi_x`, with the largest norm drift seen along the way.
    pub fn state(&self, x: &SignVector) -> Result<(CVector, f64)> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "input of length {} for an algorithm on {} bits",
                x.len(),
                self.n
            )));
        }
        let oracle = PhaseOracle::new(x);
        let mut psi = self.unitaries[0].column(0).into_owned();
        let mut drift = (psi.norm() - 1.0).abs();
        for u in &self.unitaries[1..] {
            oracle.apply(&mut psi, self.w);
            psi = u * psi;
            drift = drift.max((psi.norm() - 1.0).abs());
        }
        Ok((psi, drift))
    }

    pub fn run_traced(&self, x: &SignVector) -> Result<Run> {
        let (psi, norm_drift) = self.state(x)?;
        let z: Complex64 = psi.dotc(&(&self.observable * &psi));
        Ok(Run {
            value: z.re,
            imaginary: z.im,
            norm_drift,
        })
    }

    /// `psi_x^* Q psi_x` on every input of `domain` (all of `{+1,-1}^n` if `None`).
    pub fn expectation_table(&self, domain: Option<&[SignVector]>) -> Result<ExpectationTable> {
        let inputs: Vec<SignVector> = match domain {
            Some(d) => d.to_vec(),
            None => crate::signs::all_sign_vectors(self.n).collect(),
        };
        let values: Vec<f64> = inputs
            .par_iter()
            .map(|x| run_algorithm(self, x))
            .collect::<Result<_>>()?;
        let mut table = ExpectationTable::new(self.n);
        for (x, v) in inputs.into_iter().zip(values) {
            table.insert(x, v)?;
        }
        Ok(table)
    }
}

/// Expected measurement outcome `psi_x^* Q psi_x`.
pub fn run_algorithm(alg: &QueryAlgorithm, x: &SignVector) -> Result<f64> {
    let run = alg.run_traced(x)?;
    if run.imaginary.abs() > IMAGINARY_TOL {
        return Err(Error::Invariant(format!(
            "expectation has imaginary part {:e}",
            run.imaginary
        )));
    }
    Ok(run.value)
}

/// `Z` on one tensor factor of size two, identity elsewhere, as a real diagonal.
pub fn diagonal_observable(diag: &[f64]) -> CMatrix {
    let d =
        nalgebra::DVector::from_iterator(diag.len(), diag.iter().map(|&v| Complex64::new(v, 0.0)));
    DMatrix::from_diagonal(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signs::all_sign_vectors;

    fn identity_algorithm(n: usize, t: usize, w: usize, q: f64) -> QueryAlgorithm {
        let dim = 2 * n * w;
        QueryAlgorithm::new(
            n,
            t,
            w,
            vec![CMatrix::identity(dim, dim); t + 1],
            CMatrix::identity(dim, dim) * Complex64::new(q, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn identity_circuits() {
        let alg = identity_algorithm(3, 2, 2, 1.0);
        let neg = identity_algorithm(3, 2, 2, -1.0);
        for x in all_sign_vectors(3) {
            assert_eq!(run_algorithm(&alg, &x).unwrap(), 1.0);
            assert_eq!(run_algorithm(&neg, &x).unwrap(), -1.0);
        }
    }

    #[test]
    fn rejects_invalid_parts() {
        let dim = 4;
        let bad = CMatrix::identity(dim, dim) * Complex64::new(0.5, 0.0);
        assert!(matches!(
            QueryAlgorithm::new(2, 0, 1, vec![bad], CMatrix::identity(dim, dim)),
            Err(Error::NotUnitary { .. })
        ));
        let big_q = CMatrix::identity(dim, dim) * Complex64::new(2.0, 0.0);
        assert!(QueryAlgorithm::new(2, 0, 1, vec![CMatrix::identity(dim, dim)], big_q).is_err());
        assert!(QueryAlgorithm::new(
            2,
            1,
            1,
            vec![CMatrix::identity(dim, dim)],
            CMatrix::identity(dim, dim)
        )
        .is_err());
    }

    #[test]
    fn single_query_phase_kickback() {
        // prepare (|0,j> + |1,j>)/sqrt2, query, undo: expectation x_j on Z of aux
        let (n, w) = (2usize, 1usize);
        let dim = 2 * n * w;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let j = 1;
        let mut h = CMatrix::zeros(dim, dim);
        for q in 0..n {
            let (a, b) = (q, n + q);
            h[(a, a)] = Complex64::new(s, 0.0);
            h[(a, b)] = Complex64::new(s, 0.0);
            h[(b, a)] = Complex64::new(s, 0.0);
            h[(b, b)] = Complex64::new(-s, 0.0);
        }
        // U_0 maps e_1 = |0,0> to |0,j> before the Hadamard
        let mut perm = CMatrix::identity(dim, dim);
        perm.swap_columns(0, j);
        let u0 = &h * perm;
        let z: Vec<f64> = (0..dim).map(|p| if p < n { 1.0 } else { -1.0 }).collect();
        let alg = QueryAlgorithm::new(n, 1, w, vec![u0, h], diagonal_observable(&z)).unwrap();
        for x in all_sign_vectors(n) {
            let run = alg.run_traced(&x).unwrap();
            assert!((run.value - x.to_f64()[j]).abs() < 1e-15);
            assert!(run.norm_drift < 1e-15);
        }
    }

    #[test]
    fn bit_oracle_conversion() {
        let o = PhaseOracle::from_bits(&[false, true]);
        assert_eq!((o.phase(0), o.phase(2), o.phase(3)), (1.0, 1.0, -1.0));
    }
}
