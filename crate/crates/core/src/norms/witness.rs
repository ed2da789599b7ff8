use nalgebra::DMatrix;
use num_complex::Complex64;
use sha2::{Digest, Sha256};

use super::operator::operator_norm;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::tensor::RealTensor;

/// Allowed excess of `max ||A_i||` over one before a witness is rejected.
pub const CONTRACTION_SLACK: f64 = 1e-9;
/// Frobenius commutator residual accepted on user-supplied matrices.
pub const USER_COMMUTATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CommutationCheck {
    /// Every commutator must be the zero matrix bit for bit.
    Exact,
    /// Frobenius residual at most the given tolerance.
    Tolerance(f64),
}

/// Pairwise commuting square matrices, one per variable.
#[derive(Clone, Debug)]
pub struct CommutingFamily {
    matrices: Vec<CMatrix>,
    residual: f64,
    check: CommutationCheck,
}

impl CommutingFamily {
    /// For structured constructions whose commutators vanish exactly.
    pub fn exact(matrices: Vec<CMatrix>) -> Result<Self> {
        Self::new(matrices, CommutationCheck::Exact)
    }

    /// For matrices from outside the library; near-commuting input is rejected.
    pub fn checked(matrices: Vec<CMatrix>) -> Result<Self> {
        Self::new(matrices, CommutationCheck::Tolerance(USER_COMMUTATION_TOL))
    }

    pub fn from_real(matrices: &[DMatrix<f64>], check: CommutationCheck) -> Result<Self> {
        Self::new(
            matrices.iter().map(crate::linalg::to_complex).collect(),
            check,
        )
    }

    pub fn new(matrices: Vec<CMatrix>, check: CommutationCheck) -> Result<Self> {
        let size = matrices.first().map_or(0, |m| m.nrows());
        if let Some(bad) = matrices
            .iter()
            .find(|m| m.nrows() != size || m.ncols() != size)
        {
            return Err(Error::DimensionMismatch(format!(
                "witness matrix is {}x{}, expected {size}x{size}",
                bad.nrows(),
                bad.ncols()
            )));
        }
        let mut residual: f64 = 0.0;
        for i in 0..matrices.len() {
            for j in i + 1..matrices.len() {
                let c = &matrices[i] * &matrices[j] - &matrices[j] * &matrices[i];
                let r = c.norm();
                let ok = match check {
                    CommutationCheck::Exact => c.iter().all(|z| *z == Complex64::new(0.0, 0.0)),
                    CommutationCheck::Tolerance(tol) => r <= tol,
                };
                if !ok {
                    return Err(Error::NonCommuting { i, j, residual: r });
                }
                residual = residual.max(r);
            }
        }
        Ok(Self {
            matrices,
            residual,
            check,
        })
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    pub fn commutation_residual(&self) -> f64 {
        self.residual
    }

    pub fn check(&self) -> CommutationCheck {
        self.check
    }
}

/// Identifies a tensor by shape and a digest of its entry bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorRef {
    pub order: usize,
    pub dim: usize,
    pub sha256: String,
}

impl TensorRef {
    pub fn of(t: &RealTensor) -> Self {
        let mut h = Sha256::new();
        h.update((t.order() as u64).to_le_bytes());
        h.update((t.dim() as u64).to_le_bytes());
        for v in t.entries() {
            // fold -0.0 into 0.0 so equal tensors hash equally
            h.update((v + 0.0).to_bits().to_le_bytes());
        }
        let sha256 = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            order: t.order(),
            dim: t.dim(),
            sha256,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WitnessCertificate {
    pub tensor: TensorRef,
    /// Matrices actually used, after rescaling.
    pub matrices: Vec<CMatrix>,
    pub value: f64,
    pub commutation_residual: f64,
    /// `max_i ||A_i|| - 1` of the supplied matrices.
    pub norm_slack: f64,
    /// Factor applied to every matrix (one unless the slack was positive).
    pub rescale: f64,
}

/// `|| sum T_{i1..it} A_i1 .. A_it ||`, a lower bound on the cb norm of the
/// form with tensor `T` whenever the `A_i` are commuting contractions.
pub fn cb_lower_bound(t: &RealTensor, witness: &CommutingFamily) -> Result<WitnessCertificate> {
    if witness.len() != t.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} witness matrices for a tensor of dimension {}",
            witness.len(),
            t.dim()
        )));
    }
    let max_norm = witness
        .matrices()
        .iter()
        .map(operator_norm)
        .fold(0.0, f64::max);
    if max_norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContractive { norm: max_norm });
    }
    let rescale = if max_norm > 1.0 { 1.0 / max_norm } else { 1.0 };
    let matrices: Vec<CMatrix> = if rescale == 1.0 {
        witness.matrices().to_vec()
    } else {
        let s = Complex64::new(rescale, 0.0);
        witness.matrices().iter().map(|m| m * s).collect()
    };
    let sum = polynomial_in_matrices(t, &matrices);
    Ok(WitnessCertificate {
        tensor: TensorRef::of(t),
        value: operator_norm(&sum),
        matrices,
        commutation_residual: witness.commutation_residual(),
        norm_slack: max_norm - 1.0,
        rescale,
    })
}

/// `sum_{i1..it} T_{i1..it} A_i1 .. A_it`, built by Horner-style nesting on
/// the index prefix and skipping zero matrices and zero tensor blocks.
pub fn polynomial_in_matrices(t: &RealTensor, matrices: &[CMatrix]) -> CMatrix {
    let size = matrices.first().map_or(0, |m| m.nrows());
    let live: Vec<bool> = matrices
        .iter()
        .map(|m| m.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        .collect();
    if t.order() == 0 {
        let c = t.entries().first().copied().unwrap_or(0.0);
        return CMatrix::identity(size, size) * Complex64::new(c, 0.0);
    }
    nested(t, matrices, &live, 0, 0, size).unwrap_or_else(|| CMatrix::zeros(size, size))
}

/// `sum_{i_k..i_t} T_{prefix, i_k..} A_{i_k} .. A_{i_t}` for the prefix whose
/// flat offset is `offset`; `None` when the block is identically zero.
fn nested(
    t: &RealTensor,
    a: &[CMatrix],
    live: &[bool],
    depth: usize,
    offset: usize,
    size: usize,
) -> Option<CMatrix> {
    let n = t.dim();
    let mut acc: Option<CMatrix> = None;
    for i in (0..n).filter(|&i| live[i]) {
        let idx = offset * n + i;
        let term = if depth + 1 == t.order() {
            let c = t.entries()[idx];
            if c == 0.0 {
                continue;
            }
            &a[i] * Complex64::new(c, 0.0)
        } else {
            match nested(t, a, live, depth + 1, idx, size) {
                Some(rest) => &a[i] * rest,
                None => continue,
            }
        };
        acc = Some(match acc {
            Some(s) => s + term,
            None => term,
        });
    }
    acc
}
