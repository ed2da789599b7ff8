use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{
    cb_lower_bound, operator_norm, sup_norm_hypercube, CommutationCheck, CommutingFamily,
};
use crate::tensor::{sorted_tuples, symmetric_tensor_of_form, Form, MultiIndex, SymmetricTensor};

pub const SCHEMA: &str = "cbforms.separation/1";
pub const DEFAULT_TAU: f64 = 3.0;
/// Doublings of `tau` tried before giving up.
const MAX_TAU_DOUBLINGS: usize = 16;

/// Cubic form with an independent uniform `+1/-1` coefficient on every
/// monomial of degree three, drawn in increasing multi-index order.
pub fn random_cubic_form(n: usize, seed: u64) -> Form {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Form::zero(n, 3);
    for tuple in sorted_tuples(n, 3) {
        let c = if rng.random::<bool>() { 1.0 } else { -1.0 };
        p.add_term(MultiIndex::from_tuple(n, &tuple), c)
            .expect("tuple has degree three");
    }
    p
}

/// Slice matrices `M_i = (T_{i,j,k})_{j,k}` of an order-3 tensor.
pub fn slices(t: &SymmetricTensor<f64>) -> Vec<DMatrix<f64>> {
    let n = t.dim();
    (0..n)
        .map(|i| DMatrix::from_fn(n, n, |j, k| *t.get(&[i, j, k])))
        .collect()
}

pub fn max_slice_norm(t: &SymmetricTensor<f64>) -> f64 {
    slices(t).iter().map(operator_norm).fold(0.0, f64::max)
}

/// Index of `f_*`, `f_j`, `g_j`, `h` in the witness basis of dimension `2n + 2`.
pub mod basis {
    pub fn f_star() -> usize {
        0
    }

    pub fn f(j: usize) -> usize {
        1 + j
    }

    pub fn g(j: usize, n: usize) -> usize {
        1 + n + j
    }

    pub fn h(n: usize) -> usize {
        2 * n + 1
    }
}

/// Commuting contractions with `h^* A_i A_j A_k f_* = T_{ijk} / (tau sqrt n)`:
/// `A_i f_* = f_i`, `A_i f_j = sum_k T_{ijk} g_k / (tau sqrt n)`,
/// `A_i g_j = delta_ij h`, `A_i h = 0`.
///
/// Every product of two of these maps has at most one nonzero term per
/// entry, so symmetry of `T` makes the commutators vanish in floating point.
pub fn witness_contractions(t: &SymmetricTensor<f64>, tau: f64) -> Result<Vec<DMatrix<f64>>> {
    if t.order() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: t.order(),
        });
    }
    let n = t.dim();
    let bound = tau * (n as f64).sqrt();
    let worst = max_slice_norm(t);
    if worst > bound {
        return Err(Error::SliceNorm {
            max_slice_norm: worst,
            bound,
        });
    }
    let s = 1.0 / bound;
    let size = 2 * n + 2;
    Ok((0..n)
        .map(|i| {
            let mut a = DMatrix::zeros(size, size);
            a[(basis::f(i), basis::f_star())] = 1.0;
            for j in 0..n {
                for k in 0..n {
                    a[(basis::g(k, n), basis::f(j))] = *t.get(&[i, j, k]) * s;
                }
            }
            a[(basis::h(n), basis::g(i, n))] = 1.0;
            a
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub schema: String,
    pub n: usize,
    pub seed: u64,
    pub tau0: f64,
    pub tau_used: f64,
    /// Every `tau` tried with the slice-norm bound it had to meet.
    pub tau_schedule: Vec<f64>,
    pub sup_norm: f64,
    /// `"exact"` or `"hoeffding_bound"`.
    pub sup_norm_method: String,
    /// Probability that the bound fails for a random form (zero when exact).
    pub sup_norm_failure_probability: f64,
    pub cb_lower: f64,
    /// `sum T_{ijk}^2 / (tau sqrt n)`, the value predicted by the construction.
    pub structural_value: f64,
    pub paper_floor: f64,
    pub max_slice_norm: f64,
    /// `max_i ||M_i|| / sqrt(n)`.
    pub slice_ratio: f64,
    pub ratio: f64,
    pub max_contraction_norm: f64,
    pub commutation_residual: f64,
    pub floor_satisfied: bool,
}

/// Random cubic form, its witness at the smallest admissible `tau` on the
/// doubling schedule from `tau0`, and the resulting bounds.
pub fn certify_separation(n: usize, seed: u64, tau0: f64, cap: usize) -> Result<SeparationReport> {
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "need at least two variables, got {n}"
        )));
    }
    if tau0.is_nan() || tau0 <= 0.0 {
        return Err(Error::Invariant(format!(
            "tau must be positive, got {tau0}"
        )));
    }
    let p = random_cubic_form(n, seed);
    let t = symmetric_tensor_of_form(&p)?;
    let slice = max_slice_norm(&t);
    let root = (n as f64).sqrt();
    let mut tau = tau0;
    let mut schedule = vec![tau];
    while slice > tau * root {
        if schedule.len() > MAX_TAU_DOUBLINGS {
            return Err(Error::SliceNorm {
                max_slice_norm: slice,
                bound: tau * root,
            });
        }
        tau *= 2.0;
        schedule.push(tau);
    }
    let witness = witness_contractions(&t, tau)?;
    let max_contraction_norm = witness.iter().map(operator_norm).fold(0.0, f64::max);
    let family = CommutingFamily::from_real(&witness, CommutationCheck::Exact)?;
    let cert = cb_lower_bound(&t, &family)?;

    let (sup_norm, method, failure) = if n <= cap {
        (sup_norm_hypercube(&p, cap)?, "exact", 0.0)
    } else {
        let nf = n as f64;
        (2.0 * nf * nf, "hoeffding_bound", 2.0 * (-nf).exp())
    };
    let squares: f64 = t.entries().iter().map(|v| v * v).sum();
    let floor = (n as f64).powf(2.5) / (36.0 * tau);
    Ok(SeparationReport {
        schema: SCHEMA.into(),
        n,
        seed,
        tau0,
        tau_used: tau,
        tau_schedule: schedule,
        sup_norm,
        sup_norm_method: method.into(),
        sup_norm_failure_probability: failure,
        cb_lower: cert.value,
        structural_value: squares / (tau * root),
        paper_floor: floor,
        max_slice_norm: slice,
        slice_ratio: slice / root,
        ratio: cert.value / sup_norm,
        max_contraction_norm,
        commutation_residual: cert.commutation_residual,
        floor_satisfied: cert.value >= floor - 1e-8,
    })
}

/// Fraction of seeds whose largest slice norm exceeds `tau sqrt n`.
pub fn slice_norm_exceedance(n: usize, seeds: &[u64], tau: f64) -> Result<f64> {
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let mut bad = 0usize;
    for &seed in seeds {
        let t = symmetric_tensor_of_form(&random_cubic_form(n, seed))?;
        if max_slice_norm(&t) > tau * (n as f64).sqrt() {
            bad += 1;
        }
    }
    Ok(bad as f64 / seeds.len() as f64)
}
