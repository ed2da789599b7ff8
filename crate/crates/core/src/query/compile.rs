use nalgebra::DMatrix;
use num_complex::Complex64;

use super::algorithm::QueryAlgorithm;
use super::dilation::{complete_to_unitary, dilate_contraction};
use super::extract::position_of_variable;
use crate::error::{Error, Result};
use crate::grothendieck::{diagonal_factorize, DiagonalFactorization};
use crate::linalg::{CMatrix, CVector};
use crate::norms::{operator_norm, CbFactorization};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `[1_m; 0]` as a map `C^m -> C^rows`.
fn isometry_pad(rows: usize, m: usize) -> CMatrix {
    CMatrix::from_fn(rows, m, |r, col| c(if r == col { 1.0 } else { 0.0 }))
}

/// Pads each block of `d` rows to `d_new` rows with zeros.
fn pad_blocks(x: &CMatrix, dim: usize, d: usize, d_new: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dim * d_new, x.ncols());
    for i in 0..dim {
        out.rows_mut(i * d_new, d).copy_from(&x.rows(i * d, d));
    }
    out
}

/// Index layout of compiled circuits: register position `p`, Hadamard-test
/// control `c`, multiplicity `a`, and one fresh ancilla qubit per
/// contraction step packed into `anc`.
struct Layout {
    dp: usize,
    ancillas: usize,
}

impl Layout {
    fn w(&self) -> usize {
        2 * self.dp << self.ancillas
    }

    fn index(&self, p: usize, ctl: usize, a: usize, anc: usize) -> usize {
        ((p * 2 + ctl) * self.dp + a) * (1 << self.ancillas) + anc
    }
}

/// Hadamard-test circuit for a certified factorization of half-degree `t >= 1`.
///
/// With `W_k = V_{k-1} U_k^*` (and isometric pads `V_0`, `U_{2t+1}`) the
/// control-`0` branch carries `D W_t^* .. D W_1^* u~` and the control-`1`
/// branch `W_{t+1} D .. W_{2t} D W_{2t+1} v~`; both branches share the
/// queries. Each step's contraction is dilated on its own ancilla qubit, and
/// the observable is `Z` on the control restricted to all ancillas being
/// zero, so the expectation is `Re <branch0, branch1> = Re T((x,1), .., (x,1))`.
pub fn algorithm_of_factorization(fact: &CbFactorization) -> Result<QueryAlgorithm> {
    let check = fact.check();
    if !check.passes() {
        return Err(Error::Uncertified(format!(
            "unit residual {:e}, largest contraction norm {}",
            check.unit_residual, check.max_contraction_norm
        )));
    }
    let (t, m, dim, d) = (fact.t(), fact.m(), fact.dim(), fact.d());
    if t == 0 {
        return Err(Error::Invariant(
            "compilation needs at least one query".into(),
        ));
    }
    if dim % 2 != 0 || dim == 0 {
        return Err(Error::DimensionMismatch(format!(
            "factorization over {dim} variables is not of the form (x, 1)"
        )));
    }
    let n = dim / 2;
    let dp = d.max(m.div_ceil(dim));
    let big = dp * dim;

    let pairs: Vec<(CMatrix, CMatrix)> = fact
        .pairs()
        .iter()
        .map(|(a, b)| (pad_blocks(a, dim, d, dp), pad_blocks(b, dim, d, dp)))
        .collect();
    let pad = isometry_pad(big, m);
    // w_k for k = 1..=2t+1, stored at index k-1
    let ws: Vec<CMatrix> = (1..=2 * t + 1)
        .map(|k| {
            let left = if k == 1 { &pad } else { &pairs[k - 2].1 };
            let right = if k == 2 * t + 1 {
                &pad
            } else {
                &pairs[k - 1].0
            };
            left * right.adjoint()
        })
        .collect();
    let w_at = |k: usize| &ws[k - 1];
    let u_t = &pad * fact.u();
    let v_t = &pad * fact.v();

    let layout = Layout {
        dp,
        ancillas: t + 1,
    };
    let w = layout.w();
    let total = 2 * n * w;
    // big-space index (variable i, multiplicity a) -> register position
    let pos = |b: usize| (position_of_variable(b / dp, n), b % dp);

    // U_0 prepares the two dilated branches on ancilla 0
    let branch_state = |wm: &CMatrix, vec: &CVector| -> Result<CVector> {
        let dil = dilate_contraction(wm)?;
        Ok(dil.columns(0, big) * vec)
    };
    let b0 = branch_state(&w_at(1).adjoint(), &u_t)?;
    let b1 = branch_state(w_at(2 * t + 1), &v_t)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi0 = CVector::zeros(total);
    for (ctl, state) in [(0, &b0), (1, &b1)] {
        for bit in 0..2 {
            for b in 0..big {
                let (p, a) = pos(b);
                psi0[layout.index(p, ctl, a, bit)] = state[bit * big + b] * c(s);
            }
        }
    }
    let mut unitaries = vec![complete_to_unitary(&psi0)?];

    for k in 1..=t {
        let ctl0 = if k < t {
            Some(w_at(k + 1).adjoint())
        } else {
            None
        };
        let ctl1 = w_at(2 * t + 1 - k).clone();
        let mut step = controlled_step(&layout, n, big, k, ctl0.as_ref(), &ctl1, &pos)?;
        if k == t {
            step = hadamard_on_control(&layout, n, big, &pos) * step;
        }
        unitaries.push(step);
    }

    let mut diag = vec![0.0; total];
    for b in 0..big {
        let (p, a) = pos(b);
        diag[layout.index(p, 0, a, 0)] = 1.0;
        diag[layout.index(p, 1, a, 0)] = -1.0;
    }
    let observable = super::algorithm::diagonal_observable(&diag);
    QueryAlgorithm::new(n, t, w, unitaries, observable)
}

/// `|0><0| (x) Dil(W0) + |1><1| (x) Dil(W1)` on ancilla `k` (identity on
/// the control-`0` branch when `W0` is absent).
fn controlled_step(
    layout: &Layout,
    n: usize,
    big: usize,
    k: usize,
    w0: Option<&CMatrix>,
    w1: &CMatrix,
    pos: &dyn Fn(usize) -> (usize, usize),
) -> Result<CMatrix> {
    let total = 2 * n * layout.w();
    let mut out = CMatrix::zeros(total, total);
    let id = CMatrix::identity(2 * big, 2 * big);
    let d0 = match w0 {
        Some(m) => dilate_contraction(m)?,
        None => id,
    };
    let d1 = dilate_contraction(w1)?;
    let bit = 1usize << k;
    for (ctl, dil) in [(0, &d0), (1, &d1)] {
        for rest in (0..1usize << layout.ancillas).filter(|r| r & bit == 0) {
            for r in 0..2 * big {
                let (pr, ar) = pos(r % big);
                let row = layout.index(pr, ctl, ar, rest | (r / big) * bit);
                for col in 0..2 * big {
                    let z = dil[(r, col)];
                    if z == c(0.0) {
                        continue;
                    }
                    let (pc, ac) = pos(col % big);
                    out[(row, layout.index(pc, ctl, ac, rest | (col / big) * bit))] = z;
                }
            }
        }
    }
    Ok(out)
}

fn hadamard_on_control(
    layout: &Layout,
    n: usize,
    big: usize,
    pos: &dyn Fn(usize) -> (usize, usize),
) -> CMatrix {
    let total = 2 * n * layout.w();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut h = CMatrix::zeros(total, total);
    for b in 0..big {
        let (p, a) = pos(b);
        for anc in 0..1usize << layout.ancillas {
            let i0 = layout.index(p, 0, a, anc);
            let i1 = layout.index(p, 1, a, anc);
            h[(i0, i0)] = c(s);
            h[(i0, i1)] = c(s);
            h[(i1, i0)] = c(s);
            h[(i1, i1)] = c(-s);
        }
    }
    h
}

/// Factorization read off a query algorithm:
/// `u = v = U_0 e_1`, slots `P U_1^*, .., P U_{t-1}^*, P U_t^* Q U_t,
/// P U_{t-1}, .., P U_1, P` with `P` the projector of the queried variable.
pub fn factorization_of_algorithm(alg: &QueryAlgorithm) -> Result<CbFactorization> {
    let (n, t, w) = (alg.n(), alg.t(), alg.w());
    let total = alg.dim();
    let dim = 2 * n;
    // permutation from register order (p, k) to variable order (i, k)
    let r = CMatrix::from_fn(total, total, |row, col| {
        let (i, k) = (row / w, row % w);
        let p = position_of_variable(i, n);
        c(if col == p * w + k { 1.0 } else { 0.0 })
    });
    let u = alg.unitaries();
    let middle = u[t].adjoint() * alg.observable() * &u[t];
    let mut slots: Vec<CMatrix> = Vec::with_capacity(2 * t);
    for k in 1..t {
        slots.push(u[k].adjoint());
    }
    slots.push(middle);
    for k in (1..t).rev() {
        slots.push(u[k].clone());
    }
    slots.push(CMatrix::identity(total, total));
    let pairs = slots.into_iter().map(|s| (r.clone(), &r * s)).collect();
    let start = u[0].column(0).into_owned();
    CbFactorization::new(t, w, dim, start.clone(), start, pairs)
}

/// One-query circuit whose expectation on `x` is `x^T A x / K`.
#[derive(Clone, Debug)]
pub struct OneQuery {
    pub algorithm: QueryAlgorithm,
    /// Effective constant: the factorization's `K` times any rescaling of `B`.
    pub k: f64,
    pub factorization: DiagonalFactorization,
}

/// Diagonal factorization `A = K Diag(u) B Diag(v)`, then the Hadamard test
/// between `Diag(x) u` and `B Diag(x) v`.
pub fn one_query_from_quadratic(a: &DMatrix<f64>, cap: usize) -> Result<OneQuery> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "quadratic form needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let norm = crate::norms::inf_to_one_norm(a, cap)?;
    if norm > 1.0 + crate::norms::CONTRACTION_SLACK {
        return Err(Error::NotContractive { norm });
    }
    if norm == 0.0 {
        // the zero form: any circuit with the zero observable
        let dim = 2 * n;
        let alg = QueryAlgorithm::new(
            n,
            1,
            1,
            vec![CMatrix::identity(dim, dim); 2],
            CMatrix::zeros(dim, dim),
        )?;
        let factorization = DiagonalFactorization {
            u: nalgebra::DVector::from_element(n, (1.0 / n as f64).sqrt()),
            v: nalgebra::DVector::from_element(n, (1.0 / n as f64).sqrt()),
            b: DMatrix::zeros(n, n),
            k: 1.0,
            norm_a: 0.0,
            lambda_min: 1.0 / n as f64,
            trace: vec![],
        };
        return Ok(OneQuery {
            algorithm: alg,
            k: 1.0,
            factorization,
        });
    }
    let factorization = diagonal_factorize(a, None, cap)?;
    let b_norm = operator_norm(&factorization.b);
    let shrink = b_norm.max(1.0);
    let b = factorization.b.map(|x| c(x / shrink));

    // T(y, y) = sum_{i,j < n} u_i B_ij v_j y_i y_j over y = (x, 1)
    let dim = 2 * n;
    let top = |m: &CMatrix| {
        let mut out = CMatrix::zeros(dim, n);
        out.rows_mut(0, n).copy_from(m);
        out
    };
    let id = CMatrix::identity(n, n);
    let u = CVector::from_iterator(n, factorization.u.iter().map(|&x| c(x)));
    let v = CVector::from_iterator(n, factorization.v.iter().map(|&x| c(x)));
    let pairs = vec![(top(&id), top(&id)), (top(&b.adjoint()), top(&id))];
    let fact = CbFactorization::new(1, 1, dim, u, v, pairs)?;
    let algorithm = algorithm_of_factorization(&fact)?;
    Ok(OneQuery {
        algorithm,
        k: factorization.k * shrink,
        factorization,
    })
}
