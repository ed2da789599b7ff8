use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{cb_lower_bound, CommutationCheck, CommutingFamily, USER_COMMUTATION_TOL};
use crate::signs::all_sign_vectors;
use crate::tensor::{symmetric_tensor_of_form, Form, MultiIndex};

/// Relative tolerance for the identity `h((x,1)) = C q(x)` and the matching
/// of degree-four coefficients.
pub const MATCH_TOL: f64 = 1e-9;
pub const BOUND_SLACK: f64 = 1e-8;

/// `q(y_0, y) = y_0 p(y)` over `n + 1` variables with the witness extended
/// by `A_0 = 1`, so that the witness value of `q` equals that of `p`.
#[derive(Clone, Debug)]
pub struct QuarticEmbedding {
    pub q: Form,
    pub witness: Vec<DMatrix<f64>>,
}

pub fn quartic_embedding(p: &Form, witness: &[DMatrix<f64>]) -> Result<QuarticEmbedding> {
    if p.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            found: p.degree(),
        });
    }
    if witness.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} witness matrices for a form in {} variables",
            witness.len(),
            p.n()
        )));
    }
    let size = witness.first().map_or(1, |m| m.nrows());
    let mut q = Form::zero(p.n() + 1, 4);
    for (alpha, c) in p.terms() {
        let mut e = Vec::with_capacity(p.n() + 1);
        e.push(1);
        e.extend_from_slice(alpha.exponents());
        q.add_term(MultiIndex::new(e), *c)?;
    }
    let mut extended = Vec::with_capacity(witness.len() + 1);
    extended.push(DMatrix::identity(size, size));
    extended.extend(witness.iter().cloned());
    Ok(QuarticEmbedding {
        q,
        witness: extended,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuarticBound {
    /// `|| sum T_q A A A A ||` on the witness.
    pub witness_value: f64,
    /// `C` times the witness value.
    pub scaled_value: f64,
    /// `|| sum T_h B B B B ||` with `B_i = A_i` on the first block and zero after.
    pub h_value: f64,
    /// Whether the lower bound stays consistent with `||h||_cb <= 1`.
    pub consistent: bool,
}

/// Tests a candidate `h` over `2N` variables with `h((x,1)) = C q(x)` against
/// the witness for `q`. The degree-four coefficients of `h` in `x` alone
/// must equal `C` times those of `q`; since `B_i = 0` past the first block,
/// the witness value of `h` is then `C` times that of `q`, and the result is
/// consistent with `||h||_cb <= 1` only if `C * value <= 1 + 1e-8`.
pub fn quartic_constant_bound(
    q: &Form,
    witness: &[DMatrix<f64>],
    h: &Form,
    c: f64,
    cap: usize,
) -> Result<QuarticBound> {
    let big_n = q.n();
    if q.degree() != 4 || h.degree() != 4 {
        return Err(Error::DegreeMismatch {
            expected: 4,
            found: if q.degree() != 4 {
                q.degree()
            } else {
                h.degree()
            },
        });
    }
    if h.n() != 2 * big_n || witness.len() != big_n {
        return Err(Error::DimensionMismatch(format!(
            "h over {} variables and {} matrices for q over {}",
            h.n(),
            witness.len(),
            big_n
        )));
    }
    if big_n > cap {
        return Err(Error::EnumerationCap { n: big_n, cap });
    }
    let scale = 1.0 + q.terms().values().map(|v| v.abs()).sum::<f64>() * c.abs();
    for x in all_sign_vectors(big_n) {
        let xs = x.to_f64();
        let lhs = h.eval(&x.with_ones());
        let rhs = c * q.eval(&xs);
        if (lhs - rhs).abs() > MATCH_TOL * scale {
            return Err(Error::Invariant(format!(
                "h((x,1)) = {lhs} differs from C q(x) = {rhs} at x = {x}"
            )));
        }
    }
    let lift = |alpha: &MultiIndex| {
        let mut e = alpha.exponents().to_vec();
        e.resize(2 * big_n, 0);
        MultiIndex::new(e)
    };
    for (alpha, d) in q.terms() {
        let hc = h.coefficient(&lift(alpha));
        if (hc - c * d).abs() > MATCH_TOL * scale {
            return Err(Error::Invariant(format!(
                "coefficient {hc} of h at {:?} is not C times {d}",
                alpha.exponents()
            )));
        }
    }
    for (alpha, hc) in h.terms() {
        let e = alpha.exponents();
        if e[big_n..].iter().all(|&a| a == 0) {
            let back = MultiIndex::new(e[..big_n].to_vec());
            if q.coefficient(&back) == 0.0 && hc.abs() > MATCH_TOL * scale {
                return Err(Error::Invariant(format!(
                    "h has coefficient {hc} at {e:?} where q has none"
                )));
            }
        }
    }

    let family =
        CommutingFamily::from_real(witness, CommutationCheck::Tolerance(USER_COMMUTATION_TOL))?;
    let tq = symmetric_tensor_of_form(q)?;
    let witness_value = cb_lower_bound(&tq, &family)?.value;

    let size = witness.first().map_or(1, |m| m.nrows());
    let mut padded = witness.to_vec();
    padded.resize(2 * big_n, DMatrix::zeros(size, size));
    let th = symmetric_tensor_of_form(h)?;
    let h_value = cb_lower_bound(
        &th,
        &CommutingFamily::from_real(&padded, CommutationCheck::Tolerance(USER_COMMUTATION_TOL))?,
    )?
    .value;

    let scaled_value = c.abs() * witness_value;
    Ok(QuarticBound {
        witness_value,
        scaled_value,
        h_value,
        consistent: scaled_value <= 1.0 + BOUND_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sup_norm_hypercube;
    use crate::separations::{random_cubic_form, witness_contractions};
    use crate::tensor::form_of_tensor;

    fn setup(n: usize) -> (Form, Vec<DMatrix<f64>>, f64) {
        let p = random_cubic_form(n, 5);
        let t = symmetric_tensor_of_form(&p).unwrap();
        let a = witness_contractions(&t, 3.0).unwrap();
        let fam = CommutingFamily::from_real(&a, CommutationCheck::Exact).unwrap();
        let v = cb_lower_bound(&t, &fam).unwrap().value;
        (p, a, v)
    }

    fn trivial_h(q: &Form, c: f64) -> Form {
        let mut h = Form::zero(2 * q.n(), 4);
        for (alpha, d) in q.terms() {
            let mut e = alpha.exponents().to_vec();
            e.resize(2 * q.n(), 0);
            h.add_term(MultiIndex::new(e), c * d).unwrap();
        }
        h
    }

    #[test]
    fn embedding_preserves_sup_norm_and_witness_value() {
        let (p, a, v) = setup(4);
        let e = quartic_embedding(&p, &a).unwrap();
        assert_eq!(e.q.n(), 5);
        let sp = sup_norm_hypercube(&p, 24).unwrap();
        let sq = sup_norm_hypercube(&e.q, 24).unwrap();
        assert!((sq - sp).abs() < 1e-12);
        let tq = symmetric_tensor_of_form(&e.q).unwrap();
        let back = form_of_tensor(&tq);
        assert_eq!(back.terms().len(), e.q.terms().len());
        let fam = CommutingFamily::from_real(
            &e.witness,
            CommutationCheck::Tolerance(USER_COMMUTATION_TOL),
        )
        .unwrap();
        let vq = cb_lower_bound(&tq, &fam).unwrap().value;
        assert!((vq - v).abs() < 1e-12 * v.max(1.0));
    }

    #[test]
    fn constant_threshold() {
        let (p, a, _) = setup(4);
        let e = quartic_embedding(&p, &a).unwrap();
        let probe =
            quartic_constant_bound(&e.q, &e.witness, &trivial_h(&e.q, 1.0), 1.0, 24).unwrap();
        let wv = probe.witness_value;
        for (factor, ok) in [(0.9, true), (1.01, false), (2.0, false)] {
            let c = factor / wv;
            let r = quartic_constant_bound(&e.q, &e.witness, &trivial_h(&e.q, c), c, 24).unwrap();
            assert_eq!(r.consistent, ok, "factor {factor}");
            assert!((r.h_value - r.scaled_value).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_h_rejected() {
        let (p, a, _) = setup(3);
        let e = quartic_embedding(&p, &a).unwrap();
        let h = trivial_h(&e.q, 2.0);
        assert!(quartic_constant_bound(&e.q, &e.witness, &h, 1.0, 24).is_err());
    }
}
