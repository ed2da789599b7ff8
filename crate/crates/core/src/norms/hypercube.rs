use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{Form, QuadraticPolynomial};

pub const DEFAULT_ENUMERATION_CAP: usize = 24;
/// Enumeration beyond this is refused regardless of the configured cap.
pub const HARD_ENUMERATION_LIMIT: usize = 30;

/// Low bits of the sign counter walked sequentially by one job.
const CHUNK_BITS: usize = 12;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap.min(HARD_ENUMERATION_LIMIT) {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(())
}

/// Multilinear reduction on the hypercube: `x^alpha = prod_{alpha_i odd} x_i`.
///
/// The returned map sends a parity mask to the summed coefficient.
pub fn parity_coefficients(p: &Form) -> BTreeMap<u64, f64> {
    assert!(p.n() <= 64, "parity masks hold at most 64 variables");
    let mut out = BTreeMap::new();
    for (alpha, &c) in p.terms() {
        let mask = alpha
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a % 2 == 1)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        *out.entry(mask).or_insert(0.0) += c;
    }
    out
}

fn quadratic_parity_coefficients(p: &QuadraticPolynomial) -> BTreeMap<u64, f64> {
    let n = p.n();
    let mut out = BTreeMap::new();
    *out.entry(0).or_insert(0.0) += p.c;
    for i in 0..n {
        *out.entry(0).or_insert(0.0) += p.a[(i, i)];
        *out.entry(1u64 << i).or_insert(0.0) += p.b[i];
        for j in 0..n {
            if i != j {
                *out.entry(1u64 << i | 1u64 << j).or_insert(0.0) += p.a[(i, j)];
            }
        }
    }
    out
}

/// Values of `sum_S c_S prod_{i in S} x_i` on every sign vector, indexed by
/// the bit pattern of `x` (bit `i` set means `x_i = -1`).
///
/// This is a Walsh-Hadamard transform of the coefficient vector; each stage
/// is a set of disjoint butterflies, so the result does not depend on how the
/// work is split across threads.
fn hypercube_values(n: usize, coeffs: &BTreeMap<u64, f64>) -> Vec<f64> {
    let mut data = vec![0.0; 1usize << n];
    for (&mask, &c) in coeffs {
        data[mask as usize] += c;
    }
    let mut h = 1usize;
    while h < data.len() {
        data.par_chunks_mut(2 * h)
            .with_min_len((1 << CHUNK_BITS) / (2 * h) + 1)
            .for_each(|block| {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x + y;
                    *b = x - y;
                }
            });
        h *= 2;
    }
    data
}

fn sup_of_parity(n: usize, coeffs: &BTreeMap<u64, f64>, cap: usize) -> Result<f64> {
    check_cap(n, cap)?;
    let values = hypercube_values(n, coeffs);
    Ok(values.par_iter().map(|v| v.abs()).reduce(|| 0.0, f64::max))
}

/// Exact `max_x |p(x)|` over `{+1,-1}^n` by full enumeration.
pub fn sup_norm_hypercube(p: &Form, cap: usize) -> Result<f64> {
    check_cap(p.n(), cap)?;
    sup_of_parity(p.n(), &parity_coefficients(p), cap)
}

/// Exact `max_x |x^T A x + b^T x + c|` over sign vectors.
pub fn sup_norm_quadratic(p: &QuadraticPolynomial, cap: usize) -> Result<f64> {
    check_cap(p.n(), cap)?;
    sup_of_parity(p.n(), &quadratic_parity_coefficients(p), cap)
}

/// Non-certifying estimate of `max_x |p(x)|` by restarted greedy sign flips.
///
/// The value is attained at some sign vector, so it is a lower bound on the
/// sup norm, but it may fall short of it.
pub fn sup_norm_estimate(p: &Form, seed: u64, restarts: usize) -> f64 {
    let n = p.n();
    let terms: Vec<(Vec<usize>, f64)> = parity_coefficients(p)
        .into_iter()
        .map(|(mask, c)| ((0..n).filter(|i| mask >> i & 1 == 1).collect(), c))
        .collect();
    let eval = |x: &[f64]| -> f64 {
        terms
            .iter()
            .map(|(vars, c)| c * vars.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    };
    (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let mut x: Vec<f64> = (0..n)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let mut best = eval(&x).abs();
            loop {
                let mut improved = false;
                for i in 0..n {
                    x[i] = -x[i];
                    let v = eval(&x).abs();
                    if v > best {
                        best = v;
                        improved = true;
                    } else {
                        x[i] = -x[i];
                    }
                }
                if !improved {
                    break best;
                }
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// `max_{x,y} x^T A y = max_y ||A y||_1` over sign vectors.
///
/// Enumerates the shorter side with its first sign fixed to `+1`; each job
/// walks a Gray code over the low bits of its range and recomputes the
/// product from scratch at the start, so the reduction is bit-stable.
pub fn inf_to_one_norm(a: &DMatrix<f64>, cap: usize) -> Result<f64> {
    let m = if a.ncols() <= a.nrows() {
        a.clone()
    } else {
        a.transpose()
    };
    let s = m.ncols();
    check_cap(s, cap)?;
    if s == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let free = s - 1;
    let low = free.min(CHUNK_BITS);
    let jobs = 1u64 << (free - low);
    let columns: Vec<Vec<f64>> = (0..s)
        .map(|j| m.column(j).iter().copied().collect())
        .collect();
    let rows = m.nrows();

    let best = (0..jobs)
        .into_par_iter()
        .map(|job| {
            let sign = |bits: u64, j: usize| -> f64 {
                // column 0 is pinned to +1; column j >= 1 reads bit j-1
                if j > 0 && bits >> (j - 1) & 1 == 1 {
                    -1.0
                } else {
                    1.0
                }
            };
            let base = job << low;
            let mut z = vec![0.0; rows];
            for (j, col) in columns.iter().enumerate() {
                let sj = sign(base, j);
                for (zr, c) in z.iter_mut().zip(col) {
                    *zr += sj * c;
                }
            }
            let mut best = z.iter().map(|v| v.abs()).sum::<f64>();
            let mut bits = base;
            for step in 1u64..(1 << low) {
                let flip = step.trailing_zeros() as usize;
                bits ^= 1 << flip;
                let j = flip + 1;
                let delta = 2.0 * sign(bits, j);
                for (zr, c) in z.iter_mut().zip(&columns[j]) {
                    *zr += delta * c;
                }
                best = best.max(z.iter().map(|v| v.abs()).sum::<f64>());
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}
