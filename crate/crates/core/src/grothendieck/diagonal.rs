use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::lambda_min;
use crate::norms::{inf_to_one_norm, operator_norm};

/// Rounded-up upper bound on the real Grothendieck constant.
pub const K_UPPER: f64 = 1.7823;
pub const FEASIBILITY_TOL: f64 = 1e-10;
pub const WEIGHT_FLOOR: f64 = 1e-12;
pub const ITERATIONS: usize = 5000;
const BISECTION_STEPS: usize = 14;

/// `A = K Diag(u) B Diag(v)` with unit `u, v > 0` and `||B|| <= ||A||_{inf->1}`.
#[derive(Clone, Debug)]
pub struct DiagonalFactorization {
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    pub b: DMatrix<f64>,
    pub k: f64,
    pub norm_a: f64,
    /// Smallest eigenvalue of the block matrix at the returned weights.
    pub lambda_min: f64,
    /// Every `K` tried, with the best `lambda_min` reached there.
    pub trace: Vec<KProbe>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KProbe {
    pub k: f64,
    pub lambda_min: f64,
    pub feasible: bool,
}

fn block_matrix(m: &DMatrix<f64>, sigma: &[f64], mu: &[f64]) -> DMatrix<f64> {
    let (p, q) = m.shape();
    let mut h = DMatrix::zeros(p + q, p + q);
    for i in 0..p {
        h[(i, i)] = sigma[i];
        for j in 0..q {
            h[(i, p + j)] = m[(i, j)];
            h[(p + j, i)] = m[(i, j)];
        }
    }
    for j in 0..q {
        h[(p + j, p + j)] = mu[j];
    }
    h
}

fn scaled(a: &DMatrix<f64>, norm_a: f64, k: f64) -> DMatrix<f64> {
    if norm_a == 0.0 {
        DMatrix::zeros(a.nrows(), a.ncols())
    } else {
        a / (k * norm_a)
    }
}

/// `lambda_min [[Diag sigma, M], [M^T, Diag mu]]` with `M = A / (K ||A||_{inf->1})`.
///
/// A nonnegative value means `|x^T M y| <= sum sigma_i x_i^2 + mu_j y_j^2`
/// in the averaged sense, i.e. `||Diag(sigma)^{-1/2} M Diag(mu)^{-1/2}|| <= 1`.
pub fn hahn_banach_feasibility_check(
    a: &DMatrix<f64>,
    sigma: &[f64],
    mu: &[f64],
    k: f64,
    cap: usize,
) -> Result<f64> {
    if sigma.len() != a.nrows() || mu.len() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "weights of lengths {}, {} for a {}x{} matrix",
            sigma.len(),
            mu.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    let norm_a = inf_to_one_norm(a, cap)?;
    Ok(lambda_min(&block_matrix(&scaled(a, norm_a, k), sigma, mu)).0)
}

/// Euclidean projection onto `{x : x_i >= floor, sum x = 1}`.
fn project_simplex(y: &[f64], floor: f64) -> Vec<f64> {
    let n = y.len();
    let budget = 1.0 - floor * n as f64;
    let shifted: Vec<f64> = y.iter().map(|v| v - floor).collect();
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - budget) / (k + 1) as f64;
        if s - candidate > 0.0 {
            theta = candidate;
        }
    }
    shifted
        .iter()
        .map(|v| (v - theta).max(0.0) + floor)
        .collect()
}

struct Ascent {
    sigma: Vec<f64>,
    mu: Vec<f64>,
    lambda_min: f64,
}

/// Projected subgradient ascent on `lambda_min` over the two simplices,
/// stopping early once the weights are feasible.
fn maximize_lambda_min(m: &DMatrix<f64>, start: (&[f64], &[f64])) -> Ascent {
    let (p, q) = m.shape();
    let mut sigma = start.0.to_vec();
    let mut mu = start.1.to_vec();
    let (mut lam, mut z) = lambda_min(&block_matrix(m, &sigma, &mu));
    let mut best = Ascent {
        sigma: sigma.clone(),
        mu: mu.clone(),
        lambda_min: lam,
    };
    let scale = 1.0 / (p + q) as f64;
    for k in 1..=ITERATIONS {
        if best.lambda_min >= 0.0 {
            break;
        }
        // d lambda_min / d sigma_i = z_i^2 on the simplex tangent space
        let step = scale / k as f64;
        let gs: Vec<f64> = (0..p).map(|i| sigma[i] + step * z[i] * z[i]).collect();
        let gm: Vec<f64> = (0..q).map(|j| mu[j] + step * z[p + j] * z[p + j]).collect();
        sigma = project_simplex(&gs, WEIGHT_FLOOR);
        mu = project_simplex(&gm, WEIGHT_FLOOR);
        (lam, z) = lambda_min(&block_matrix(m, &sigma, &mu));
        if lam > best.lambda_min {
            best = Ascent {
                sigma: sigma.clone(),
                mu: mu.clone(),
                lambda_min: lam,
            };
        }
    }
    best
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Finds weights making the block matrix positive semidefinite and returns
/// the scaled factorization. With `k = None` the smallest feasible `K` in
/// `[1, K_UPPER]` is searched by bisection (best effort).
pub fn diagonal_factorize(
    a: &DMatrix<f64>,
    k: Option<f64>,
    cap: usize,
) -> Result<DiagonalFactorization> {
    let norm_a = inf_to_one_norm(a, cap)?;
    if norm_a == 0.0 {
        return Err(Error::Invariant("cannot factorize the zero matrix".into()));
    }
    let (p, q) = a.shape();
    let mut trace = Vec::new();
    let mut probe = |k: f64, start: (&[f64], &[f64])| {
        let run = maximize_lambda_min(&scaled(a, norm_a, k), start);
        let feasible = run.lambda_min >= -FEASIBILITY_TOL;
        trace.push(KProbe {
            k,
            lambda_min: run.lambda_min,
            feasible,
        });
        (run, feasible)
    };
    let (su, mu0) = (uniform(p), uniform(q));

    let (k, run) = match k {
        Some(k) => {
            let (run, feasible) = probe(k, (&su, &mu0));
            if !feasible {
                return Err(Error::SolverFailure {
                    message: format!("no feasible weights found at K = {k}"),
                    lambda_min: run.lambda_min,
                });
            }
            (k, run)
        }
        None => {
            let (upper_run, feasible) = probe(K_UPPER, (&su, &mu0));
            if !feasible {
                return Err(Error::SolverFailure {
                    message: format!("no feasible weights found at K = {K_UPPER}"),
                    lambda_min: upper_run.lambda_min,
                });
            }
            let (one_run, one_ok) = probe(1.0, (&upper_run.sigma, &upper_run.mu));
            if one_ok {
                (1.0, one_run)
            } else {
                let (mut lo, mut hi, mut best) = (1.0, K_UPPER, upper_run);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    let (run, ok) = probe(mid, (&best.sigma, &best.mu));
                    if ok {
                        hi = mid;
                        best = run;
                    } else {
                        lo = mid;
                    }
                }
                (hi, best)
            }
        }
    };

    // a slightly negative lambda_min = -delta is absorbed by shifting the
    // weights: (sigma + delta) / (1 + p delta) keeps the simplex and makes the
    // block matrix, with M shrunk by sqrt((1 + p delta)(1 + q delta)), PSD
    let delta = (-run.lambda_min).max(0.0);
    let sigma: Vec<f64> = run
        .sigma
        .iter()
        .map(|s| (s + delta) / (1.0 + p as f64 * delta))
        .collect();
    let mu: Vec<f64> = run
        .mu
        .iter()
        .map(|s| (s + delta) / (1.0 + q as f64 * delta))
        .collect();
    let u = DVector::from_iterator(p, sigma.iter().map(|s| s.sqrt()));
    let v = DVector::from_iterator(q, mu.iter().map(|s| s.sqrt()));
    let b = DMatrix::from_fn(p, q, |i, j| a[(i, j)] / (u[i] * v[j]) / k);
    let lambda_min = lambda_min(&block_matrix(&scaled(a, norm_a, k), &sigma, &mu)).0;
    Ok(DiagonalFactorization {
        u,
        v,
        b,
        k,
        norm_a,
        lambda_min,
        trace,
    })
}

impl DiagonalFactorization {
    /// Entrywise `max |K u_i B_ij v_j - A_ij|`.
    pub fn reconstruction_error(&self, a: &DMatrix<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let r = self.k * self.u[i] * self.b[(i, j)] * self.v[j];
                worst = worst.max((r - a[(i, j)]).abs());
            }
        }
        worst
    }

    pub fn b_norm(&self) -> f64 {
        operator_norm(&self.b)
    }

    pub fn sigma(&self) -> Vec<f64> {
        self.u.iter().map(|x| x * x).collect()
    }

    pub fn mu(&self) -> Vec<f64> {
        self.v.iter().map(|x| x * x).collect()
    }
}
