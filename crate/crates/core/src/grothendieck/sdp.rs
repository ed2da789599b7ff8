use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

pub const DEFAULT_RESTARTS: usize = 8;
const WINDOW: usize = 50;
const GAIN_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 20_000;
const ROUNDINGS: usize = 64;

/// Low-rank solution of `max sum_ij A_ij <u_i, v_j>` over unit vectors.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Bilinear objective of `u`, `v`, recomputed from the returned factors.
    pub value: f64,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub rank: usize,
    pub converged: bool,
    pub restarts_used: usize,
    pub sweeps: usize,
    /// Best `x^T A y` over hyperplane roundings of the factors.
    pub rounding_value: f64,
    pub rounding_x: Vec<f64>,
    pub rounding_y: Vec<f64>,
    pub seed: u64,
}

/// `ceil(sqrt(2 N)) + 1` for `N` unit vectors in total.
pub fn relaxation_rank(rows: usize, cols: usize) -> usize {
    ((2.0 * (rows + cols) as f64).sqrt().ceil() as usize) + 1
}

pub fn bilinear_value(a: &DMatrix<f64>, u: &[Vec<f64>], v: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            total += a[(i, j)] * dot(ui, vj);
        }
    }
    total
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> bool {
    let n = dot(x, x).sqrt();
    if n > 0.0 && n.is_finite() {
        x.iter_mut().for_each(|v| *v /= n);
        true
    } else {
        false
    }
}

fn random_unit(rng: &mut ChaCha8Rng, r: usize) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..r).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(&mut x) {
            return x;
        }
    }
}

/// `side[i] <- normalize(sum_j w(i, j) other[j])`, keeping the old vector
/// when the combination vanishes. Each update maximizes the objective over
/// one side with the other fixed, so sweeps never decrease it.
fn update_side(side: &mut [Vec<f64>], other: &[Vec<f64>], weight: impl Fn(usize, usize) -> f64) {
    let r = other.first().map_or(0, |o| o.len());
    for (i, s) in side.iter_mut().enumerate() {
        let mut acc = vec![0.0; r];
        for (j, o) in other.iter().enumerate() {
            let w = weight(i, j);
            if w != 0.0 {
                acc.iter_mut().zip(o).for_each(|(a, b)| *a += w * b);
            }
        }
        if normalize(&mut acc) {
            *s = acc;
        }
    }
}

struct Run {
    value: f64,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    converged: bool,
    sweeps: usize,
}

fn ascend(a: &DMatrix<f64>, rank: usize, seed: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<Vec<f64>> = (0..a.nrows())
        .map(|_| random_unit(&mut rng, rank))
        .collect();
    let mut v: Vec<Vec<f64>> = (0..a.ncols())
        .map(|_| random_unit(&mut rng, rank))
        .collect();
    let mut history = vec![bilinear_value(a, &u, &v)];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        update_side(&mut u, &v, |i, j| a[(i, j)]);
        update_side(&mut v, &u, |j, i| a[(i, j)]);
        sweeps += 1;
        let value = bilinear_value(a, &u, &v);
        history.push(value);
        if history.len() > WINDOW {
            let old = history[history.len() - 1 - WINDOW];
            if value - old < GAIN_TOL {
                converged = true;
                break;
            }
        }
    }
    Run {
        value: bilinear_value(a, &u, &v),
        u,
        v,
        converged,
        sweeps,
    }
}

fn round(a: &DMatrix<f64>, u: &[Vec<f64>], v: &[Vec<f64>], seed: u64) -> (f64, Vec<f64>, Vec<f64>) {
    let rank = u.first().or(v.first()).map_or(0, |x| x.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x726f_756e_6469_6e67);
    let sign = |x: f64| if x >= 0.0 { 1.0 } else { -1.0 };
    let mut best = (f64::NEG_INFINITY, vec![], vec![]);
    for _ in 0..ROUNDINGS {
        let g: Vec<f64> = (0..rank).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x: Vec<f64> = u.iter().map(|ui| sign(dot(ui, &g))).collect();
        let y: Vec<f64> = v.iter().map(|vj| sign(dot(vj, &g))).collect();
        let mut value = 0.0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                value += xi * a[(i, j)] * yj;
            }
        }
        if value > best.0 {
            best = (value, x, y);
        }
    }
    best
}

/// Vector relaxation of the `inf->1` norm by restarted low-rank ascent.
///
/// Restart `k` uses seed `seed + k`; the best restart wins, ties going to
/// the lower index. Non-convergence is reported through the flag.
pub fn grothendieck_value(a: &DMatrix<f64>, seed: u64, restarts: usize) -> SdpSolution {
    let rank = relaxation_rank(a.nrows(), a.ncols());
    let restarts = restarts.max(1);
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|k| ascend(a, rank, seed.wrapping_add(k as u64)))
        .collect();
    let best_index = (0..runs.len())
        .max_by(|&i, &j| runs[i].value.total_cmp(&runs[j].value).then(j.cmp(&i)))
        .expect("at least one restart");
    let converged = runs.iter().all(|r| r.converged);
    let sweeps = runs.iter().map(|r| r.sweeps).sum();
    let best = runs.into_iter().nth(best_index).expect("index in range");
    let (rounding_value, rounding_x, rounding_y) = round(a, &best.u, &best.v, seed);
    SdpSolution {
        value: bilinear_value(a, &best.u, &best.v),
        u: best.u,
        v: best.v,
        rank,
        converged,
        restarts_used: restarts,
        sweeps,
        rounding_value: rounding_value.max(0.0),
        rounding_x,
        rounding_y,
        seed,
    }
}
