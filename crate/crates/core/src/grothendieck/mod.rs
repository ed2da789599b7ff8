//! Vector relaxation of the `inf->1` norm and the diagonal factorization
//! `A = K Diag(u) B Diag(v)` with `||B|| <= ||A||_{inf->1}`.

mod diagonal;
mod sdp;

pub use diagonal::{
    diagonal_factorize, hahn_banach_feasibility_check, DiagonalFactorization, KProbe,
    FEASIBILITY_TOL, ITERATIONS, K_UPPER, WEIGHT_FLOOR,
};
pub use sdp::{bilinear_value, grothendieck_value, relaxation_rank, SdpSolution, DEFAULT_RESTARTS};
