//! Norm oracles and completely bounded norm certificates.

mod factorization;
mod hypercube;
mod operator;
mod witness;

pub use factorization::{
    certify_cb_at_most_one, certify_cbdeg_upper, real_part, CbFactorization, FactorizationCheck,
    UpperCertificate, UNIT_TOL,
};
pub use hypercube::{
    inf_to_one_norm, parity_coefficients, sup_norm_estimate, sup_norm_hypercube,
    sup_norm_quadratic, DEFAULT_ENUMERATION_CAP, HARD_ENUMERATION_LIMIT,
};
pub use operator::operator_norm;
pub use witness::{
    cb_lower_bound, polynomial_in_matrices, CommutationCheck, CommutingFamily, TensorRef,
    WitnessCertificate, CONTRACTION_SLACK, USER_COMMUTATION_TOL,
};
