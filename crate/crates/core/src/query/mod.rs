//! Phase-oracle query algorithms: simulation, dilation, compilation from
//! factorizations and tensor extraction.

mod algorithm;
mod compile;
mod dilation;
mod extract;

pub use algorithm::{
    diagonal_observable, run_algorithm, ExpectationTable, PhaseOracle, QueryAlgorithm, Run,
    HERMITIAN_TOL, IMAGINARY_TOL, OBSERVABLE_SLACK, UNITARY_TOL,
};
pub use compile::{
    algorithm_of_factorization, factorization_of_algorithm, one_query_from_quadratic, OneQuery,
};
pub use dilation::{complete_to_unitary, dilate_contraction, UNIT_VECTOR_TOL};
pub use extract::{position_of_variable, tensor_of_algorithm, MAX_EXTRACT_BITS, MAX_EXTRACT_ORDER};
