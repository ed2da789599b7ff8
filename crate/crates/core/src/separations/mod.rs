//! Random cubic forms whose cb norm exceeds their sup norm, and the quartic
//! obstruction built from them.

mod cubic;
mod quartic;

pub use cubic::{
    basis, certify_separation, max_slice_norm, random_cubic_form, slice_norm_exceedance, slices,
    witness_contractions, SeparationReport, DEFAULT_TAU, SCHEMA,
};
pub use quartic::{
    quartic_constant_bound, quartic_embedding, QuarticBound, QuarticEmbedding, BOUND_SLACK,
    MATCH_TOL,
};
