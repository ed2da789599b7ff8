//! Completely bounded polynomial forms and quantum query algorithms.
//!
//! Degree-`2t` forms whose tensors have completely bounded norm at most one
//! are exactly the acceptance biases of `t`-query quantum algorithms. This
//! crate converts between forms, tensors, factorizations and simulable
//! query circuits, and certifies norm bounds in both directions.

pub mod error;
pub mod grothendieck;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod query;
pub mod random;
pub mod separations;
pub mod signs;
pub mod tensor;

pub use error::{Error, Result};
