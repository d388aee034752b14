//! Exact linear algebra over prime fields and the integers.

pub mod field;
pub mod rank;
pub mod rational;
pub mod snf;
pub mod sparse;

pub use field::{is_prime, Field, FieldError, PrimeField};
pub use rank::{gfp_rank, gfp_rank_with, EliminationParams};
pub use rational::{rational_rank, PrimeSampler};
pub use snf::{smith_normal_form, SnfError};
pub use sparse::{MatrixError, SparseIntMatrix};

/// Rank over the given field; `seed` drives the prime choice for `Q`.
pub fn rank_over(m: &SparseIntMatrix, field: Field, seed: u64) -> usize {
    match field {
        Field::Rational => rational_rank(m, seed),
        Field::Prime(f) => gfp_rank(m, f),
    }
}
