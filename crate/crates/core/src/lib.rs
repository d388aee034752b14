//! Finite covers of Salvetti complexes of right-angled Artin groups, the
//! cube complexes of right-angled Coxeter groups, and exact homology over
//! `Q` and `F_p`.

pub mod chain;
pub mod complex;
pub mod davis;
pub mod library;
pub mod linalg;
pub mod nerve;
pub mod report;
pub mod salvetti;

pub use complex::{ComplexError, FVector, SimplicialComplex};
pub use linalg::{Field, PrimeField, SparseIntMatrix};
pub use salvetti::{BettiTable, CoverSpec, RunOptions};
