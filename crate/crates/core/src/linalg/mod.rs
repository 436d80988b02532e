//! Exact linear algebra over small prime fields.
//!
//! Everything here is dense and row-major. Subspaces are stored in reduced
//! row-echelon form so that equal subspaces compare equal structurally.

mod field;
mod matrix;
mod subspace;

pub use field::{is_prime, Field, MAX_MODULUS};
pub use matrix::{AffineSolution, Mat, Rref, Vector};
pub use subspace::Subspace;
