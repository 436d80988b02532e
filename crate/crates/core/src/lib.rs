//! Exact finite-field tooling for noncommutative algebraic branching programs
//! with help polynomials: evaluation and homogenization, communication-matrix
//! decompositions, rank-metric remote point solvers, and generation of
//! explicit hard polynomials with checkable rank-distance certificates.

pub mod abp;
pub mod cutmatrix;
pub mod error;
pub mod format;
pub mod hardgen;
pub mod rmp;
pub mod linalg;
pub mod ncpoly;

pub use error::{Error, Result};
