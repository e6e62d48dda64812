//! Exact Gaussian-rational linear algebra, quadratic surds and floating
//! spectral helpers.

pub mod elim;
pub mod float;
pub mod rational;
pub mod surd;
pub mod vector;

pub use elim::{gram_schmidt, rank, rank_and_membership, same_span, RowSpace};
pub use float::{
    approx_to_digits, approx_to_dyadic, hermitian_eigen, hermitian_eigenvalues, op_norm, pure_trace_distance,
    shannon_entropy, trace_distance, trace_distance_exact, von_neumann_entropy, FMat, FVec,
};
pub use rational::{format_rational, parse_rational, rat, rat_from_f64, rat_int, rat_to_f64, CRat, Rational};
pub use surd::Surd;
pub use vector::{CMat, CVec, ScaledUnitVector, SurdVec};
