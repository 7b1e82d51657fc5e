//! Exact rational and quadratic-field arithmetic with dense matrices.

mod linsolve;
mod matrix;
mod scalar;

pub(crate) use linsolve::sparse_vec;
pub use linsolve::{
    row_basis, solve_affine, solve_unique, AffineSolution, Elimination, LinearEquation, SparseVec,
};
pub use matrix::{
    berkowitz, charpoly, det, diagonal_blocks, ldl_psd, mat_inner, psd_check, ExactMatrix, Matrix,
    PsdField, RationalMatrix,
};
pub use scalar::{
    denominator_lcm, int, parse_rational, rat, rational_sqrt, rational_string, rational_to_f64,
    rational_vec, ExactScalar, Field, OrderedField, Rational, Ring,
};
