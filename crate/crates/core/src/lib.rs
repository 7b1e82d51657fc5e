//! Two- and three-point semidefinite programming bounds for the energy of
//! spherical and projective codes, with exact certificate verification.

pub mod bounds;
pub mod certify;
pub mod codes;
pub mod error;
pub mod exact_arith;
pub mod kernels;
pub mod orthoplex;
pub mod parallel;
pub mod polynomials;
pub mod solver;

pub use error::{Error, Result};
