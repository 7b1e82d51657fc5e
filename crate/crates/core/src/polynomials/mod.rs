//! Univariate and trivariate polynomials, Gegenbauer polynomials and
//! Hermite interpolation.

mod hermite;
mod parse;
mod roots;
mod tri;
mod uni;

pub use hermite::{
    default_mult_zero, gegenbauer, gegenbauer_coefficients, gegenbauer_family, hermite_interpolate,
    interpolation_gap, newton_coefficients, partial_products, reduction_multiset, Multiset,
};
pub use parse::{format_poly, parse_poly};
pub use roots::{nonnegative_on, odd_multiplicity_part, poly_gcd, sturm_count};
pub use tri::{Exponent, TriPoly, PERMUTATIONS};
pub use uni::{binomial, UniPoly};

/// Symmetrization of a trivariate polynomial over the six permutations.
pub fn symmetrize(p: &TriPoly) -> TriPoly {
    p.symmetrize()
}
