//! Dual three-point programs, two-point bounds and the restricted primal.

mod primal;
mod program;
mod two_point;

pub use primal::{primal_restricted, PrimalResult};
pub(crate) use program::in_domain;
pub use program::{
    bound_value, build_dual_program, build_dual_program_with, potential_average, symmetry_images,
    Certificate, DualProgram, MatrixRole, MatrixVar, Objective, ProgramOptions, PsdBlock,
    SupportTriple,
};
pub use two_point::{
    two_point_bound, two_point_slack, two_point_value, verify_two_point, TwoPointCertificate,
};

use crate::error::{Error, Result};
use crate::exact_arith::{ExactScalar, Rational};
use crate::polynomials::{Exponent, UniPoly};

/// Exponent triples `(i, j, k)` with `i + j + k <= d`, in lexicographic order.
pub fn monomials(d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            for k in 0..=d - i - j {
                out.push((i, j, k));
            }
        }
    }
    out
}

/// Roots `0` (triple), `1/9` and `1/3` (double).
pub fn default_perturbation_roots() -> Vec<(ExactScalar, usize)> {
    vec![
        (ExactScalar::from_int(0), 3),
        (ExactScalar::rational(Rational::new(1.into(), 9.into())), 2),
        (ExactScalar::rational(Rational::new(1.into(), 3.into())), 2),
    ]
}

/// `f - eps * prod (t - r)^m`.
pub fn perturb_potential(
    f: &UniPoly,
    roots: &[(ExactScalar, usize)],
    eps: &Rational,
) -> Result<UniPoly> {
    if eps < &Rational::from_integer(0.into()) {
        return Err(Error::InvalidArgument(format!(
            "perturbation size must be nonnegative, got {eps}"
        )));
    }
    let mut prod: UniPoly<ExactScalar> = UniPoly::constant(ExactScalar::from_int(1));
    for (r, m) in roots {
        prod = &prod * &UniPoly::linear_root(r).pow(*m as u32);
    }
    let mut coeffs = Vec::new();
    for c in prod.coeffs() {
        coeffs.push(c.as_rational().cloned().ok_or_else(|| {
            Error::InvalidArgument("perturbation polynomial must have rational coefficients".into())
        })?);
    }
    let p = UniPoly::new(coeffs).scale(eps);
    Ok(f - &p)
}

/// The default perturbation with `eps = 1/1000`.
pub fn default_perturbation(f: &UniPoly) -> UniPoly {
    perturb_potential(
        f,
        &default_perturbation_roots(),
        &Rational::new(1.into(), 1000.into()),
    )
    .expect("rational roots")
}
