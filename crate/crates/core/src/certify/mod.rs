//! Exact certificate verification, equality sets, uniqueness counts and the
//! universal optimality pipeline.

mod pipeline;
mod uniqueness;
mod verify;

pub use pipeline::{
    certify_potential, universal_optimality_pipeline, Method, PipelineOptions, PipelineReport,
    PotentialReport,
};
pub use uniqueness::{equality_set, uniqueness_counts};
pub use verify::{verify_certificate, BlockResult, VerificationReport};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{build_dual_program, DualProgram};
    use crate::codes::{orthogonal_lines, Space};
    use crate::error::Error;
    use crate::exact_arith::{int, rat, ExactScalar, Matrix, Rational};
    use crate::polynomials::UniPoly;
    use crate::solver::{parameterize, round_certificate, solve_numeric, SolveOptions};

    // three orthogonal lines with f(s) = s: the energy is 0 and
    // (u^2 + v^2 + t^2) / 3 is its own sum of squares
    fn setup() -> (DualProgram, crate::bounds::Certificate) {
        let code = orthogonal_lines(3, 3).unwrap();
        let f = UniPoly::from_ints(&[0, 1]);
        let prog =
            build_dual_program(3, 3, Space::Projective, &f, &[2, 1], 2, Some(&code)).unwrap();
        let mut x = vec![int(0); prog.num_unknowns];
        let m = prog.sos_matrix();
        for (a, e) in prog.monomials.iter().enumerate() {
            if [(1, 0, 0), (0, 1, 0), (0, 0, 1)].contains(e) {
                x[m.entry(a, a).unwrap()] = rat(1, 3);
            }
        }
        let cert = prog.assemble(&x).unwrap();
        (prog, cert)
    }

    #[test]
    fn hand_certificate_is_sharp() {
        let (prog, cert) = setup();
        let rep = verify_certificate(&cert, &prog, &int(0)).unwrap();
        assert!(rep.sharp, "{rep}");
        assert!(rep.slackness_ok && rep.tangency_ok);
        assert_eq!(rep.psd_results.len(), 3);
    }

    #[test]
    fn wrong_target_is_not_sharp() {
        let (prog, cert) = setup();
        let rep = verify_certificate(&cert, &prog, &int(1)).unwrap();
        assert!(rep.identity_ok);
        assert!(!rep.sharp);
    }

    #[test]
    fn zero_certificate_fails_identity() {
        let (prog, mut cert) = setup();
        cert.m = Matrix::zeros(cert.m.rows(), cert.m.cols());
        let rep = verify_certificate(&cert, &prog, &int(0)).unwrap();
        assert!(!rep.identity_ok);
        assert!(!rep.identity_coefficients_ok && !rep.identity_direct_ok);
        assert!(!rep.sharp);
    }

    #[test]
    fn tiny_perturbation_is_caught() {
        let (prog, mut cert) = setup();
        let eps = Rational::new(1.into(), 1_000_000_000.into());
        let v = cert.f[0].get(0, 0).clone() + &eps;
        cert.f[0].set(0, 0, v);
        let rep = verify_certificate(&cert, &prog, &int(0)).unwrap();
        assert!(!rep.identity_ok);
        assert!(!rep.identity_direct_ok);
        assert!(!rep.sharp);
    }

    #[test]
    fn asymmetric_sos_entry_is_reported() {
        let (prog, mut cert) = setup();
        let a = prog.monomials.iter().position(|e| *e == (1, 0, 0)).unwrap();
        let b = prog.monomials.iter().position(|e| *e == (0, 1, 0)).unwrap();
        cert.m.set(a, b, rat(1, 7));
        let rep = verify_certificate(&cert, &prog, &int(0)).unwrap();
        assert!(!rep.sharp);
        assert!(!rep.psd_results.iter().find(|r| r.label == "M").unwrap().psd);
        assert!(!rep.log.is_empty());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let (prog, mut cert) = setup();
        cert.f.pop();
        assert!(matches!(
            verify_certificate(&cert, &prog, &int(0)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn numeric_pipeline_on_small_program() {
        let (prog, _) = setup();
        let param = parameterize(&prog).unwrap();
        let sol = solve_numeric(
            &prog,
            &param,
            &SolveOptions {
                precision_bits: 53,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let rc = round_certificate(&prog, &param, &sol.lambda_rationals().unwrap(), 9).unwrap();
        let rep = verify_certificate(&rc.certificate, &prog, &int(0)).unwrap();
        assert!(rep.sharp, "{rep}");
    }

    #[test]
    fn equality_set_small() {
        let (prog, cert) = setup();
        let f = UniPoly::from_ints(&[0, 1]);
        let zero = ExactScalar::from_int(0);
        let set = equality_set(&cert, &prog, &f, std::slice::from_ref(&zero)).unwrap();
        assert_eq!(set, vec![[zero.clone(), zero.clone(), zero.clone()]]);
        assert!(equality_set(&cert, &prog, &f, &[]).unwrap().is_empty());
        let third = ExactScalar::rational(rat(1, 3));
        let set = equality_set(&cert, &prog, &f, &[zero, third]).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn counts_need_slackness() {
        let (prog, cert) = setup();
        let zero = ExactScalar::from_int(0);
        let z = [zero.clone(), zero.clone(), zero];
        let half = ExactScalar::rational(rat(1, 2));
        let other = [half.clone(), half.clone(), half];
        // F = 0 leaves only the total
        assert!(matches!(
            uniqueness_counts(&cert, &prog, &[z.clone(), other], 3),
            Err(Error::Underdetermined(_))
        ));
        assert_eq!(
            uniqueness_counts(&cert, &prog, &[z], 3).unwrap(),
            vec![int(6)]
        );
    }
}
