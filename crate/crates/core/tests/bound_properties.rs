use proptest::prelude::*;

use tripoint::bounds::{
    build_dual_program, primal_restricted, two_point_bound, verify_two_point, Certificate,
    DualProgram,
};
use tripoint::certify::verify_certificate;
use tripoint::codes::{builtin, catalog_instances, energy, orthogonal_lines, Convention, Space};
use tripoint::exact_arith::{int, rat, rational_to_f64, ExactScalar, Rational};
use tripoint::polynomials::UniPoly;
use tripoint::solver::{
    export_sdpa, import_sdpa, parameterize, round_certificate, solve_lmi, solve_numeric,
    IpmSettings, SolveMode, SolveOptions,
};

// three orthogonal lines with f(s) = s and an explicit sharp certificate
fn hand() -> (DualProgram, Certificate) {
    let code = orthogonal_lines(3, 3).unwrap();
    let f = UniPoly::from_ints(&[0, 1]);
    let prog = build_dual_program(3, 3, Space::Projective, &f, &[2, 1], 2, Some(&code)).unwrap();
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

fn h_value(prog: &DualProgram, cert: &Certificate, p: [f64; 3]) -> f64 {
    let mut h = rational_to_f64(&cert.c);
    for (kern, f) in prog.kernels().unwrap().iter().zip(&cert.f) {
        let vals = kern.eval_f64(p);
        for (v, w) in vals.iter().zip(f.data()) {
            h += v * rational_to_f64(w);
        }
    }
    h
}

fn projective_lines_in_rp2() -> Vec<(String, usize)> {
    catalog_instances()
        .into_iter()
        .filter_map(|n| {
            let c = builtin(&n).ok()?;
            (c.space == Space::Projective && c.n == 3).then(|| (n, c.len()))
        })
        .collect()
}

#[test]
fn hand_certificate_respects_weak_duality() {
    let (prog, cert) = hand();
    let rep = verify_certificate(&cert, &prog, &int(0)).unwrap();
    assert!(rep.identity_ok && rep.all_psd());
    let code = orthogonal_lines(3, 3).unwrap();
    let e = energy(&code, &prog.f0, Convention::Hat).unwrap();
    assert!(ExactScalar::rational(cert.bound(3)) <= e);

    let support = vec![[0, 0, 0].map(ExactScalar::from_int)];
    let primal = primal_restricted(
        3,
        3,
        Space::Projective,
        &prog.f0,
        &support,
        &prog.blocks,
        128,
    )
    .unwrap();
    assert!(primal.value_f64() >= rational_to_f64(&cert.bound(3)) - 1e-12);
}

#[test]
fn programs_are_deterministic() {
    let code = builtin("cube4").unwrap();
    let f = UniPoly::from_ints(&[0, 0, 1]);
    let a = build_dual_program(4, 3, Space::Projective, &f, &[3, 2, 2], 4, Some(&code)).unwrap();
    let b = build_dual_program(4, 3, Space::Projective, &f, &[3, 2, 2], 4, Some(&code)).unwrap();
    let ja = a.to_json().unwrap();
    assert_eq!(ja, b.to_json().unwrap());
    assert_eq!(DualProgram::from_json(&ja).unwrap().to_json().unwrap(), ja);
}

#[test]
fn sdpa_round_trip_keeps_the_optimum() {
    let f = UniPoly::from_ints(&[0, 0, 1]);
    let prog = build_dual_program(4, 3, Space::Projective, &f, &[3, 2, 2], 4, None).unwrap();
    let param = parameterize(&prog).unwrap();
    let direct = solve_numeric(
        &prog,
        &param,
        &SolveOptions {
            precision_bits: 53,
            mode: Some(SolveMode::Objective),
            ..SolveOptions::default()
        },
    )
    .unwrap();
    let p = import_sdpa(&export_sdpa(&prog, &param).unwrap()).unwrap();
    let res = solve_lmi(&p.to_lmi::<f64>(53), &IpmSettings::default());
    // the file drops the constant part of the objective
    let zero = vec![int(0); param.dimension()];
    let offset = rational_to_f64(&prog.objective.value(&param.evaluate(&zero).unwrap()));
    let via_file = offset + res.dual_objective;
    assert!(
        (via_file - direct.objective_f64()).abs() < 1e-5,
        "{via_file} vs {}",
        direct.objective_f64()
    );
    let code = builtin("cube4").unwrap();
    let e = energy(&code, &f, Convention::Hat).unwrap();
    let e = rational_to_f64(e.as_rational().unwrap());
    assert!(direct.objective_f64() <= e + 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn two_point_bounds_stay_below_catalog_energies(j in 1usize..=4) {
        let f = UniPoly::monomial(j, int(1));
        for (name, n_points) in projective_lines_in_rp2() {
            let cert = two_point_bound(n_points, 3, &f, 6).unwrap();
            prop_assert!(verify_two_point(&cert));
            let e = energy(&builtin(&name).unwrap(), &f, Convention::Hat).unwrap();
            prop_assert!(ExactScalar::rational(cert.bound.clone()) <= e, "{}", name);
        }
    }

    #[test]
    fn sos_identity_bounds_h_by_the_potential(
        s in prop::collection::vec((-1000i32..=1000, -1000i32..=1000, -1000i32..=1000), 625)
    ) {
        let (prog, cert) = hand();
        for (a, b, c) in s {
            let p = [a as f64 / 1000.0, b as f64 / 1000.0, c as f64 / 1000.0];
            let det = 1.0 + 2.0 * p[0] * p[1] * p[2] - p[0] * p[0] - p[1] * p[1] - p[2] * p[2];
            if det < 0.0 {
                continue;
            }
            let avg = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / 3.0;
            prop_assert!(h_value(&prog, &cert, p) <= avg + 1e-12);
        }
    }

    #[test]
    fn rounded_certificates_satisfy_the_equations(
        lambda in prop::collection::vec(-1000i64..=1000, 64),
        digits in 1u32..=12,
    ) {
        let (prog, _) = hand();
        let param = parameterize(&prog).unwrap();
        let l: Vec<Rational> = (0..param.dimension())
            .map(|i| rat(lambda[i % lambda.len()], 997))
            .collect();
        let rc = round_certificate(&prog, &param, &l, digits).unwrap();
        for e in &prog.equations {
            prop_assert_eq!(e.residual(&rc.values), int(0), "{}", e.label);
        }
    }
}
