use proptest::prelude::*;

use tripoint::exact_arith::{int, rat, ExactScalar, Rational};
use tripoint::polynomials::{
    hermite_interpolate, interpolation_gap, newton_coefficients, reduction_multiset, symmetrize,
    Multiset, TriPoly, UniPoly,
};

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=60).prop_flat_map(|q| (0..q).prop_map(move |p| rat(p, q)))
}

fn multiset() -> impl Strategy<Value = Multiset<Rational>> {
    prop::collection::vec((unit_rational(), 1usize..=3), 1..5)
        .prop_map(|v| Multiset::new(v).unwrap())
}

// nonzero values doubled, 0 with any multiplicity
fn reduction() -> impl Strategy<Value = Multiset<Rational>> {
    (prop::collection::vec(unit_rational(), 1..5), 1usize..=3).prop_map(|(v, mz)| {
        let values: Vec<ExactScalar> = v.into_iter().map(ExactScalar::rational).collect();
        reduction_multiset(&values, mz)
            .unwrap()
            .to_rational()
            .unwrap()
    })
}

fn tri_poly() -> impl Strategy<Value = TriPoly> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..4), -5i64..=5), 0..6).prop_map(|terms| {
        let mut p = TriPoly::zero();
        for (e, c) in terms {
            p.add_term(e, int(c));
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    // absolutely monotone potentials lie above their interpolants on [0, 1)
    #[test]
    fn monomials_dominate_interpolants(ms in reduction(), m in 0usize..=20, x in unit_rational()) {
        let f = UniPoly::monomial(m, int(1));
        prop_assert!(interpolation_gap(&ms, &f, &x).unwrap() >= int(0));
    }

    #[test]
    fn interpolants_have_nonnegative_newton_coefficients(ms in multiset(), m in 0usize..=20) {
        let f = UniPoly::monomial(m, int(1));
        let nodes = ms.expanded();
        let h = hermite_interpolate(&ms, &f).unwrap();
        for c in newton_coefficients(&nodes, &h) {
            prop_assert!(c >= int(0));
        }
    }

    #[test]
    fn interpolation_is_a_projection(ms in multiset(), c in prop::collection::vec(-5i64..=5, 1..12)) {
        let f = UniPoly::from_ints(&c);
        let h = hermite_interpolate(&ms, &f).unwrap();
        prop_assert_eq!(hermite_interpolate(&ms, &h).unwrap(), h);
    }

    #[test]
    fn symmetrize_is_idempotent_and_linear(p in tri_poly(), q in tri_poly(), a in -4i64..=4) {
        let sp = symmetrize(&p);
        prop_assert_eq!(symmetrize(&sp), sp.clone());
        prop_assert!(sp.is_symmetric());
        let lhs = symmetrize(&(&p.scale(&int(a)) + &q));
        let rhs = &sp.scale(&int(a)) + &symmetrize(&q);
        prop_assert_eq!(lhs, rhs);
    }
}
