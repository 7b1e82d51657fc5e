use proptest::prelude::*;

use tripoint::codes::builtin;
use tripoint::exact_arith::{int, rat, ExactScalar, Rational};
use tripoint::orthoplex::{lift_unnormalized, lifted_inner, transform_row_sums};
use tripoint::polynomials::gegenbauer;

// inverse stereographic projection of a rational point of R^{n-1}
fn unit_vector(y: &[Rational]) -> Vec<ExactScalar> {
    let s: Rational = y.iter().map(|a| a * a).sum();
    let d = &s + int(1);
    y.iter()
        .map(|a| int(2) * a / &d)
        .chain(std::iter::once((&s - int(1)) / &d))
        .map(ExactScalar::rational)
        .collect()
}

fn point(n: usize) -> impl Strategy<Value = Vec<ExactScalar>> {
    prop::collection::vec((-6i64..=6, 1i64..=4), n - 1)
        .prop_map(|v| unit_vector(&v.into_iter().map(|(p, q)| rat(p, q)).collect::<Vec<_>>()))
}

fn dot(x: &[ExactScalar], y: &[ExactScalar]) -> ExactScalar {
    x.iter()
        .zip(y)
        .fold(ExactScalar::from_int(0), |acc, (a, b)| {
            acc + &(a.clone() * b)
        })
}

fn pair() -> impl Strategy<Value = (Vec<ExactScalar>, Vec<ExactScalar>)> {
    (3usize..=5).prop_flat_map(|n| (point(n), point(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_inner_products_follow_p2((x, y) in pair()) {
        let n = x.len();
        let p2 = gegenbauer(n, 2).unwrap();
        let ip = dot(&x, &y);
        let expect = p2.lift::<ExactScalar>().eval(&ip);
        prop_assert_eq!(lifted_inner(&x, &y).unwrap(), expect);
    }

    #[test]
    fn lifts_of_unit_vectors_are_unit((x, _) in pair()) {
        prop_assert_eq!(lifted_inner(&x, &x).unwrap(), ExactScalar::from_int(1));
        // the tensor image has squared norm 1 - 1/n before normalization
        let n = x.len() as i64;
        let v = lift_unnormalized(&x);
        prop_assert_eq!(dot(&v, &v), ExactScalar::rational(int(1) - rat(1, n)));
    }
}

#[test]
fn design_row_sums_vanish() {
    let sums = transform_row_sums(&builtin("rhombic7").unwrap()).unwrap();
    assert_eq!(sums.len(), 7);
    assert!(sums.iter().all(|s| *s == ExactScalar::from_int(0)));
}
