use num_traits::{One, Signed, Zero};

use super::UniPoly;
use crate::exact_arith::Rational;

fn monic(p: &UniPoly) -> UniPoly {
    match p.degree() {
        Some(d) => p.scale(&(Rational::one() / p.coeff(d))),
        None => p.clone(),
    }
}

/// Monic greatest common divisor.
pub fn poly_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b).expect("nonzero divisor");
        a = b;
        b = monic(&r);
    }
    monic(&a)
}

fn exact_div(a: &UniPoly, b: &UniPoly) -> UniPoly {
    a.div_rem(b).expect("nonzero divisor").0
}

/// Product of the square-free factors of odd multiplicity (Yun's algorithm).
pub fn odd_multiplicity_part(p: &UniPoly) -> UniPoly {
    if p.degree().unwrap_or(0) == 0 {
        return UniPoly::constant(Rational::one());
    }
    let dp = p.derivative();
    let a0 = poly_gcd(p, &dp);
    let mut b = exact_div(p, &a0);
    let c = exact_div(&dp, &a0);
    let mut d = &c - &b.derivative();
    let mut out = UniPoly::constant(Rational::one());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let h = poly_gcd(&b, &d);
        if i % 2 == 1 {
            out = &out * &h;
        }
        let nb = exact_div(&b, &h);
        let nc = exact_div(&d, &h);
        d = &nc - &nb.derivative();
        b = nb;
        i += 1;
    }
    monic(&out)
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Number of distinct real roots of a square-free `p` in `(a, b]`.
pub fn sturm_count(p: &UniPoly, a: &Rational, b: &Rational) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).expect("nonzero");
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
}

/// Exact test that `p >= 0` on `[a, b]` (`a < b`).
pub fn nonnegative_on(p: &UniPoly, a: &Rational, b: &Rational) -> bool {
    if p.is_zero() {
        return true;
    }
    let odd = odd_multiplicity_part(p);
    let mut crossings = sturm_count(&odd, a, b);
    if odd.degree().unwrap_or(0) > 0 && odd.eval(b).is_zero() {
        crossings -= 1;
    }
    if crossings > 0 {
        return false;
    }
    // the sign is constant on (a, b) away from zeros; find a non-root sample
    let width = b - a;
    for k in 2..(p.degree().unwrap_or(0) as i64 + 4) {
        let x = a + &width * Rational::new(1.into(), k.into());
        let v = p.eval(&x);
        if !v.is_zero() {
            return v.is_positive();
        }
    }
    unreachable!("a nonzero polynomial has finitely many roots")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat};

    fn poly(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn gcd_and_odd_part() {
        // (x-1)^2 (x-2)
        let p = &(&poly(&[-1, 1]) * &poly(&[-1, 1])) * &poly(&[-2, 1]);
        assert_eq!(poly_gcd(&p, &p.derivative()), poly(&[-1, 1]));
        assert_eq!(odd_multiplicity_part(&p), poly(&[-2, 1]));
    }

    #[test]
    fn sturm() {
        let p = poly(&[-2, 0, 1]); // roots ±√2
        assert_eq!(sturm_count(&p, &int(0), &int(2)), 1);
        assert_eq!(sturm_count(&p, &int(-2), &int(2)), 2);
        assert_eq!(sturm_count(&p, &int(2), &int(3)), 0);
    }

    #[test]
    fn nonnegativity() {
        // (3x - 1)^2 touches zero inside
        let sq = poly(&[1, -6, 9]);
        assert!(nonnegative_on(&sq, &int(0), &int(1)));
        let lin = poly(&[-1, 3]);
        assert!(!nonnegative_on(&lin, &int(0), &int(1)));
        assert!(nonnegative_on(&lin, &rat(1, 3), &int(1)));
        assert!(nonnegative_on(&poly(&[0, 1, -1]), &int(0), &int(1)));
        assert!(!nonnegative_on(&poly(&[0, 1, -1]), &int(0), &int(2)));
    }
}
