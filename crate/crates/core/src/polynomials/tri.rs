use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::UniPoly;
use crate::exact_arith::{int, parse_rational, rational_to_f64, Field, Rational, Ring};

/// Exponent triple of `u^i v^j t^k`.
pub type Exponent = (u32, u32, u32);

/// All permutations of three slots.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Sparse polynomial in `u, v, t` with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TriPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl TriPoly {
    pub fn zero() -> Self {
        TriPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = TriPoly::zero();
        p.add_term((0, 0, 0), c);
        p
    }

    /// Variable number `i` (0 = u, 1 = v, 2 = t).
    pub fn var(i: usize) -> Self {
        let mut e = [0u32; 3];
        e[i] = 1;
        let mut p = TriPoly::zero();
        p.add_term((e[0], e[1], e[2]), int(1));
        p
    }

    pub fn monomial(e: Exponent, c: Rational) -> Self {
        let mut p = TriPoly::zero();
        p.add_term(e, c);
        p
    }

    /// `f(x_i)` for a univariate polynomial and variable slot `i`.
    pub fn from_uni(f: &UniPoly, i: usize) -> Self {
        let mut p = TriPoly::zero();
        for (d, c) in f.coeffs().iter().enumerate() {
            let mut e = [0u32; 3];
            e[i] = d as u32;
            p.add_term((e[0], e[1], e[2]), c.clone());
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: Exponent) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b, c)| a + b + c).max()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return TriPoly::zero();
        }
        TriPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = TriPoly::constant(int(1));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Relabels variables: slot `i` of the result holds exponent of slot `perm[i]`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let mut p = TriPoly::zero();
        for (e, c) in &self.terms {
            let a = [e.0, e.1, e.2];
            p.add_term((a[perm[0]], a[perm[1]], a[perm[2]]), c.clone());
        }
        p
    }

    /// Average over all permutations of `(u, v, t)`.
    pub fn symmetrize(&self) -> Self {
        let mut acc = TriPoly::zero();
        for perm in PERMUTATIONS {
            acc = &acc + &self.permute(perm);
        }
        acc.scale(&Rational::new(1.into(), 6.into()))
    }

    pub fn is_symmetric(&self) -> bool {
        PERMUTATIONS.iter().all(|p| &self.permute(*p) == self)
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut p = TriPoly::zero();
        for (e, c) in &self.terms {
            let mut a = [e.0, e.1, e.2];
            if a[var] == 0 {
                continue;
            }
            let m = int(a[var] as i64);
            a[var] -= 1;
            p.add_term((a[0], a[1], a[2]), c * m);
        }
        p
    }

    /// Substitutes polynomials for the three variables.
    pub fn substitute(&self, subs: &[TriPoly; 3]) -> Self {
        let mut powers: [Vec<TriPoly>; 3] = Default::default();
        for (v, pw) in powers.iter_mut().enumerate() {
            let maxd = self
                .terms
                .keys()
                .map(|e| [e.0, e.1, e.2][v])
                .max()
                .unwrap_or(0);
            pw.push(TriPoly::constant(int(1)));
            for d in 1..=maxd as usize {
                let next = &pw[d - 1] * &subs[v];
                pw.push(next);
            }
        }
        let mut acc = TriPoly::zero();
        for (e, c) in &self.terms {
            let m =
                &(&powers[0][e.0 as usize] * &powers[1][e.1 as usize]) * &powers[2][e.2 as usize];
            for (f, d) in m.terms {
                acc.add_term(f, c * d);
            }
        }
        acc
    }

    /// Exact evaluation in any field containing the rationals.
    pub fn eval<T: Field>(&self, p: [&T; 3]) -> T {
        let mut pw: [Vec<T>; 3] = Default::default();
        for v in 0..3 {
            let maxd = self
                .terms
                .keys()
                .map(|e| [e.0, e.1, e.2][v])
                .max()
                .unwrap_or(0);
            pw[v].push(T::one());
            for d in 1..=maxd as usize {
                let next = pw[v][d - 1].clone() * p[v];
                pw[v].push(next);
            }
        }
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let term = T::from_rational(c)
                * &pw[0][e.0 as usize]
                * &pw[1][e.1 as usize]
                * &pw[2][e.2 as usize];
            acc = acc + &term;
        }
        acc
    }

    pub fn eval_f64(&self, p: [f64; 3]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                rational_to_f64(c)
                    * p[0].powi(e.0 as i32)
                    * p[1].powi(e.1 as i32)
                    * p[2].powi(e.2 as i32)
            })
            .sum()
    }

    /// Sum of all coefficients scaled term by term with `f`.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Exponent, &Rational) -> Rational) -> Self {
        let mut p = TriPoly::zero();
        for (e, c) in &self.terms {
            p.add_term(*e, f(e, c));
        }
        p
    }
}

impl<'a> Add<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn add(self, o: &TriPoly) -> TriPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn sub(self, o: &TriPoly) -> TriPoly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, -c.clone());
        }
        p
    }
}

impl<'a> Mul<&'a TriPoly> for &'a TriPoly {
    type Output = TriPoly;
    fn mul(self, o: &TriPoly) -> TriPoly {
        let mut p = TriPoly::zero();
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                p.add_term((e.0 + f.0, e.1 + f.1, e.2 + f.2), c * d);
            }
        }
        p
    }
}

impl Neg for &TriPoly {
    type Output = TriPoly;
    fn neg(self) -> TriPoly {
        self.scale(&int(-1))
    }
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b, c), k)| {
                let mut s = format!("({k})");
                for (name, d) in [("u", a), ("v", b), ("t", c)] {
                    match d {
                        0 => {}
                        1 => s.push_str(&format!("*{name}")),
                        _ => s.push_str(&format!("*{name}^{d}")),
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Serialized as a list of `(i, j, k, "p/q")` quadruples.
impl Serialize for TriPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(u32, u32, u32, String)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.0, e.1, e.2, c.to_string()))
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<(u32, u32, u32, String)>::deserialize(d)?;
        let mut p = TriPoly::zero();
        for (a, b, c, s) in v {
            let r = parse_rational(&s).map_err(serde::de::Error::custom)?;
            p.add_term((a, b, c), r);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    fn u() -> TriPoly {
        TriPoly::var(0)
    }
    fn v() -> TriPoly {
        TriPoly::var(1)
    }
    fn t() -> TriPoly {
        TriPoly::var(2)
    }

    #[test]
    fn symmetrize_examples() {
        let third = rat(1, 3);
        let s = u().symmetrize();
        assert_eq!(s, (&(&u() + &v()) + &t()).scale(&third));
        let uvt = &(&u() * &v()) * &t();
        assert_eq!(uvt.symmetrize(), uvt);
        let p = &t() - &(&u() * &v());
        let expect =
            &(&(&u() + &v()) + &t()) - &(&(&(&u() * &v()) + &(&u() * &t())) + &(&v() * &t()));
        assert_eq!(p.symmetrize(), expect.scale(&third));
    }

    #[test]
    fn substitution_and_eval() {
        let p = &(&u() * &v()) + &t().pow(2);
        let q = p.substitute(&[u(), u(), TriPoly::constant(int(1))]);
        assert_eq!(q, &u().pow(2) + &TriPoly::constant(int(1)));
        assert_eq!(p.eval([&int(2), &int(3), &int(4)]), int(22));
        assert_eq!(p.partial(0), v());
    }

    #[test]
    fn serde_quadruples() {
        let p = &u().scale(&rat(1, 2)) + &t();
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"[[0,0,1,"1"],[1,0,0,"1/2"]]"#);
        let back: TriPoly = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
    }
}
