use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact_arith::{int, Field, Rational};

/// Dense univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly<T: Field = Rational> {
    coeffs: Vec<T>,
}

impl<T: Field> UniPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn monomial(deg: usize, c: T) -> Self {
        let mut v = vec![T::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    /// `t - r`.
    pub fn linear_root(r: &T) -> Self {
        Self::new(vec![-r.clone(), T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * &T::from_i64(i as i64))
                .collect(),
        )
    }

    /// `j`-th derivative divided by `j!`, evaluated at `x`.
    pub fn taylor_coeff(&self, j: usize, x: &T) -> T {
        // sum_i binom(i, j) c_i x^(i-j)
        let mut acc = T::zero();
        let mut xp = T::one();
        for i in j..self.coeffs.len() {
            let b = T::from_rational(&binomial(i, j));
            acc = acc + &(self.coeffs[i].clone() * &b * &xp);
            xp = xp * x;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `self(g(t))`.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Self::constant(c.clone());
        }
        acc
    }

    /// Product of `(t - r)` over the given roots.
    pub fn from_roots<'a, I: IntoIterator<Item = &'a T>>(roots: I) -> Self {
        let mut acc = Self::constant(T::one());
        for r in roots {
            acc = &acc * &Self::linear_root(r);
        }
        acc
    }

    /// Euclidean division by a nonzero divisor.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::InvalidArgument("division by zero polynomial".into()))?;
        let lead_inv = d.coeffs[dd].inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![T::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let f = r[top].clone() * &lead_inv;
            let shift = top - dd;
            for (i, c) in d.coeffs.iter().enumerate() {
                r[shift + i] = r[shift + i].clone() - &(f.clone() * c);
            }
            q[shift] = f;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn map<U: Field>(&self, f: impl FnMut(&T) -> U) -> UniPoly<U> {
        UniPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl UniPoly<Rational> {
    /// Lifts rational coefficients into another field.
    pub fn lift<U: Field>(&self) -> UniPoly<U> {
        self.map(U::from_rational)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::exact_arith::rational_to_f64(c);
        }
        acc
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }
}

pub fn binomial(n: usize, k: usize) -> Rational {
    if k > n {
        return int(0);
    }
    let mut acc = num_bigint::BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Rational::from_integer(acc)
}

impl<'a, T: Field> Add<&'a UniPoly<T>> for &'a UniPoly<T> {
    type Output = UniPoly<T>;
    fn add(self, o: &UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl<'a, T: Field> Sub<&'a UniPoly<T>> for &'a UniPoly<T> {
    type Output = UniPoly<T>;
    fn sub(self, o: &UniPoly<T>) -> UniPoly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl<'a, T: Field> Mul<&'a UniPoly<T>> for &'a UniPoly<T> {
    type Output = UniPoly<T>;
    fn mul(self, o: &UniPoly<T>) -> UniPoly<T> {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + &(a.clone() * b);
            }
        }
        UniPoly::new(v)
    }
}

impl<T: Field> Neg for &UniPoly<T> {
    type Output = UniPoly<T>;
    fn neg(self) -> UniPoly<T> {
        UniPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Field + fmt::Display> fmt::Display for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Field + fmt::Display> fmt::Debug for UniPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for UniPoly<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::exact_arith::rational_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for UniPoly<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::exact_arith::rational_vec::deserialize(d).map(UniPoly::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn arithmetic_and_eval() {
        let p = UniPoly::from_ints(&[1, 2, 3]);
        let q = UniPoly::from_ints(&[0, 1]);
        assert_eq!(
            (&p * &q).coeffs(),
            UniPoly::from_ints(&[0, 1, 2, 3]).coeffs()
        );
        assert_eq!(p.eval(&rat(1, 2)), rat(11, 4));
        assert_eq!(p.derivative(), UniPoly::from_ints(&[2, 6]));
        assert_eq!((&p - &p).degree(), None);
        assert_eq!(p.taylor_coeff(1, &int(1)), int(8));
        assert_eq!(p.taylor_coeff(2, &int(5)), int(3));
    }

    #[test]
    fn composition_and_division() {
        let p = UniPoly::from_ints(&[0, 0, 1]);
        let g = UniPoly::from_ints(&[1, 1]);
        assert_eq!(p.compose(&g), UniPoly::from_ints(&[1, 2, 1]));
        let (qq, r) = UniPoly::from_ints(&[-1, 0, 1]).div_rem(&g).unwrap();
        assert_eq!(qq, UniPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
    }
}
