use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for the rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.125` or `1.5e-3`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let m = parse_rational(mant)?;
        let e: i32 = exp
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse rational `{s}`")))?;
        let scale =
            Rational::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        return Ok(if e >= 0 { m * scale } else { m / scale });
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if s.contains('/') {
            return Err(Error::InvalidArgument(format!(
                "cannot parse rational `{s}`"
            )));
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| Error::InvalidArgument(format!("cannot parse rational `{s}`")))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    Rational::from_str(s)
        .map_err(|_| Error::InvalidArgument(format!("cannot parse rational `{s}`")))
}

/// Rational square root when it exists.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 1000;
        let (n, d) = if shift > 0 {
            (r.numer() >> shift as usize, r.denom() >> shift as usize)
        } else {
            (r.numer().clone(), r.denom().clone())
        };
        n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(f64::INFINITY)
    })
}

/// Commutative ring operations used by division-free algorithms.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
}

/// Exact field with a rational prime field embedded.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;
    fn from_i64(v: i64) -> Self {
        Self::from_rational(&int(v))
    }
    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.clone() * &i)
    }
}

/// Exact field with a decidable sign (a real subfield).
pub trait OrderedField: Field {
    /// -1, 0 or 1.
    fn sgn(&self) -> i8;
    fn approx_f64(&self) -> f64;
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for Rational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl OrderedField for Rational {
    fn sgn(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn approx_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// An element `a + b·sqrt(q)` of the real quadratic field `Q(sqrt(q))`.
///
/// `q` is carried by each value; it only matters while `b != 0`. Mixing two
/// irrational values over different `q` panics in the operators; use
/// [`ExactScalar::check_context`] to validate inputs up front.
#[derive(Clone)]
pub struct ExactScalar {
    pub a: Rational,
    pub b: Rational,
    pub q: Rational,
}

impl ExactScalar {
    pub fn rational(a: Rational) -> Self {
        ExactScalar {
            a,
            b: Zero::zero(),
            q: Zero::zero(),
        }
    }

    pub fn new(a: Rational, b: Rational, q: Rational) -> Result<Self> {
        if !Zero::is_zero(&b) && (!q.is_positive() || rational_sqrt(&q).is_some()) {
            return Err(Error::InvalidArgument(format!(
                "quadratic context q={q} must be a positive non-square rational"
            )));
        }
        Ok(ExactScalar { a, b, q })
    }

    /// `sqrt(q)` itself.
    pub fn sqrt_of(q: &Rational) -> Result<Self> {
        if let Some(r) = rational_sqrt(q) {
            return Ok(Self::rational(r));
        }
        Self::new(Zero::zero(), One::one(), q.clone())
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(int(v))
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// The context of an irrational value, `None` for rationals.
    pub fn context(&self) -> Option<&Rational> {
        if self.is_rational() {
            None
        } else {
            Some(&self.q)
        }
    }

    /// Checks that all irrational values share one `q`, returning it.
    pub fn check_context<'a, I: IntoIterator<Item = &'a ExactScalar>>(
        values: I,
    ) -> Result<Option<Rational>> {
        let mut ctx: Option<Rational> = None;
        for v in values {
            if let Some(q) = v.context() {
                match &ctx {
                    None => ctx = Some(q.clone()),
                    Some(c) if c != q => {
                        return Err(Error::ContextMismatch(c.to_string(), q.to_string()))
                    }
                    _ => {}
                }
            }
        }
        Ok(ctx)
    }

    fn join_context(&self, o: &Self) -> Rational {
        match (self.is_rational(), o.is_rational()) {
            (true, true) => {
                if Zero::is_zero(&self.q) {
                    o.q.clone()
                } else {
                    self.q.clone()
                }
            }
            (false, true) => self.q.clone(),
            (true, false) => o.q.clone(),
            (false, false) => {
                assert!(
                    self.q == o.q,
                    "quadratic context mismatch: sqrt({}) vs sqrt({})",
                    self.q,
                    o.q
                );
                self.q.clone()
            }
        }
    }

    /// Galois conjugate `a - b·sqrt(q)`.
    pub fn conjugate(&self) -> Self {
        ExactScalar {
            a: self.a.clone(),
            b: -self.b.clone(),
            q: self.q.clone(),
        }
    }

    /// Field norm `a² - q b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.q * &self.b * &self.b
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_int(1);
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }

    /// Square of a value, used for squared inner products.
    pub fn square(&self) -> Self {
        self.clone() * self
    }

    /// Exact square root inside the same quadratic field, if one exists.
    /// `context` supplies `q` when `self` is rational but its root is not.
    pub fn sqrt(&self, context: Option<&Rational>) -> Option<Self> {
        if self.sgn() < 0 {
            return None;
        }
        if self.is_rational() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(Self::rational(r));
            }
            let q = context?;
            // a = q s^2
            let s2 = &self.a / q;
            let s = rational_sqrt(&s2)?;
            return Some(ExactScalar {
                a: Zero::zero(),
                b: s,
                q: q.clone(),
            });
        }
        // (x + y sqrt q)^2 = a + b sqrt q: x^2 + q y^2 = a, 2xy = b
        let disc = &self.a * &self.a - &self.q * &self.b * &self.b;
        let root = rational_sqrt(&disc)?;
        let two = int(2);
        for x2 in [(&self.a + &root) / &two, (&self.a - &root) / &two] {
            if let Some(x) = rational_sqrt(&x2) {
                if Zero::is_zero(&x) {
                    continue;
                }
                let y = &self.b / (&two * &x);
                let cand = ExactScalar {
                    a: x,
                    b: y,
                    q: self.q.clone(),
                };
                if cand.sgn() >= 0 && &cand.square() == self {
                    return Some(cand);
                }
                let neg = -cand;
                if neg.sgn() >= 0 && &neg.square() == self {
                    return Some(neg);
                }
            }
        }
        None
    }

    pub fn abs(&self) -> Self {
        if self.sgn() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else if Zero::is_zero(&self.a) {
            write!(f, "{}*sqrt({})", self.b, self.q)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.q)
        }
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b && (self.is_rational() || self.q == o.q)
    }
}

impl Eq for ExactScalar {}

impl std::hash::Hash for ExactScalar {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        if !self.is_rational() {
            self.q.hash(state);
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for ExactScalar {
    /// Numeric order; values over different fields are ordered by `q` first
    /// so the order stays total.
    fn cmp(&self, o: &Self) -> Ordering {
        if !self.is_rational() && !o.is_rational() && self.q != o.q {
            return self.q.cmp(&o.q);
        }
        match (self.clone() - o).sgn() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl From<Rational> for ExactScalar {
    fn from(r: Rational) -> Self {
        ExactScalar::rational(r)
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        self + &o
    }
}

impl<'a> Add<&'a ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: &'a ExactScalar) -> ExactScalar {
        let q = self.join_context(o);
        ExactScalar {
            a: self.a + &o.a,
            b: self.b + &o.b,
            q,
        }
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        self - &o
    }
}

impl<'a> Sub<&'a ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: &'a ExactScalar) -> ExactScalar {
        let q = self.join_context(o);
        ExactScalar {
            a: self.a - &o.a,
            b: self.b - &o.b,
            q,
        }
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: ExactScalar) -> ExactScalar {
        self * &o
    }
}

impl<'a> Mul<&'a ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn mul(self, o: &'a ExactScalar) -> ExactScalar {
        let q = self.join_context(o);
        if self.is_rational() && o.is_rational() {
            return ExactScalar {
                a: self.a * &o.a,
                b: Zero::zero(),
                q,
            };
        }
        let a = &self.a * &o.a + &self.b * &o.b * &q;
        let b = &self.a * &o.b + &self.b * &o.a;
        ExactScalar { a, b, q }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar {
            a: -self.a,
            b: -self.b,
            q: self.q,
        }
    }
}

impl Ring for ExactScalar {
    fn zero() -> Self {
        Self::rational(Zero::zero())
    }
    fn one() -> Self {
        Self::rational(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
}

impl Field for ExactScalar {
    fn inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            return None;
        }
        if self.is_rational() {
            return Some(ExactScalar {
                a: self.a.recip(),
                b: Zero::zero(),
                q: self.q.clone(),
            });
        }
        let n = self.norm();
        Some(ExactScalar {
            a: &self.a / &n,
            b: -(&self.b / &n),
            q: self.q.clone(),
        })
    }
    fn from_rational(r: &Rational) -> Self {
        Self::rational(r.clone())
    }
}

impl OrderedField for ExactScalar {
    fn sgn(&self) -> i8 {
        let (sa, sb) = (sign_i8(&self.a), sign_i8(&self.b));
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with q b^2
        let lhs = &self.a * &self.a;
        let rhs = &self.q * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }
    fn approx_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * rational_to_f64(&self.q).sqrt()
    }
}

fn sign_i8(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// Least common multiple of the denominators of a set of rationals.
pub fn denominator_lcm<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> BigInt {
    values
        .into_iter()
        .fold(<BigInt as One>::one(), |acc, r| acc.lcm(r.denom()))
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    a: String,
    b: String,
    q: String,
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_rational() {
            s.serialize_str(&self.a.to_string())
        } else {
            QuadRepr {
                a: self.a.to_string(),
                b: self.b.to_string(),
                q: self.q.to_string(),
            }
            .serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Quad(QuadRepr),
        }
        match Repr::deserialize(d)? {
            Repr::Str(s) => parse_rational(&s)
                .map(ExactScalar::rational)
                .map_err(de::Error::custom),
            Repr::Quad(r) => {
                let a = parse_rational(&r.a).map_err(de::Error::custom)?;
                let b = parse_rational(&r.b).map_err(de::Error::custom)?;
                let q = parse_rational(&r.q).map_err(de::Error::custom)?;
                ExactScalar::new(a, b, q).map_err(de::Error::custom)
            }
        }
    }
}

/// Serde helpers that store a `Rational` as a `"p/q"` string.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(de::Error::custom)
    }
}

/// Same as [`rational_string`] for vectors.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|r| r.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> ExactScalar {
        ExactScalar::sqrt_of(&rat(1, 3)).unwrap()
    }

    #[test]
    fn quadratic_multiplication_reduces() {
        let x = s3();
        assert_eq!(x.clone() * &x, ExactScalar::rational(rat(1, 3)));
        let y = ExactScalar::new(int(1), int(2), rat(1, 3)).unwrap();
        // (1 + 2s)(1 - 2s) = 1 - 4/3
        assert_eq!(
            y.clone() * &y.conjugate(),
            ExactScalar::rational(rat(-1, 3))
        );
        assert_eq!(y.clone() * &y.inv().unwrap(), ExactScalar::from_int(1));
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 1 - sqrt(1/3) > 0, 1/2 - sqrt(1/3) < 0
        let s = s3();
        assert_eq!((ExactScalar::from_int(1) - &s).sgn(), 1);
        assert_eq!((ExactScalar::rational(rat(1, 2)) - &s).sgn(), -1);
        assert!(ExactScalar::rational(rat(1, 2)) < s);
    }

    #[test]
    fn exact_square_roots() {
        let third = ExactScalar::rational(rat(1, 3));
        assert_eq!(third.sqrt(Some(&rat(1, 3))).unwrap(), s3());
        assert_eq!(
            ExactScalar::rational(rat(1, 9)).sqrt(None).unwrap(),
            ExactScalar::rational(rat(1, 3))
        );
        // (3 + sqrt 5)/2 = phi^2
        let phi = ExactScalar::new(rat(1, 2), rat(1, 2), int(5)).unwrap();
        assert_eq!(phi.square().sqrt(None).unwrap(), phi);
        assert!(ExactScalar::rational(rat(1, 2))
            .sqrt(Some(&int(3)))
            .is_none());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let v = vec![ExactScalar::rational(rat(2, 3)), s3()];
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, r#"["2/3",{"a":"0","b":"1","q":"1/3"}]"#);
        let back: Vec<ExactScalar> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn context_check() {
        let a = s3();
        let b = ExactScalar::sqrt_of(&int(5)).unwrap();
        assert!(ExactScalar::check_context([&a, &b]).is_err());
        assert_eq!(
            ExactScalar::check_context([&a, &ExactScalar::from_int(2)]).unwrap(),
            Some(rat(1, 3))
        );
    }
}
