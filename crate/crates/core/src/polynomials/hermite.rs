use serde::{Deserialize, Serialize};

use super::UniPoly;
use crate::error::{Error, Result};
use crate::exact_arith::{int, ExactScalar, Field, OrderedField, Rational, Ring};

/// Gegenbauer polynomial `P_k^n`, normalized so that `P_k^n(1) = 1`.
pub fn gegenbauer(n: usize, k: usize) -> Result<UniPoly> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Gegenbauer dimension must be at least 2, got {n}"
        )));
    }
    Ok(gegenbauer_family(n, k).pop().expect("nonempty"))
}

/// `[P_0^n, ..., P_kmax^n]`; `n >= 2` is assumed.
pub fn gegenbauer_family(n: usize, kmax: usize) -> Vec<UniPoly> {
    let mut out = vec![UniPoly::constant(int(1))];
    if kmax == 0 {
        return out;
    }
    out.push(UniPoly::x());
    let t = UniPoly::x();
    for k in 1..kmax {
        let a = Rational::new(((2 * k + n - 2) as i64).into(), ((k + n - 2) as i64).into());
        let b = Rational::new((k as i64).into(), ((k + n - 2) as i64).into());
        let next = &(&t * &out[k]).scale(&a) - &out[k - 1].scale(&b);
        out.push(next);
    }
    out
}

/// Expansion coefficients of `f` in the basis `P_0^n, P_1^n, ...`.
pub fn gegenbauer_coefficients(n: usize, f: &UniPoly) -> Result<Vec<Rational>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Gegenbauer dimension must be at least 2, got {n}"
        )));
    }
    let deg = match f.degree() {
        None => return Ok(vec![]),
        Some(d) => d,
    };
    let fam = gegenbauer_family(n, deg);
    let mut rem = f.clone();
    let mut out = vec![int(0); deg + 1];
    for k in (0..=deg).rev() {
        let lead = fam[k].coeff(k);
        let c = rem.coeff(k) / lead;
        rem = &rem - &fam[k].scale(&c);
        out[k] = c;
    }
    Ok(out)
}

/// Nodes with multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiset<T: Field = ExactScalar> {
    entries: Vec<(T, usize)>,
}

impl<T: Field + Ord> Multiset<T> {
    /// Merges repeated nodes and drops zero multiplicities; keeps nodes sorted.
    pub fn new(entries: Vec<(T, usize)>) -> Result<Self> {
        let mut v: Vec<(T, usize)> = Vec::new();
        for (x, m) in entries {
            if m == 0 {
                continue;
            }
            match v.iter_mut().find(|(y, _)| *y == x) {
                Some(e) => e.1 += m,
                None => v.push((x, m)),
            }
        }
        if v.is_empty() {
            return Err(Error::InvalidArgument("empty multiset".into()));
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Multiset { entries: v })
    }

    pub fn entries(&self) -> &[(T, usize)] {
        &self.entries
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn multiplicity(&self, x: &T) -> usize {
        self.entries.iter().find(|(y, _)| y == x).map_or(0, |e| e.1)
    }

    /// Nodes repeated by multiplicity, nondecreasing.
    pub fn expanded(&self) -> Vec<T> {
        self.entries
            .iter()
            .flat_map(|(x, m)| std::iter::repeat_n(x.clone(), *m))
            .collect()
    }
}

impl Multiset<ExactScalar> {
    /// Same multiset over the rationals, if every node is rational.
    pub fn to_rational(&self) -> Option<Multiset<Rational>> {
        let entries = self
            .entries
            .iter()
            .map(|(x, m)| x.as_rational().map(|r| (r.clone(), *m)))
            .collect::<Option<Vec<_>>>()?;
        Some(Multiset { entries })
    }
}

/// `[1, (t - t1), (t - t1)(t - t2), ...]`, one entry per node.
pub fn partial_products<T: Field>(nodes: &[T]) -> Vec<UniPoly<T>> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = UniPoly::constant(T::one());
    for (i, x) in nodes.iter().enumerate() {
        out.push(acc.clone());
        if i + 1 < nodes.len() {
            acc = &acc * &UniPoly::linear_root(x);
        }
    }
    out
}

/// Confluent divided differences `f[t1], f[t1,t2], ...` for nondecreasing
/// nodes; these are the coefficients of the Hermite interpolant in the
/// partial-product basis.
pub fn newton_coefficients<T: Field>(nodes: &[T], f: &UniPoly<T>) -> Vec<T> {
    let m = nodes.len();
    let mut col: Vec<T> = nodes.iter().map(|x| f.eval(x)).collect();
    let mut out = vec![col[0].clone()];
    for j in 1..m {
        let mut next = Vec::with_capacity(m - j);
        for i in 0..(m - j) {
            let (a, b) = (&nodes[i], &nodes[i + j]);
            if a == b {
                next.push(f.taylor_coeff(j, a));
            } else {
                let num = col[i + 1].clone() - &col[i];
                let den = b.clone() - a;
                next.push(num.div(&den).expect("distinct nodes"));
            }
        }
        out.push(next[0].clone());
        col = next;
    }
    out
}

/// The unique polynomial of degree below the total multiplicity that agrees
/// with `f` to the prescribed order at every node.
pub fn hermite_interpolate<T: Field + Ord>(ms: &Multiset<T>, f: &UniPoly<T>) -> Result<UniPoly<T>> {
    let nodes = ms.expanded();
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("empty multiset".into()));
    }
    let d = newton_coefficients(&nodes, f);
    let basis = partial_products(&nodes);
    let mut acc = UniPoly::zero();
    for (c, p) in d.iter().zip(&basis) {
        acc = &acc + &p.scale(c);
    }
    Ok(acc)
}

/// Multiset for the reduction to finitely many potentials: each nonzero
/// squared inner product twice, and `0` with multiplicity `mult_zero`.
pub fn reduction_multiset(values: &[ExactScalar], mult_zero: usize) -> Result<Multiset> {
    let one = ExactScalar::from_int(1);
    let mut entries = Vec::new();
    for v in values {
        if v.sgn() < 0 || *v >= one {
            return Err(Error::InvalidArgument(format!(
                "squared inner product {v} outside [0,1)"
            )));
        }
        if !v.is_zero() && !entries.iter().any(|(x, _): &(ExactScalar, usize)| x == v) {
            entries.push((v.clone(), 2));
        }
    }
    if mult_zero > 0 {
        entries.push((ExactScalar::from_int(0), mult_zero));
    }
    Multiset::new(entries)
}

/// Default multiplicity of 0: three when the code has a nonzero squared
/// inner product, two otherwise.
pub fn default_mult_zero(values: &[ExactScalar]) -> usize {
    if values.iter().any(|v| !v.is_zero()) {
        3
    } else {
        2
    }
}

/// `f(x) - H_T(f)(x)`.
pub fn interpolation_gap<T: Field + Ord>(ms: &Multiset<T>, f: &UniPoly<T>, x: &T) -> Result<T> {
    let h = hermite_interpolate(ms, f)?;
    Ok(f.eval(x) - &h.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    fn rs(entries: &[(Rational, usize)]) -> Multiset<Rational> {
        Multiset::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn gegenbauer_examples() {
        for n in 2..8 {
            assert_eq!(gegenbauer(n, 1).unwrap(), UniPoly::x());
            let nn = int(n as i64);
            let expect = UniPoly::new(vec![-nn.recip(), int(0), int(1)])
                .scale(&(int(1) - nn.recip()).recip());
            assert_eq!(gegenbauer(n, 2).unwrap(), expect);
        }
        assert_eq!(
            gegenbauer(3, 3).unwrap(),
            UniPoly::new(vec![int(0), rat(-3, 2), int(0), rat(5, 2)])
        );
        assert!(gegenbauer(1, 2).is_err());
        // Chebyshev: P_2^2 = 2t^2 - 1
        assert_eq!(gegenbauer(2, 2).unwrap(), UniPoly::from_ints(&[-1, 0, 2]));
    }

    #[test]
    fn gegenbauer_expansion_round_trip() {
        let f = UniPoly::from_ints(&[0, 0, 1]);
        let c = gegenbauer_coefficients(3, &f).unwrap();
        assert_eq!(c, vec![rat(1, 3), int(0), rat(2, 3)]);
    }

    #[test]
    fn hermite_examples() {
        let f = UniPoly::from_ints(&[1, 2, 0, 5]);
        let h = hermite_interpolate(&rs(&[(rat(1, 2), 1)]), &f).unwrap();
        assert_eq!(h, UniPoly::constant(f.eval(&rat(1, 2))));
        let cube = UniPoly::from_ints(&[0, 0, 0, 1]);
        let ms = rs(&[(int(0), 1), (rat(1, 3), 3)]);
        assert_eq!(hermite_interpolate(&ms, &cube).unwrap(), cube);
        let quartic = UniPoly::from_ints(&[0, 0, 0, 0, 1]);
        let ms = rs(&[(int(0), 2), (int(1), 2)]);
        assert_eq!(
            hermite_interpolate(&ms, &quartic).unwrap(),
            UniPoly::from_ints(&[0, 0, -1, 2])
        );
    }

    #[test]
    fn partial_product_examples() {
        assert_eq!(partial_products(&[int(0)]), vec![UniPoly::constant(int(1))]);
        let nodes = [
            int(0),
            int(0),
            int(0),
            rat(1, 9),
            rat(1, 9),
            rat(1, 3),
            rat(1, 3),
        ];
        let pp = partial_products(&nodes);
        let t = UniPoly::x();
        let a = UniPoly::linear_root(&rat(1, 9));
        let b = UniPoly::linear_root(&rat(1, 3));
        let t3 = t.pow(3);
        let expect = vec![
            UniPoly::constant(int(1)),
            t.clone(),
            t.pow(2),
            t3.clone(),
            &t3 * &a,
            &t3 * &a.pow(2),
            &(&t3 * &a.pow(2)) * &b,
        ];
        assert_eq!(pp, expect);
    }

    #[test]
    fn reduction_multiset_examples() {
        let vals = [
            ExactScalar::from_int(0),
            ExactScalar::rational(rat(1, 9)),
            ExactScalar::rational(rat(1, 3)),
        ];
        let ms = reduction_multiset(&vals, 3).unwrap();
        assert_eq!(ms.to_rational().unwrap().expanded().len(), 7);
        assert_eq!(ms.multiplicity(&ExactScalar::from_int(0)), 3);
        let ms = reduction_multiset(&[ExactScalar::rational(rat(1, 2))], 0).unwrap();
        assert_eq!(ms.entries(), &[(ExactScalar::rational(rat(1, 2)), 2)]);
        let ms = reduction_multiset(&[ExactScalar::from_int(0)], 1).unwrap();
        assert_eq!(ms.total(), 1);
        assert!(reduction_multiset(&[ExactScalar::from_int(1)], 1).is_err());
    }
}
