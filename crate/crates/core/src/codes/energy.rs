use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::code::{Code, Space};
use super::triples::TripleDistribution;
use crate::error::{Error, Result};
use crate::exact_arith::{ExactScalar, Field, OrderedField, Ring};
use crate::polynomials::{gegenbauer, UniPoly};

/// How a potential is applied to a pair of points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `f(2 - 2u)` on spheres, `f(1 - u^2)` on projective spaces.
    Distance,
    /// `f(u)`.
    Tilde,
    /// `f(u^2)`.
    Hat,
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "distance" | "plain" => Ok(Convention::Distance),
            "tilde" | "inner" => Ok(Convention::Tilde),
            "hat" | "square" => Ok(Convention::Hat),
            _ => Err(Error::InvalidArgument(format!(
                "unknown energy convention `{s}` (expected distance, tilde or hat)"
            ))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Convention::Distance => "distance",
            Convention::Tilde => "tilde",
            Convention::Hat => "hat",
        };
        write!(f, "{s}")
    }
}

fn pair_argument(
    conv: Convention,
    space: Space,
    inner: Option<&ExactScalar>,
    square: &ExactScalar,
) -> Result<ExactScalar> {
    let one = ExactScalar::from_int(1);
    let need = || {
        Error::Unsupported(
            "inner product leaves the quadratic field; use the hat convention".into(),
        )
    };
    match (conv, space) {
        (Convention::Distance, Space::Sphere) => {
            let u = inner.ok_or_else(need)?;
            Ok(ExactScalar::from_int(2) - &(u.clone() * &ExactScalar::from_int(2)))
        }
        (Convention::Distance, Space::Projective) => Ok(one - square),
        (Convention::Tilde, Space::Sphere) => inner.cloned().ok_or_else(need),
        (Convention::Tilde, Space::Projective) => Err(Error::Unsupported(
            "the tilde convention needs oriented points; use hat on projective codes".into(),
        )),
        (Convention::Hat, Space::Projective) => Ok(square.clone()),
        (Convention::Hat, Space::Sphere) => Err(Error::Unsupported(
            "the hat convention applies to projective codes".into(),
        )),
    }
}

/// Potential energy: the sum of `f` over unordered pairs of distinct points.
pub fn energy(code: &Code, f: &UniPoly, conv: Convention) -> Result<ExactScalar> {
    let code = code.expanded();
    let g: UniPoly<ExactScalar> = f.lift();
    let m = code.stored_len();
    let mut acc = ExactScalar::zero();
    for i in 0..m {
        for j in 0..i {
            let sq = code.sq_inner(i, j);
            let u = code.inner(i, j);
            let x = pair_argument(conv, code.space, u.as_ref(), &sq)?;
            acc = acc + &g.eval(&x);
        }
    }
    Ok(acc)
}

/// Energy recovered from the triple distribution,
/// `1/(6(N-2)) sum_D A(u,v,t) (g(u) + g(v) + g(t))`.
pub fn energy_from_triples(
    dist: &TripleDistribution,
    f: &UniPoly,
    conv: Convention,
) -> Result<ExactScalar> {
    let n = dist.n_points;
    if n < 3 {
        return Err(Error::InvalidArgument("need at least three points".into()));
    }
    let g: UniPoly<ExactScalar> = f.lift();
    let mut acc = ExactScalar::zero();
    for c in dist.domain_classes() {
        let mut s = ExactScalar::zero();
        for idx in 0..3 {
            let inner = c.values.as_ref().map(|v| &v[idx]);
            let square = match &c.values {
                Some(v) => v[idx].square(),
                None => c.squares[idx].clone(),
            };
            s = s + &g.eval(&pair_argument(conv, dist.space, inner, &square)?);
        }
        acc = acc + &(s * &ExactScalar::from_int(c.count as i64));
    }
    Ok(acc
        .div(&ExactScalar::from_int(6 * (n as i64 - 2)))
        .expect("nonzero"))
}

/// Largest `m <= max` such that the code is a `m`-design: for projective
/// codes the sums of `P_{2j}^n` over ordered pairs vanish for `j <= m`, for
/// sphere codes the sums of `P_j^n`.
pub fn design_strength(code: &Code, max: usize) -> Result<usize> {
    let code = code.expanded();
    let m = code.stored_len();
    if code.n < 2 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 2".into(),
        ));
    }
    let mut strength = 0;
    for j in 1..=max {
        let sum = match code.space {
            Space::Projective => {
                let p = gegenbauer(code.n, 2 * j)?;
                // even polynomial as a polynomial in u^2
                let half = UniPoly::new(p.coeffs().iter().step_by(2).cloned().collect());
                let h: UniPoly<ExactScalar> = half.lift();
                let mut acc = ExactScalar::zero();
                for a in 0..m {
                    for b in 0..m {
                        acc = acc + &h.eval(&code.sq_inner(a, b));
                    }
                }
                acc
            }
            Space::Sphere => {
                let p: UniPoly<ExactScalar> = gegenbauer(code.n, j)?.lift();
                let mut acc = ExactScalar::zero();
                for a in 0..m {
                    for b in 0..m {
                        let u = code.inner(a, b).ok_or_else(|| {
                            Error::Unsupported("inner products leave the field".into())
                        })?;
                        acc = acc + &p.eval(&u);
                    }
                }
                acc
            }
        };
        if !sum.is_zero() {
            break;
        }
        strength = j;
    }
    Ok(strength)
}

/// Summary of an exact code verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub name: String,
    pub space: Space,
    pub n: usize,
    pub size: usize,
    /// Every normalized vector has squared norm 1 (always true by construction).
    pub unit: bool,
    /// Points (or lines) are pairwise distinct.
    pub distinct: bool,
    /// Distinct inner products (sphere) or squared inner products (projective)
    /// between distinct points, increasing.
    pub values: Vec<ExactScalar>,
    /// Largest squared cosine between distinct lines (projective) or the
    /// square of the largest inner product (sphere).
    pub max_sq_cos: ExactScalar,
    /// Largest inner product (sphere) or its square root (projective) when
    /// it lies in the field.
    pub max_cos: Option<ExactScalar>,
}

impl fmt::Display for CodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "code {} in {} (n = {}), N = {}",
            self.name, self.space, self.n, self.size
        )?;
        writeln!(f, "unit norms: {}", self.unit)?;
        writeln!(f, "distinct: {}", self.distinct)?;
        let label = match self.space {
            Space::Sphere => "inner products",
            Space::Projective => "squared inner products",
        };
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        writeln!(f, "{label}: {}", vals.join(", "))?;
        write!(f, "max squared cosine: {}", self.max_sq_cos)?;
        if let Some(c) = &self.max_cos {
            write!(f, "\nmax cosine: {c}")?;
        }
        Ok(())
    }
}

/// Exact verification of a code: norms, distinctness and the inner product set.
pub fn verify_code(code: &Code) -> Result<CodeReport> {
    let code = code.expanded();
    let m = code.stored_len();
    let mut values = Vec::new();
    let mut distinct = true;
    let one = ExactScalar::from_int(1);
    for i in 0..m {
        for j in 0..i {
            let v = match code.space {
                Space::Projective => code.sq_inner(i, j),
                Space::Sphere => code
                    .inner(i, j)
                    .ok_or_else(|| Error::Unsupported("inner products leave the field".into()))?,
            };
            if v == one {
                distinct = false;
            }
            values.push(v);
        }
    }
    values.sort();
    values.dedup();
    let (max_sq_cos, max_cos) = match code.space {
        Space::Projective => {
            let s = values.last().cloned().unwrap_or_else(ExactScalar::zero);
            let r = s.sqrt(code.q.as_ref());
            (s, r)
        }
        Space::Sphere => {
            let u = values
                .last()
                .cloned()
                .unwrap_or_else(|| ExactScalar::from_int(-1));
            (u.square(), Some(u))
        }
    };
    let unit = code
        .norms()
        .iter()
        .enumerate()
        .all(|(i, r)| code.sq_inner(i, i) == one && r.sgn() > 0);
    Ok(CodeReport {
        name: code.name.clone(),
        space: code.space,
        n: code.n,
        size: code.len(),
        unit,
        distinct,
        values,
        max_sq_cos,
        max_cos,
    })
}
