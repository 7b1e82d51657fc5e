//! The orthoplex bound for antipodal codes, the lifting map
//! `x -> (x x^T - I/n) / sqrt(1 - 1/n)` and its generalization to other
//! positive definite functions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codes::{verify_code, Code, Space};
use crate::error::{Error, Result};
use crate::exact_arith::{int, rat, ExactScalar, Matrix, Ring};
use crate::polynomials::{gegenbauer, gegenbauer_coefficients, UniPoly};

/// Applicability of the orthoplex bound and its value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoplexBound {
    pub applicable: bool,
    /// `1/sqrt(n)`.
    pub bound_cos: ExactScalar,
}

/// `n(n+1)/2 < N/2 <= n(n+1) - 2` for an antipodal code of `N` points on
/// `S^{n-1}`; the bound on the largest inner product is `1/sqrt(n)`.
pub fn applicable_bound(n: usize, n_antipodal: usize) -> Result<OrthoplexBound> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    if !n_antipodal.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "an antipodal code has an even number of points, got {n_antipodal}"
        )));
    }
    let lines = n_antipodal / 2;
    let applicable = n * (n + 1) / 2 < lines && lines + 2 <= n * (n + 1);
    let inv = rat(1, n as i64);
    let bound_cos = ExactScalar::rational(inv.clone())
        .sqrt(Some(&inv))
        .expect("1/n is a square in its own field");
    Ok(OrthoplexBound {
        applicable,
        bound_cos,
    })
}

/// `x x^T - I/n` flattened row by row; divided by `sqrt(1 - 1/n)` it is the
/// image of a unit vector under the lifting map.
pub fn lift_unnormalized(x: &[ExactScalar]) -> Vec<ExactScalar> {
    let n = x.len();
    let inv = ExactScalar::rational(rat(1, n as i64));
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut v = x[i].clone() * &x[j];
            if i == j {
                v = v - &inv;
            }
            out.push(v);
        }
    }
    out
}

/// `<phi(x), phi(y)>` computed from the tensor images.
pub fn lifted_inner(x: &[ExactScalar], y: &[ExactScalar]) -> Result<ExactScalar> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DimensionMismatch(format!(
            "vectors of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let a = lift_unnormalized(x);
    let b = lift_unnormalized(y);
    let mut acc = ExactScalar::zero();
    for (p, q) in a.iter().zip(&b) {
        acc = acc + &(p.clone() * q);
    }
    let n = x.len() as i64;
    let scale = ExactScalar::rational(rat(n, n - 1));
    Ok(acc * &scale)
}

fn check_transform(n: usize, f: &UniPoly) -> Result<()> {
    if f.eval(&int(1)) != int(1) {
        return Err(Error::InvalidArgument(format!(
            "transform must satisfy f(1) = 1, got f(1) = {}",
            f.eval(&int(1))
        )));
    }
    for (k, c) in gegenbauer_coefficients(n, f)?.iter().enumerate() {
        if *c < int(0) {
            return Err(Error::InvalidArgument(format!(
                "Gegenbauer coefficient {k} of the transform is negative ({c})"
            )));
        }
    }
    Ok(())
}

fn line_gram(code: &Code) -> Result<Matrix<ExactScalar>> {
    if code.space == Space::Sphere && !code.antipodal {
        return Err(Error::InvalidArgument(format!(
            "`{}` is not stored as an antipodal code",
            code.name
        )));
    }
    code.gram().ok_or_else(|| {
        Error::Unsupported(format!("inner products of `{}` leave the field", code.name))
    })
}

/// Gram matrix `f(<x, y>)` over one representative per antipodal pair.
/// The default `f` is `P_2^n`, for which the entries are the inner products
/// of the lifted images.
pub fn transform_code(code: &Code, f: Option<&UniPoly>) -> Result<Matrix<ExactScalar>> {
    let default;
    let f = match f {
        Some(f) => f,
        None => {
            default = gegenbauer(code.n, 2)?;
            &default
        }
    };
    check_transform(code.n, f)?;
    let g = line_gram(code)?;
    let fe: UniPoly<ExactScalar> = f.lift();
    Ok(g.map(|x| fe.eval(x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoplexStatus {
    /// The largest inner product exceeds the bound.
    Meets,
    /// The largest inner product equals the bound.
    Sharp,
    /// The largest inner product is below the bound.
    Violates,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrthoplexVerdict {
    pub code: String,
    pub n: usize,
    pub n_antipodal: usize,
    pub applicable: bool,
    pub bound_cos: ExactScalar,
    /// Largest inner product between points that are not antipodal.
    pub code_max_cos: Option<ExactScalar>,
    /// Inner products of the antipodal code, other than `1` and `-1`.
    pub inner_products: Vec<ExactScalar>,
    pub status: OrthoplexStatus,
}

impl fmt::Display for OrthoplexVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "code {}: {} antipodal points on S^{}",
            self.code,
            self.n_antipodal,
            self.n - 1
        )?;
        writeln!(
            f,
            "orthoplex bound: {}, max inner product >= {}",
            if self.applicable {
                "applicable"
            } else {
                "not applicable"
            },
            self.bound_cos
        )?;
        let ips: Vec<String> = self.inner_products.iter().map(|x| x.to_string()).collect();
        writeln!(f, "inner products: {}", ips.join(", "))?;
        match &self.code_max_cos {
            Some(c) => writeln!(f, "max inner product: {c}")?,
            None => writeln!(f, "max inner product: outside the field")?,
        }
        match self.status {
            OrthoplexStatus::Sharp => write!(f, "sharp at {}", self.bound_cos),
            OrthoplexStatus::Meets => write!(f, "meets the bound (not sharp)"),
            OrthoplexStatus::Violates => write!(f, "VIOLATES the bound"),
            OrthoplexStatus::NotApplicable => write!(f, "not applicable"),
        }
    }
}

/// Compares an antipodal code (or a line code, read as its antipodal
/// double cover) with the orthoplex bound.
pub fn check_code(code: &Code) -> Result<OrthoplexVerdict> {
    if code.space == Space::Sphere && !code.antipodal {
        return Err(Error::InvalidArgument(format!(
            "`{}` is not stored as an antipodal code",
            code.name
        )));
    }
    let lines = code.stored_len();
    let n_antipodal = 2 * lines;
    let ob = applicable_bound(code.n, n_antipodal)?;
    let mut sphere = code.with_space(Space::Sphere);
    sphere.antipodal = true;
    let rep = verify_code(&sphere)?;
    let minus_one = ExactScalar::from_int(-1);
    let inner_products: Vec<ExactScalar> =
        rep.values.into_iter().filter(|v| *v != minus_one).collect();
    let code_max_cos = inner_products.last().cloned();
    let max_sq = verify_code(&code.with_space(Space::Projective))?.max_sq_cos;
    let bound_sq = ExactScalar::rational(rat(1, code.n as i64));
    let status = if !ob.applicable {
        OrthoplexStatus::NotApplicable
    } else if max_sq == bound_sq {
        OrthoplexStatus::Sharp
    } else if max_sq > bound_sq {
        OrthoplexStatus::Meets
    } else {
        OrthoplexStatus::Violates
    };
    Ok(OrthoplexVerdict {
        code: code.name.clone(),
        n: code.n,
        n_antipodal,
        applicable: ob.applicable,
        bound_cos: ob.bound_cos,
        code_max_cos,
        inner_products,
        status,
    })
}

/// Row sums of the default transform; all zero for a projective 1-design.
pub fn transform_row_sums(code: &Code) -> Result<Vec<ExactScalar>> {
    let g = transform_code(code, None)?;
    Ok((0..g.rows())
        .map(|i| (0..g.cols()).fold(ExactScalar::zero(), |acc, j| acc + g.get(i, j)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin, orthogonal_lines};
    use crate::exact_arith::Rational;

    fn sc(r: Rational) -> ExactScalar {
        ExactScalar::rational(r)
    }

    #[test]
    fn applicability() {
        for (lines, n) in [(7, 3), (11, 4), (12, 4), (16, 5), (22, 6)] {
            let b = applicable_bound(n, 2 * lines).unwrap();
            assert!(b.applicable, "({lines},{n})");
            assert_eq!(b.bound_cos.square(), sc(rat(1, n as i64)));
        }
        assert!(!applicable_bound(3, 12).unwrap().applicable);
        assert_eq!(applicable_bound(4, 24).unwrap().bound_cos, sc(rat(1, 2)));
        assert!(applicable_bound(3, 13).is_err());
    }

    #[test]
    fn orthogonal_transform() {
        let code = orthogonal_lines(4, 4).unwrap();
        let g = transform_code(&code, None).unwrap();
        assert_eq!(g.get(0, 1), &sc(rat(-1, 3)));
        assert_eq!(g.get(2, 2), &sc(int(1)));
    }

    #[test]
    fn rhombic_transform() {
        let code = builtin("rhombic7").unwrap();
        let g = transform_code(&code, None).unwrap();
        let mut max = sc(int(-1));
        for i in 0..7 {
            for j in 0..7 {
                if i != j && *g.get(i, j) > max {
                    max = g.get(i, j).clone();
                }
            }
        }
        assert_eq!(max, sc(int(0)));
        assert!(transform_row_sums(&code)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn transform_validation() {
        let code = builtin("rhombic7").unwrap();
        let sq = UniPoly::from_ints(&[0, 0, 1]);
        assert!(transform_code(&code, Some(&sq)).is_ok());
        let bad = UniPoly::new(vec![rat(1, 10), int(0), int(0), rat(9, 10)]);
        assert!(transform_code(&code, Some(&bad)).is_ok());
        // 3t^3 - 2t has P_1 coefficient -1/5
        let neg = UniPoly::from_ints(&[0, -2, 0, 3]);
        assert!(transform_code(&code, Some(&neg)).is_err());
        assert!(transform_code(&code, Some(&UniPoly::from_ints(&[0, 2]))).is_err());
    }

    #[test]
    fn verdicts() {
        let r = check_code(&builtin("rhombic7").unwrap()).unwrap();
        assert_eq!(r.status, OrthoplexStatus::Sharp);
        let a = check_code(&builtin("antipodal22_S3").unwrap()).unwrap();
        assert_eq!(a.status, OrthoplexStatus::Sharp);
        assert_eq!(a.bound_cos, sc(rat(1, 2)));
        for v in [rat(1, 3), rat(-1, 3), rat(1, 4), rat(-1, 4)] {
            assert!(a.inner_products.contains(&sc(v)));
        }
        assert!(a.to_string().contains("sharp at 1/2"));
        let o = check_code(&orthogonal_lines(3, 3).unwrap()).unwrap();
        assert_eq!(o.status, OrthoplexStatus::NotApplicable);
        let p = builtin("petersen10_S3").unwrap();
        assert!(check_code(&p).is_err());
    }

    #[test]
    fn lifted_norm_and_identity() {
        // (3/7, 2/7, 6/7) is a rational unit vector
        let x: Vec<ExactScalar> = [3, 2, 6].iter().map(|&v| sc(rat(v, 7))).collect();
        let y: Vec<ExactScalar> = [1, 0, 0].iter().map(|&v| sc(int(v))).collect();
        assert_eq!(lifted_inner(&x, &x).unwrap(), sc(int(1)));
        let t = sc(rat(3, 7));
        let p2: UniPoly<ExactScalar> = gegenbauer(3, 2).unwrap().lift();
        assert_eq!(lifted_inner(&x, &y).unwrap(), p2.eval(&t));
    }
}
