use serde::{Deserialize, Serialize};

use crate::codes::Space;
use crate::error::{Error, Result};
use crate::exact_arith::{parse_rational, rational_to_f64, ExactScalar, Rational};
use crate::kernels::{t_blocks, KernelMatrix};
use crate::polynomials::UniPoly;
use crate::solver::{dense::RMat, solve_lmi, IpmSettings, IpmStatus, Lmi, Real};

/// Numeric optimum of the restricted primal program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimalResult {
    pub status: IpmStatus,
    /// Optimal value as a decimal string at the working precision.
    pub value: String,
    /// Weight on each support triple.
    pub weights: Vec<String>,
    pub gap: f64,
    pub iterations: usize,
}

impl PrimalResult {
    pub fn value_f64(&self) -> f64 {
        parse_rational(&self.value)
            .map(|r| rational_to_f64(&r))
            .unwrap_or(f64::NAN)
    }
}

pub(crate) fn exact_to_real<T: Real>(x: &ExactScalar, prec: u32) -> T {
    let a = T::from_rational(&x.a, prec);
    if x.b == Rational::from_integer(0.into()) {
        return a;
    }
    let b = T::from_rational(&x.b, prec);
    let q = T::from_rational(&x.q, prec);
    a + &(b * &q.sqrt())
}

fn kernel_at<T: Real>(k: &KernelMatrix, p: &[ExactScalar; 3], prec: u32) -> RMat<T> {
    let mut m = RMat::zeros(k.d, prec);
    for i in 0..k.d {
        for j in 0..k.d {
            let v = k.entry(i, j).eval([&p[0], &p[1], &p[2]]);
            m.set(i, j, exact_to_real(&v, prec));
        }
    }
    m
}

fn run<T: Real>(
    n_points: usize,
    weights_obj: &[ExactScalar],
    kernels: &[KernelMatrix],
    support: &[[ExactScalar; 3]],
    prec: u32,
    tol: f64,
) -> PrimalResult {
    let r = support.len();
    let nn = n_points as f64;
    let total = T::from_f64(nn * (nn - 1.0) * (nn - 2.0), prec);
    let scale = T::one(prec) / &T::from_f64(6.0 * (nn - 2.0), prec);
    let w: Vec<T> = weights_obj
        .iter()
        .map(|x| exact_to_real::<T>(x, prec) * &scale)
        .collect();
    let m = r - 1;
    let mut sizes = Vec::new();
    let mut c = Vec::new();
    let mut a: Vec<Vec<(usize, RMat<T>)>> = vec![Vec::new(); m];
    let scalar = |v: T| RMat {
        n: 1,
        data: vec![v],
    };
    // A_i >= 0 for i < r - 1, and A_last = total - sum A_i >= 0
    for ai in a.iter_mut() {
        ai.push((sizes.len(), scalar(-T::one(prec))));
        sizes.push(1);
        c.push(scalar(T::zero(prec)));
    }
    let last = sizes.len();
    sizes.push(1);
    c.push(scalar(total.clone()));
    for ai in a.iter_mut() {
        ai.push((last, scalar(T::one(prec))));
    }
    for kern in kernels {
        let vals: Vec<RMat<T>> = support.iter().map(|p| kernel_at(kern, p, prec)).collect();
        let mut base = vals[r - 1].scale(&total);
        if kern.k == 0 {
            let shift = T::from_f64(nn * (nn - 2.0), prec);
            for x in base.data.iter_mut() {
                *x += &shift;
            }
        }
        let slot = sizes.len();
        sizes.push(kern.d);
        c.push(base);
        for (i, ai) in a.iter_mut().enumerate() {
            ai.push((slot, vals[r - 1].sub(&vals[i])));
        }
    }
    let b: Vec<T> = (0..m).map(|i| w[r - 1].clone() - &w[i]).collect();
    let lmi = Lmi { sizes, c, a, b };
    let res = solve_lmi(
        &lmi,
        &IpmSettings {
            tol,
            max_iter: 300,
            ..IpmSettings::default()
        },
    );
    let mut weights: Vec<T> = res.y.clone();
    let mut rest = total.clone();
    for y in &weights {
        rest -= y;
    }
    weights.push(rest);
    let mut value = T::zero(prec);
    for (wi, ai) in w.iter().zip(&weights) {
        value.mul_add_assign(wi, ai);
    }
    PrimalResult {
        status: res.status,
        value: value.to_decimal(),
        weights: weights.iter().map(|x| x.to_decimal()).collect(),
        gap: res.gap,
        iterations: res.iterations,
    }
}

/// Minimizes `(1/(6(N-2))) sum A (f0(u) + f0(v) + f0(t))` (squared arguments
/// for projective codes) over weights `A >= 0` on the given triples with
/// `sum A = N(N-1)(N-2)` and `N(N-2) [k = 0] J + sum A T_k ⪰ 0`.
#[allow(clippy::too_many_arguments)]
pub fn primal_restricted(
    n_points: usize,
    n: usize,
    space: Space,
    f0: &UniPoly,
    support: &[[ExactScalar; 3]],
    blocks: &[usize],
    precision_bits: u32,
) -> Result<PrimalResult> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("support must be nonempty".into()));
    }
    let kernels = if blocks.is_empty() {
        Vec::new()
    } else {
        t_blocks(space.into(), n, n_points, blocks)?
    };
    if n_points < 3 {
        return Err(Error::InvalidArgument("need at least three points".into()));
    }
    let obj: Vec<ExactScalar> = support
        .iter()
        .map(|p| {
            let mut s = ExactScalar::from_int(0);
            for x in p {
                let arg = match space {
                    Space::Projective => x.square(),
                    Space::Sphere => x.clone(),
                };
                s = s + &f0.lift::<ExactScalar>().eval(&arg);
            }
            s
        })
        .collect();
    if support.len() == 1 {
        // the weight is forced; only feasibility remains
        let total = (n_points * (n_points - 1) * (n_points - 2)) as i64;
        let value = obj[0].clone()
            * &ExactScalar::from_int(total)
            * &ExactScalar::rational(Rational::new(1.into(), (6 * (n_points as i64 - 2)).into()));
        return Ok(PrimalResult {
            status: IpmStatus::Optimal,
            value: match value.as_rational() {
                Some(r) => r.to_string(),
                None => format!("{:e}", exact_to_real::<f64>(&value, 53)),
            },
            weights: vec![total.to_string()],
            gap: 0.0,
            iterations: 0,
        });
    }
    let tol = if precision_bits <= 53 {
        1e-9
    } else {
        2f64.powf(-0.4 * precision_bits as f64).min(1e-9)
    };
    match precision_bits {
        0..=52 => Err(Error::InvalidArgument(format!(
            "precision must be at least 53 bits, got {precision_bits}"
        ))),
        53 => Ok(run::<f64>(n_points, &obj, &kernels, support, 53, tol)),
        _ => {
            #[cfg(feature = "mpfr")]
            {
                Ok(run::<rug::Float>(
                    n_points,
                    &obj,
                    &kernels,
                    support,
                    precision_bits,
                    tol,
                ))
            }
            #[cfg(not(feature = "mpfr"))]
            {
                Err(Error::Unsupported(
                    "extended precision needs the `mpfr` feature; use 53 bits".into(),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triple_support() {
        let zero = ExactScalar::from_int(0);
        let support = vec![[zero.clone(), zero.clone(), zero]];
        let f = UniPoly::from_ints(&[1, 1]);
        // all weight on (0, 0, 0): energy f(0) per pair
        let r = primal_restricted(3, 3, Space::Projective, &f, &support, &[2, 1], 64).unwrap();
        assert!((r.value_f64() - 3.0).abs() < 1e-9, "{}", r.value);
        assert_eq!(r.weights.len(), 1);
    }

    #[test]
    fn empty_support_is_rejected() {
        let f = UniPoly::from_ints(&[0, 1]);
        assert!(primal_restricted(3, 3, Space::Projective, &f, &[], &[2], 64).is_err());
    }
}
