use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{int, rational_string, rational_vec, Rational};
use crate::polynomials::{gegenbauer_family, nonnegative_on, UniPoly};
use crate::solver::{dense::RMat, solve_lmi, IpmSettings, IpmStatus, Lmi};

/// `c + sum_k a_k P_{2k}^n(t) <= f(t^2)` on `[-1, 1]`, with `a_k >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointCertificate {
    pub n_points: usize,
    pub n: usize,
    pub f: UniPoly,
    #[serde(with = "rational_string")]
    pub c: Rational,
    /// `a_1, ..., a_K`.
    #[serde(with = "rational_vec")]
    pub a: Vec<Rational>,
    #[serde(with = "rational_string")]
    pub bound: Rational,
    /// Optimum of the discretized program, for comparison.
    pub numeric_bound: f64,
}

/// `P_{2k}^n(t)` as a polynomial in `s = t^2`, for `k = 0..=kmax`.
fn even_gegenbauer(n: usize, kmax: usize) -> Vec<UniPoly> {
    gegenbauer_family(n, 2 * kmax)
        .into_iter()
        .step_by(2)
        .map(|p| UniPoly::new(p.coeffs().iter().step_by(2).cloned().collect()))
        .collect()
}

/// `f(s) - c - sum a_k Q_k(s)` with `s = t^2`.
pub fn two_point_slack(n: usize, f: &UniPoly, c: &Rational, a: &[Rational]) -> UniPoly {
    let q = even_gegenbauer(n, a.len());
    let mut g = f - &UniPoly::constant(c.clone());
    for (ak, qk) in a.iter().zip(q.iter().skip(1)) {
        g = &g - &qk.scale(ak);
    }
    g
}

/// `(N/2)((N-1)c - sum a_k)`.
pub fn two_point_value(n_points: usize, c: &Rational, a: &[Rational]) -> Rational {
    let n = int(n_points as i64);
    let sum: Rational = a.iter().sum();
    (&n / int(2)) * ((&n - int(1)) * c - sum)
}

/// Exact check of a two-point certificate against `f`.
pub fn verify_two_point(cert: &TwoPointCertificate) -> bool {
    if cert.a.iter().any(|x| x.is_negative()) {
        return false;
    }
    let g = two_point_slack(cert.n, &cert.f, &cert.c, &cert.a);
    nonnegative_on(&g, &int(0), &int(1))
        && two_point_value(cert.n_points, &cert.c, &cert.a) == cert.bound
}

/// Best rational approximation within `tol` by continued fractions.
fn rationalize(x: f64, tol: f64) -> Rational {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if k1 != 0 && (x - h1 as f64 / k1 as f64).abs() <= tol {
            break;
        }
        let frac = r - a;
        if frac.abs() < 1e-300 || k1.abs() > 1_000_000_000 {
            break;
        }
        r = 1.0 / frac;
    }
    Rational::new(h1.into(), k1.into())
}

fn round_to(x: f64, digits: i32) -> Rational {
    let scale = 10f64.powi(digits);
    Rational::new(
        ((x * scale).round() as i128).into(),
        (10i128.pow(digits as u32)).into(),
    )
}

/// Two-point bound for `N` lines in `RP^{n-1}` with potential `f(t^2)`,
/// using `P_2, ..., P_{2K}` with `2K <= max_degree`.
///
/// A discretized linear program is solved numerically; its solution is
/// rationalized and the slack polynomial is checked exactly with Sturm
/// sequences, retreating to a slightly smaller constant if needed.
pub fn two_point_bound(
    n_points: usize,
    n: usize,
    f: &UniPoly,
    max_degree: usize,
) -> Result<TwoPointCertificate> {
    if n_points < 2 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need N >= 2 and n >= 2, got N = {n_points}, n = {n}"
        )));
    }
    let kmax = max_degree / 2;
    let q = even_gegenbauer(n, kmax);
    let grid: Vec<f64> = {
        let m = 600;
        let mut g: Vec<f64> = (0..=m)
            .map(|j| 0.5 - 0.5 * (std::f64::consts::PI * j as f64 / m as f64).cos())
            .collect();
        g[0] = 0.0;
        g[m] = 1.0;
        g
    };
    let one = |v: f64| RMat {
        n: 1,
        data: vec![v],
    };
    let nv = kmax + 1;
    let mut sizes = Vec::new();
    let mut c = Vec::new();
    let mut a: Vec<Vec<(usize, RMat<f64>)>> = vec![Vec::new(); nv];
    for &s in &grid {
        let b = sizes.len();
        sizes.push(1);
        c.push(one(f.eval_f64(s)));
        a[0].push((b, one(1.0)));
        for k in 1..=kmax {
            a[k].push((b, one(q[k].eval_f64(s))));
        }
    }
    for ak in a.iter_mut().skip(1) {
        let b = sizes.len();
        sizes.push(1);
        c.push(one(0.0));
        ak.push((b, one(-1.0)));
    }
    let nn = n_points as f64;
    let mut bvec = vec![nn / 2.0 * (nn - 1.0)];
    bvec.extend((0..kmax).map(|_| -nn / 2.0));
    let lmi = Lmi {
        sizes,
        c,
        a,
        b: bvec,
    };
    let res = solve_lmi(
        &lmi,
        &IpmSettings {
            tol: 1e-10,
            max_iter: 150,
            ..IpmSettings::default()
        },
    );
    if res.status == IpmStatus::DualUnbounded {
        return Err(Error::Solver("two-point program is unbounded".into()));
    }
    let y = res.y;
    let numeric_bound = res.dual_objective;

    let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut candidates: Vec<(Rational, Vec<Rational>)> = Vec::new();
    let snap = |v: f64| if v.abs() < 1e-9 * scale { 0.0 } else { v };
    candidates.push((
        rationalize(snap(y[0]), 1e-8 * scale),
        y[1..]
            .iter()
            .map(|&v| rationalize(snap(v).max(0.0), 1e-8 * scale))
            .collect(),
    ));
    for digits in (3..=10).rev() {
        let a: Vec<Rational> = y[1..]
            .iter()
            .map(|&v| round_to(snap(v).max(0.0), digits))
            .collect();
        let c0 = round_to(y[0], digits) - Rational::new(1.into(), 10i128.pow(digits as u32).into());
        candidates.push((c0, a));
    }
    // constant-only fallback: c = min f on [0,1] is not rational in general,
    // so use a crude lower bound from the coefficients
    let fallback_c: Rational = {
        let mut lb = f.coeff(0);
        for ci in f.coeffs().iter().skip(1) {
            if ci.is_negative() {
                lb += ci;
            }
        }
        lb
    };
    candidates.push((fallback_c, vec![Rational::zero(); kmax]));
    for (c, a) in candidates {
        let g = two_point_slack(n, f, &c, &a);
        if a.iter().all(|x| !x.is_negative()) && nonnegative_on(&g, &int(0), &int(1)) {
            let bound = two_point_value(n_points, &c, &a);
            return Ok(TwoPointCertificate {
                n_points,
                n,
                f: f.clone(),
                c,
                a,
                bound,
                numeric_bound,
            });
        }
    }
    Err(Error::Solver(
        "no certified two-point solution found".into(),
    ))
}
