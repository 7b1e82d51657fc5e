use super::verify::h_polynomial;
use crate::bounds::{in_domain, potential_average, Certificate, DualProgram};
use crate::codes::canonical_triple;
use crate::error::{Error, Result};
use crate::exact_arith::{
    int, mat_inner, solve_unique, ExactScalar, LinearEquation, Matrix, OrderedField, Rational, Ring,
};
use crate::kernels::eval_kernel;
use crate::polynomials::UniPoly;

/// Square roots `±sqrt(s)` of the candidates, in one quadratic field.
fn candidate_roots(candidates: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    let mut context: Option<Rational> = None;
    let mut out: Vec<ExactScalar> = Vec::new();
    for s in candidates {
        if s.sgn() < 0 {
            return Err(Error::InvalidArgument(format!(
                "squared value {s} is negative"
            )));
        }
        let r = match s.sqrt(context.as_ref()) {
            Some(r) => r,
            None => match (s.as_rational(), &context) {
                (Some(q), None) => {
                    context = Some(q.clone());
                    s.sqrt(Some(q)).expect("sqrt in its own field")
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "square root of {s} is outside the common quadratic field"
                    )))
                }
            },
        };
        for v in [r.clone(), -r] {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// Canonical triples of the domain with squared entries among the
/// candidates at which `(f(u^2) + f(v^2) + f(t^2)) / 3 - H` vanishes.
///
/// Candidates whose roots need a second quadratic field are rejected with
/// [`Error::Unsupported`].
pub fn equality_set(
    cert: &Certificate,
    prog: &DualProgram,
    f: &UniPoly,
    candidates: &[ExactScalar],
) -> Result<Vec<[ExactScalar; 3]>> {
    let roots = candidate_roots(candidates)?;
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    let kernels = prog.kernels()?;
    let fs: Vec<&Matrix<Rational>> = cert.f.iter().collect();
    let h = h_polynomial(&cert.c, &fs, &kernels);
    let diff = &potential_average(prog.space, f) - &h;
    let mut seen: Vec<[ExactScalar; 3]> = Vec::new();
    for a in &roots {
        for b in &roots {
            for c in &roots {
                let p = canonical_triple(prog.space, &[a.clone(), b.clone(), c.clone()]);
                if seen.contains(&p) {
                    continue;
                }
                seen.push(p);
            }
        }
    }
    let mut out: Vec<[ExactScalar; 3]> = seen
        .into_iter()
        .filter(|p| in_domain(p) && diff.eval([&p[0], &p[1], &p[2]]).is_zero())
        .collect();
    out.sort();
    Ok(out)
}

/// Distance-distribution counts `N_i` of a hypothetical code attaining the
/// bound, supported on the given triples.
///
/// Solves `sum N_i = N(N-1)(N-2)` together with
/// `<F_k, N(N-2)[k = 0] J + sum N_i T_k(p_i)> = 0` for every `k`.
pub fn uniqueness_counts(
    cert: &Certificate,
    prog: &DualProgram,
    triples: &[[ExactScalar; 3]],
    n_points: usize,
) -> Result<Vec<Rational>> {
    if triples.is_empty() {
        return Err(Error::InvalidArgument("no triples given".into()));
    }
    let kernels = prog.kernels()?;
    if kernels.len() != cert.f.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} kernel blocks for {} certificate matrices",
            kernels.len(),
            cert.f.len()
        )));
    }
    let r = triples.len();
    let nn = n_points as i64;
    let mut eqs = vec![LinearEquation::new(
        (0..r).map(|i| (i, int(1))).collect(),
        int(nn * (nn - 1) * (nn - 2)),
        "total",
    )];
    for (kern, f) in kernels.iter().zip(&cert.f) {
        let fe = f.map(|x| ExactScalar::rational(x.clone()));
        let mut coefs = Vec::with_capacity(r);
        for p in triples {
            let t = eval_kernel(kern, [&p[0], &p[1], &p[2]])?;
            coefs.push(mat_inner(&fe, &t)?);
        }
        let rhs: Rational = if kern.k == 0 {
            let s: Rational = f.data().iter().sum();
            -(s * int(nn * (nn - 2)))
        } else {
            int(0)
        };
        let label = format!("trace against F_{}", kern.k);
        eqs.push(LinearEquation::new(
            coefs
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.a.clone()))
                .collect(),
            rhs,
            label.clone(),
        ));
        if coefs.iter().any(|c| !c.b.is_zero()) {
            eqs.push(LinearEquation::new(
                coefs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i, c.b.clone()))
                    .collect(),
                int(0),
                format!("{label} (sqrt part)"),
            ));
        }
    }
    let sol = solve_unique(r, &eqs)?;
    debug_assert!(eqs.iter().all(|e| e.residual(&sol).is_zero()));
    Ok(sol)
}
