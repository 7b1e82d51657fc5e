use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_value, potential_average, Certificate, DualProgram, MatrixRole};
use crate::error::{Error, Result};
use crate::exact_arith::{int, psd_check, rational_string, ExactScalar, Matrix, Rational, Ring};
use crate::kernels::{eval_kernel, KernelMatrix};
use crate::polynomials::{Exponent, TriPoly};

/// Outcome of the exact PSD test on one certificate matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockResult {
    pub label: String,
    pub size: usize,
    pub psd: bool,
}

/// Exact verification of a dual certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub psd_results: Vec<BlockResult>,
    /// Both identity checks passed.
    pub identity_ok: bool,
    /// Every program equation holds for the certificate's unknowns.
    pub identity_coefficients_ok: bool,
    /// The trivariate polynomial difference vanishes identically.
    pub identity_direct_ok: bool,
    #[serde(with = "rational_string")]
    pub bound: Rational,
    #[serde(with = "rational_string")]
    pub target: Rational,
    pub sharp: bool,
    pub slackness_ok: bool,
    pub tangency_ok: bool,
    /// Every failed check, in the order found.
    pub log: Vec<String>,
}

impl VerificationReport {
    pub fn all_psd(&self) -> bool {
        self.psd_results.iter().all(|b| b.psd)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.psd_results {
            writeln!(
                f,
                "psd {} ({}x{}): {}",
                b.label,
                b.size,
                b.size,
                if b.psd { "ok" } else { "FAILED" }
            )?;
        }
        writeln!(
            f,
            "identity: {} (coefficients {}, direct {})",
            ok(self.identity_ok),
            ok(self.identity_coefficients_ok),
            ok(self.identity_direct_ok)
        )?;
        writeln!(f, "slackness: {}", ok(self.slackness_ok))?;
        writeln!(f, "tangency: {}", ok(self.tangency_ok))?;
        writeln!(f, "bound: {}", self.bound)?;
        writeln!(f, "target: {}", self.target)?;
        for line in &self.log {
            writeln!(f, "note: {line}")?;
        }
        write!(f, "sharp: {}", self.sharp)
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn check_shapes(cert: &Certificate, prog: &DualProgram) -> Result<()> {
    let mut fi = 0;
    let mut gi = 0;
    for mv in &prog.matrices {
        let (m, what) = match mv.role {
            MatrixRole::Kernel { k } => {
                fi += 1;
                (cert.f.get(fi - 1), format!("F_{k}"))
            }
            MatrixRole::Sos => (Some(&cert.m), "M".to_string()),
            MatrixRole::Multiplier { index, .. } => {
                gi += 1;
                (cert.multipliers.get(gi - 1), format!("G_{index}"))
            }
        };
        match m {
            Some(m) if m.rows() == mv.size && m.cols() == mv.size => {}
            Some(m) => {
                return Err(Error::DimensionMismatch(format!(
                    "{what} is {}x{} but the program expects {}x{}",
                    m.rows(),
                    m.cols(),
                    mv.size,
                    mv.size
                )))
            }
            None => {
                return Err(Error::DimensionMismatch(format!(
                    "certificate has no matrix for {what}"
                )))
            }
        }
    }
    if fi != cert.f.len() || gi != cert.multipliers.len() {
        return Err(Error::DimensionMismatch(format!(
            "certificate has {} kernel and {} multiplier matrices, program has {fi} and {gi}",
            cert.f.len(),
            cert.multipliers.len()
        )));
    }
    if cert.monomial_order != prog.monomials {
        return Err(Error::DimensionMismatch(
            "certificate monomial order differs from the program".into(),
        ));
    }
    Ok(())
}

/// Certificate matrices in program order.
fn cert_matrices<'a>(cert: &'a Certificate, prog: &DualProgram) -> Vec<&'a Matrix<Rational>> {
    let mut f = cert.f.iter();
    let mut g = cert.multipliers.iter();
    prog.matrices
        .iter()
        .map(|mv| match mv.role {
            MatrixRole::Kernel { .. } => f.next().expect("shape checked"),
            MatrixRole::Sos => &cert.m,
            MatrixRole::Multiplier { .. } => g.next().expect("shape checked"),
        })
        .collect()
}

fn matrix_label(role: &MatrixRole) -> String {
    match role {
        MatrixRole::Kernel { k } => format!("F_{k}"),
        MatrixRole::Sos => "M".into(),
        MatrixRole::Multiplier { index, .. } => format!("G_{index}"),
    }
}

/// `c + sum_k <F_k, T_k>` as a polynomial.
pub(crate) fn h_polynomial(
    c: &Rational,
    fs: &[&Matrix<Rational>],
    kernels: &[KernelMatrix],
) -> TriPoly {
    let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
    acc.insert((0, 0, 0), c.clone());
    for (f, kern) in fs.iter().zip(kernels) {
        for i in 0..kern.d {
            for j in 0..kern.d {
                let w = f.get(i, j);
                if w.is_zero() {
                    continue;
                }
                for (e, coef) in kern.entry(i, j).terms() {
                    *acc.entry(*e).or_insert_with(|| int(0)) += w * coef;
                }
            }
        }
    }
    let mut p = TriPoly::zero();
    for (e, c) in acc {
        p.add_term(e, c);
    }
    p
}

fn add_exp(a: Exponent, b: Exponent) -> Exponent {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

/// Adds `sign * weight * z^T G z` into `acc`.
fn add_gram(
    acc: &mut BTreeMap<Exponent, Rational>,
    g: &Matrix<Rational>,
    mons: &[Exponent],
    weight: Option<&TriPoly>,
) {
    let one = TriPoly::constant(int(1));
    let w = weight.unwrap_or(&one);
    for a in 0..g.rows() {
        for b in 0..g.cols() {
            let x = g.get(a, b);
            if x.is_zero() {
                continue;
            }
            let base = add_exp(mons[a], mons[b]);
            for (e, c) in w.terms() {
                *acc.entry(add_exp(base, *e)).or_insert_with(|| int(0)) += x * c;
            }
        }
    }
}

/// Exact verification of `cert` as a certificate for `prog` with the given
/// target value.
///
/// The identity is checked twice: once through the program's linear
/// equations on the tied unknowns, and once by expanding
/// `lhs - c - sum <F_k, T_k> - z^T M z - sum g_i z^T G_i z` as a polynomial.
/// Slackness and tangency are likewise checked against the equations and
/// directly at the support triples.
pub fn verify_certificate(
    cert: &Certificate,
    prog: &DualProgram,
    target: &Rational,
) -> Result<VerificationReport> {
    check_shapes(cert, prog)?;
    let kernels = prog.kernels()?;
    let mats = cert_matrices(cert, prog);
    let mut log = Vec::new();

    // PSD
    let psd_results: Vec<BlockResult> = prog
        .matrices
        .iter()
        .zip(&mats)
        .map(|(mv, m)| {
            let label = matrix_label(&mv.role);
            let psd = match psd_check(m) {
                Ok(b) => b,
                Err(e) => {
                    log.push(format!("{label}: {e}"));
                    false
                }
            };
            if !psd {
                log.push(format!("{label} is not positive semidefinite"));
            }
            BlockResult {
                label,
                size: mv.size,
                psd,
            }
        })
        .collect();

    // path A: tied unknowns and program equations
    let mut x: Vec<Option<Rational>> = vec![None; prog.num_unknowns];
    x[0] = Some(cert.c.clone());
    let mut tied = true;
    for (mv, m) in prog.matrices.iter().zip(&mats) {
        let label = matrix_label(&mv.role);
        for i in 0..mv.size {
            for j in 0..mv.size {
                let v = m.get(i, j);
                match mv.entry(i, j) {
                    None => {
                        if !v.is_zero() {
                            tied = false;
                            log.push(format!("{label} entry ({i},{j}) must be zero"));
                        }
                    }
                    Some(u) => match &x[u] {
                        None => x[u] = Some(v.clone()),
                        Some(w) if w == v => {}
                        Some(_) => {
                            tied = false;
                            log.push(format!(
                                "{label} entry ({i},{j}) breaks the symmetry of the program"
                            ));
                        }
                    },
                }
            }
        }
    }
    let xs: Vec<Rational> = x.into_iter().map(|v| v.unwrap_or_else(|| int(0))).collect();
    let (mut coef_ok, mut slack_eq_ok, mut tang_eq_ok) = (tied, tied, tied);
    if tied {
        for eq in &prog.equations {
            let r = eq.residual(&xs);
            if r.is_zero() {
                continue;
            }
            let slot = if eq.label.starts_with("coefficient") {
                &mut coef_ok
            } else if eq.label.starts_with("slackness") || eq.label.starts_with("zero of square") {
                &mut slack_eq_ok
            } else {
                &mut tang_eq_ok
            };
            *slot = false;
            log.push(format!("equation `{}` has residual {r}", eq.label));
        }
    }

    // path B: direct polynomial subtraction
    let lhs = potential_average(prog.space, &prog.f0);
    let n_kernels = kernels.len();
    let h = h_polynomial(&cert.c, &mats[..n_kernels], &kernels);
    let mut acc: BTreeMap<Exponent, Rational> = lhs.terms().clone();
    for (e, c) in h.terms() {
        *acc.entry(*e).or_insert_with(|| int(0)) -= c;
    }
    let mut sos: BTreeMap<Exponent, Rational> = BTreeMap::new();
    for (mv, m) in prog.matrices.iter().zip(&mats) {
        match &mv.role {
            MatrixRole::Kernel { .. } => {}
            MatrixRole::Sos => add_gram(&mut sos, m, &prog.monomials, None),
            MatrixRole::Multiplier {
                weight, monomials, ..
            } => add_gram(&mut sos, m, monomials, Some(weight)),
        }
    }
    for (e, c) in sos {
        *acc.entry(e).or_insert_with(|| int(0)) -= c;
    }
    let bad: Vec<(Exponent, Rational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let direct_ok = bad.is_empty();
    if let Some((e, c)) = bad.first() {
        log.push(format!(
            "identity differs in {} coefficients, first u^{} v^{} t^{} by {c}",
            bad.len(),
            e.0,
            e.1,
            e.2
        ));
    }

    // direct slackness F_k Y_k = 0
    let mut slack_direct = true;
    if !prog.support.is_empty() {
        let nn2 = ExactScalar::from_int((prog.n_points * (prog.n_points - 2)) as i64);
        for (kern, f) in kernels.iter().zip(&mats) {
            let d = kern.d;
            let mut y: Matrix<ExactScalar> = if kern.k == 0 {
                Matrix::from_fn(d, d, |_, _| nn2.clone())
            } else {
                Matrix::zeros(d, d)
            };
            for s in &prog.support {
                let v = eval_kernel(kern, [&s.values[0], &s.values[1], &s.values[2]])?;
                y = y.add(&v.scale(&ExactScalar::from_int(s.count as i64)))?;
            }
            let fe = f.map(|r| ExactScalar::rational(r.clone()));
            if !fe.mul(&y)?.is_zero() {
                slack_direct = false;
                log.push(format!("F_{} Y_{} is not zero", kern.k, kern.k));
            }
        }
    }

    // direct tangency
    let mut tang_direct = true;
    let diff = &lhs - &h;
    let grads: Vec<TriPoly> = (0..3).map(|i| diff.partial(i)).collect();
    for s in &prog.support {
        let p = [&s.values[0], &s.values[1], &s.values[2]];
        if !diff.eval(p).is_zero() {
            tang_direct = false;
            log.push(format!(
                "lhs - H does not vanish at ({}, {}, {})",
                s.values[0], s.values[1], s.values[2]
            ));
        }
        for (i, g) in grads.iter().enumerate() {
            if !g.eval(p).is_zero() {
                tang_direct = false;
                log.push(format!(
                    "d/dx{i} of lhs - H does not vanish at ({}, {}, {})",
                    s.values[0], s.values[1], s.values[2]
                ));
            }
        }
    }

    let bound = match mats.first() {
        Some(f0) if matches!(prog.matrices[0].role, MatrixRole::Kernel { k: 0 }) => {
            bound_value(&cert.c, f0, prog.n_points)
        }
        _ => bound_value(&cert.c, &Matrix::zeros(0, 0), prog.n_points),
    };
    let identity_ok = coef_ok && direct_ok;
    let all_psd = psd_results.iter().all(|b| b.psd);
    if &bound != target {
        log.push(format!("bound {bound} differs from target {target}"));
    }
    let sharp = identity_ok && all_psd && &bound == target;
    Ok(VerificationReport {
        psd_results,
        identity_ok,
        identity_coefficients_ok: coef_ok,
        identity_direct_ok: direct_ok,
        bound,
        target: target.clone(),
        sharp,
        slackness_ok: slack_eq_ok && slack_direct,
        tangency_ok: tang_eq_ok && tang_direct,
        log,
    })
}
