use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::verify::{verify_certificate, VerificationReport};
use crate::bounds::{
    build_dual_program_with, perturb_potential, two_point_bound, Certificate, DualProgram,
    ProgramOptions, TwoPointCertificate,
};
use crate::codes::{energy, verify_code, Code, Convention, Space};
use crate::error::{Error, Result};
use crate::exact_arith::{int, rat, rational_string, ExactScalar, OrderedField, Rational, Ring};
use crate::parallel;
use crate::polynomials::{
    default_mult_zero, format_poly, nonnegative_on, partial_products, reduction_multiset, UniPoly,
};
use crate::solver::{parameterize, round_certificate, solve_numeric, SolveOptions};

/// Settings of the end-to-end pipeline; the defaults reproduce the
/// rhombic dodecahedron proof.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub blocks: Vec<usize>,
    pub sos_degree: u32,
    pub precision_bits: u32,
    pub max_iter: usize,
    /// Rounding precisions, tried in order.
    pub digits: Vec<u32>,
    #[serde(with = "rational_string")]
    pub eps: Rational,
    pub two_point_degree: usize,
    pub putinar: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            blocks: vec![5, 4, 4, 3, 3, 2],
            sos_degree: 7,
            precision_bits: 256,
            max_iter: 200,
            digits: vec![9, 8, 10, 11, 12],
            eps: rat(1, 1000),
            two_point_degree: 6,
            putinar: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Trivial,
    TwoPoint,
    ThreePoint,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Trivial => "trivial",
            Method::TwoPoint => "two-point bound",
            Method::ThreePoint => "three-point certificate",
        })
    }
}

/// Result for one basis potential.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialReport {
    pub index: usize,
    /// Factored form, e.g. `t^3 (t - 1/9)^2`.
    pub label: String,
    pub potential: UniPoly,
    pub method: Method,
    #[serde(with = "rational_string")]
    pub target: Rational,
    #[serde(with = "crate::exact_arith::rational_vec")]
    pub bound: Vec<Rational>,
    pub sharp: bool,
    pub digits: Option<u32>,
    pub two_point: Option<TwoPointCertificate>,
    pub verification: Option<VerificationReport>,
    pub certificate: Option<Certificate>,
    pub numeric_objective: Option<String>,
    pub error: Option<String>,
    pub seconds: f64,
    #[serde(skip)]
    pub program: Option<DualProgram>,
}

impl PotentialReport {
    fn new(
        index: usize,
        label: String,
        potential: UniPoly,
        method: Method,
        target: Rational,
    ) -> Self {
        PotentialReport {
            index,
            label,
            potential,
            method,
            target,
            bound: Vec::new(),
            sharp: false,
            digits: None,
            two_point: None,
            verification: None,
            certificate: None,
            numeric_objective: None,
            error: None,
            seconds: 0.0,
            program: None,
        }
    }
}

impl fmt::Display for PotentialReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "potential {}: f(t) = {}", self.index, self.label)?;
        writeln!(f, "  method: {}", self.method)?;
        writeln!(f, "  target energy: {}", self.target)?;
        if let Some(b) = self.bound.first() {
            writeln!(f, "  bound: {b}")?;
        }
        if let Some(d) = self.digits {
            writeln!(f, "  rounded at {d} digits")?;
        }
        if let Some(v) = &self.verification {
            for line in v.to_string().lines() {
                writeln!(f, "  {line}")?;
            }
        }
        if let Some(e) = &self.error {
            writeln!(f, "  error: {e}")?;
        }
        write!(
            f,
            "  result: {} ({:.1} s)",
            if self.sharp { "sharp" } else { "NOT certified" },
            self.seconds
        )
    }
}

/// Summary of the universal optimality pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub code: String,
    pub n_points: usize,
    pub n: usize,
    /// Squared inner products between distinct lines.
    pub values: Vec<ExactScalar>,
    /// Nodes of the reduction multiset with multiplicities.
    pub multiset: Vec<(ExactScalar, usize)>,
    pub potentials: Vec<PotentialReport>,
    pub certified: bool,
    pub verdict: String,
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "code {}: N = {}, n = {}",
            self.code, self.n_points, self.n
        )?;
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        writeln!(f, "squared inner products: {}", vals.join(", "))?;
        let ms: Vec<String> = self
            .multiset
            .iter()
            .map(|(x, m)| format!("{x} (x{m})"))
            .collect();
        writeln!(f, "multiset: {}", ms.join(", "))?;
        for p in &self.potentials {
            writeln!(f, "{p}")?;
        }
        write!(f, "{}", self.verdict)
    }
}

fn factor_label(nodes: &[ExactScalar]) -> String {
    if nodes.is_empty() {
        return "1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let mut j = i;
        while j < nodes.len() && nodes[j] == nodes[i] {
            j += 1;
        }
        let base = if nodes[i].is_zero() {
            "t".to_string()
        } else if nodes[i].sgn() > 0 {
            format!("(t - {})", nodes[i])
        } else {
            format!("(t + {})", -nodes[i].clone())
        };
        parts.push(if j - i > 1 {
            format!("{base}^{}", j - i)
        } else {
            base
        });
        i = j;
    }
    parts.join(" ")
}

/// Three-point certificate for one potential against the code's energy.
pub fn certify_potential(
    code: &Code,
    potential: &UniPoly,
    roots: &[(ExactScalar, usize)],
    opts: &PipelineOptions,
) -> Result<PotentialReport> {
    let start = Instant::now();
    let target = energy_of(code, potential)?;
    let mut rep = PotentialReport::new(
        0,
        format_poly(potential),
        potential.clone(),
        Method::ThreePoint,
        target.clone(),
    );
    let res = run_three_point(code, potential, roots, opts, &mut rep);
    if let Err(e) = res {
        rep.error = Some(e.to_string());
        rep.sharp = false;
    }
    rep.seconds = start.elapsed().as_secs_f64();
    Ok(rep)
}

fn energy_of(code: &Code, p: &UniPoly) -> Result<Rational> {
    let e = energy(code, p, Convention::Hat)?;
    e.as_rational()
        .cloned()
        .ok_or_else(|| Error::Unsupported(format!("energy {e} of `{}` is irrational", code.name)))
}

fn run_three_point(
    code: &Code,
    potential: &UniPoly,
    roots: &[(ExactScalar, usize)],
    opts: &PipelineOptions,
    rep: &mut PotentialReport,
) -> Result<()> {
    let f0 = perturb_potential(potential, roots, &opts.eps)?;
    if !nonnegative_on(&(potential - &f0), &int(0), &int(1)) {
        return Err(Error::InvalidArgument(
            "perturbation is not below the potential on [0, 1]".into(),
        ));
    }
    let prog = build_dual_program_with(
        code.len(),
        code.n,
        code.space,
        &f0,
        &opts.blocks,
        opts.sos_degree,
        Some(code),
        &ProgramOptions {
            putinar: opts.putinar,
        },
    )?;
    let param = parameterize(&prog)?;
    let sol = solve_numeric(
        &prog,
        &param,
        &SolveOptions {
            precision_bits: opts.precision_bits,
            max_iter: opts.max_iter,
            ..SolveOptions::default()
        },
    )?;
    rep.numeric_objective = Some(sol.objective.clone());
    let lambda = sol.lambda_rationals()?;
    for &d in &opts.digits {
        let rc = round_certificate(&prog, &param, &lambda, d)?;
        let v = verify_certificate(&rc.certificate, &prog, &rep.target)?;
        let sharp = v.sharp;
        rep.bound = vec![v.bound.clone()];
        rep.digits = Some(d);
        rep.verification = Some(v);
        rep.certificate = Some(rc.certificate);
        if sharp {
            rep.sharp = true;
            break;
        }
    }
    rep.program = Some(prog);
    if !rep.sharp {
        rep.error = Some(format!(
            "no rounding in {:?} digits gave a sharp certificate",
            opts.digits
        ));
    }
    Ok(())
}

/// Reduces universal optimality of a projective code to finitely many
/// potentials and certifies each one.
///
/// The verdict is given only when every basis potential has a sharp exact
/// certificate; failures of single potentials are recorded in the report.
pub fn universal_optimality_pipeline(
    code: &Code,
    opts: &PipelineOptions,
) -> Result<PipelineReport> {
    if code.space != Space::Projective {
        return Err(Error::Unsupported(
            "the pipeline handles projective codes only".into(),
        ));
    }
    let report = verify_code(code)?;
    let values = report.values.clone();
    let ms = reduction_multiset(&values, default_mult_zero(&values))?;
    let rational = ms.to_rational().ok_or_else(|| {
        Error::Unsupported(format!(
            "squared inner products of `{}` are irrational",
            code.name
        ))
    })?;
    let nodes: Vec<Rational> = rational.expanded();
    let exact_nodes = ms.expanded();
    let basis = partial_products(&nodes);
    let roots: Vec<(ExactScalar, usize)> = ms.entries().to_vec();

    let jobs: Vec<usize> = (0..basis.len()).collect();
    let potentials: Vec<PotentialReport> = parallel::map_slice(&jobs, |&i| {
        let start = Instant::now();
        let p = &basis[i];
        let label = factor_label(&exact_nodes[..i]);
        let target = match energy_of(code, p) {
            Ok(t) => t,
            Err(e) => {
                let mut r = PotentialReport::new(i, label, p.clone(), Method::Trivial, int(0));
                r.error = Some(e.to_string());
                return r;
            }
        };
        let mut rep = match p.degree() {
            Some(0) | None => {
                let mut r =
                    PotentialReport::new(i, label, p.clone(), Method::Trivial, target.clone());
                r.bound = vec![target];
                r.sharp = true;
                r
            }
            Some(1) => {
                let mut r = PotentialReport::new(
                    i,
                    label.clone(),
                    p.clone(),
                    Method::TwoPoint,
                    target.clone(),
                );
                match two_point_bound(code.len(), code.n, p, opts.two_point_degree) {
                    Ok(c) => {
                        r.bound = vec![c.bound.clone()];
                        r.sharp = c.bound == target;
                        r.two_point = Some(c);
                    }
                    Err(e) => r.error = Some(e.to_string()),
                }
                if !r.sharp && code.len() >= 3 && code.n >= 3 {
                    let mut t =
                        PotentialReport::new(i, label, p.clone(), Method::ThreePoint, target);
                    if let Err(e) = run_three_point(code, p, &roots, opts, &mut t) {
                        t.error = Some(e.to_string());
                    }
                    t.two_point = r.two_point.take();
                    r = t;
                }
                r
            }
            Some(_) => {
                let mut r = PotentialReport::new(i, label, p.clone(), Method::ThreePoint, target);
                if let Err(e) = run_three_point(code, p, &roots, opts, &mut r) {
                    r.error = Some(e.to_string());
                    r.sharp = false;
                }
                r
            }
        };
        rep.seconds = start.elapsed().as_secs_f64();
        rep
    });
    let certified = potentials.iter().all(|p| p.sharp);
    let failed = potentials.iter().filter(|p| !p.sharp).count();
    let verdict = if certified {
        format!(
            "universal optimality certified for {} ({} basis potentials sharp)",
            code.name,
            potentials.len()
        )
    } else {
        format!(
            "not certified: {failed} of {} basis potentials lack a sharp certificate",
            potentials.len()
        )
    };
    Ok(PipelineReport {
        code: code.name.clone(),
        n_points: code.len(),
        n: code.n,
        values,
        multiset: roots,
        potentials,
        certified,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin, orthogonal_lines};

    #[test]
    fn labels() {
        let q = ExactScalar::rational(rat(1, 9));
        let z = ExactScalar::from_int(0);
        assert_eq!(factor_label(&[]), "1");
        assert_eq!(
            factor_label(&[z.clone(), z.clone(), z, q.clone(), q]),
            "t^3 (t - 1/9)^2"
        );
    }

    #[test]
    fn orthogonal_lines_need_only_two_point() {
        let code = orthogonal_lines(3, 3).unwrap();
        let rep = universal_optimality_pipeline(&code, &PipelineOptions::default()).unwrap();
        assert_eq!(rep.potentials.len(), 2);
        assert_eq!(rep.potentials[1].method, Method::TwoPoint);
        assert_eq!(rep.potentials[1].bound, vec![int(0)]);
        assert!(rep.certified);
        assert!(rep.verdict.contains("universal optimality certified"));
    }

    #[test]
    fn sphere_codes_are_rejected() {
        let code = builtin("rhombic7").unwrap().with_space(Space::Sphere);
        assert!(matches!(
            universal_optimality_pipeline(&code, &PipelineOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }
}
