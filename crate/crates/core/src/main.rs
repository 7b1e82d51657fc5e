use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tripoint::bounds::{
    build_dual_program_with, default_perturbation_roots, perturb_potential, two_point_bound,
    verify_two_point, Certificate, DualProgram, ProgramOptions,
};
use tripoint::certify::{
    equality_set, uniqueness_counts, universal_optimality_pipeline, verify_certificate,
    PipelineOptions,
};
use tripoint::codes::{
    builtin, catalog_instances, design_strength, energy, triple_distribution, verify_code, Code,
    Convention, Space, CATALOG,
};
use tripoint::exact_arith::{parse_rational, ExactScalar, Rational};
use tripoint::orthoplex::{check_code, transform_code};
use tripoint::polynomials::{
    default_mult_zero, format_poly, parse_poly, partial_products, reduction_multiset, Multiset,
};
use tripoint::solver::{
    export_sdpa, import_sdpa, parameterize, round_certificate, solve_lmi, solve_numeric,
    IpmSettings, NumericSolution, SolveMode, SolveOptions,
};
use tripoint::{parallel, Error, Result};

/// Two- and three-point energy bounds with exact certificates.
#[derive(Parser)]
#[command(name = "tripoint", version, about)]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact potential energy of a code.
    Energy {
        /// Catalog name or code file.
        #[arg(long)]
        code: String,
        /// Potential, e.g. "t^3*(t-1/9)^2" or "[0, 0, 1]".
        #[arg(long = "f")]
        f: String,
        #[arg(long, default_value = "hat")]
        convention: String,
    },
    /// Catalog listing, code files and exact code checks.
    Codes {
        #[command(subcommand)]
        action: CodesAction,
    },
    /// Design strength of a code.
    Design {
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 10)]
        max: usize,
    },
    /// Compare an antipodal or line code with the orthoplex bound.
    Orthoplex {
        #[arg(long)]
        code: String,
        /// Print the Gram matrix of the transform by this function
        /// (default `P_2^n`).
        #[arg(long)]
        transform: Option<String>,
        #[arg(long)]
        show_gram: bool,
    },
    /// Reduction multiset and basis potentials of a projective code.
    Basis {
        #[arg(long)]
        code: String,
        /// Multiplicity of 0 (default 3 if a nonzero value occurs, else 2).
        #[arg(long)]
        mult_zero: Option<usize>,
    },
    /// Build, solve, round and certify bounds.
    Bound {
        #[command(subcommand)]
        action: BoundAction,
    },
    /// Certify universal optimality by reduction to finitely many potentials.
    ProveUniversal {
        #[arg(long)]
        code: String,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        /// Rounding precisions tried in order.
        #[arg(long, value_delimiter = ',', default_value = "9,8,10,11,12")]
        digits: Vec<u32>,
        /// Directory for certificates and the JSON report.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CodesAction {
    /// List catalog codes.
    List,
    /// Print a code in the code file format.
    Show { code: String },
    /// Exact checks: norms, inner products and triple distribution identities.
    Verify { code: String },
}

#[derive(Args, Clone)]
struct SolveArgs {
    /// Mantissa bits; 53 runs in double precision.
    #[arg(long, env = "TRIPOINT_PRECISION", default_value_t = 256)]
    precision: u32,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
}

#[derive(Args, Clone)]
struct ShapeArgs {
    /// Block sizes of F_0, F_1, ...
    #[arg(long, value_delimiter = ',', default_value = "5,4,4,3,3,2")]
    blocks: Vec<usize>,
    /// Degree of the monomial vector of the sum of squares.
    #[arg(long, default_value_t = 7)]
    sos_degree: u32,
    /// Size of the perturbation `eps * t^3 (t - 1/9)^2 (t - 1/3)^2`.
    #[arg(long, default_value = "1/1000")]
    eps: String,
    /// Add the two domain multipliers to the sum of squares.
    #[arg(long)]
    putinar: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Maximize the bound.
    Objective,
    /// Maximize the smallest eigenvalue (for programs with a target code).
    Interior,
}

#[derive(Subcommand)]
enum BoundAction {
    /// Two-point bound for `N` lines in `RP^{n-1}`.
    TwoPoint {
        #[arg(long)]
        n_points: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "f")]
        f: String,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
    },
    /// Build the dual three-point program and write it as JSON.
    Build {
        /// Target code; sets N, n and the slackness conditions.
        #[arg(long)]
        code: String,
        #[arg(long = "f")]
        f: String,
        /// Use `f` as given instead of perturbing it.
        #[arg(long)]
        no_perturb: bool,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write the parameterized problem in SDPA sparse format.
        #[arg(long)]
        sdpa: Option<PathBuf>,
    },
    /// Solve a program numerically.
    Solve {
        #[arg(long)]
        program: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an SDPA sparse file with the internal solver.
    SolveSdpa { file: PathBuf },
    /// Round a numeric solution to an exact certificate.
    Round {
        #[arg(long)]
        program: PathBuf,
        /// Solution JSON, or a plain list of parameter values (an `xVec`
        /// block of an external solver's output is recognized).
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = 9)]
        digits: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact verification of a certificate.
    Certify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        program: PathBuf,
        /// Defaults to the program's target energy.
        #[arg(long)]
        target: Option<String>,
    },
    /// Equality set and distance-distribution counts of a sharp certificate.
    Uniqueness {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        program: PathBuf,
        /// Potential whose equality set is computed (default: the
        /// program's potential).
        #[arg(long = "f")]
        f: Option<String>,
        /// Candidate squared inner products.
        #[arg(long, value_delimiter = ',', default_value = "0,1/9,1/3")]
        candidates: Vec<String>,
    },
}

/// Failure categories: errors and failed verifications both exit with 1.
enum Failure {
    Error(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

fn load_code(name: &str) -> Result<Code> {
    let p = Path::new(name);
    if p.is_file() {
        let s = fs::read_to_string(p)?;
        Code::from_file_str(&s)
    } else {
        builtin(name)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<DualProgram> {
    DualProgram::from_json(&read(path)?)
}

fn rational_arg(s: &str) -> Result<Rational> {
    parse_rational(s.trim())
}

fn pipeline_options(
    solve: &SolveArgs,
    shape: &ShapeArgs,
    digits: Vec<u32>,
) -> Result<PipelineOptions> {
    Ok(PipelineOptions {
        blocks: shape.blocks.clone(),
        sos_degree: shape.sos_degree,
        precision_bits: solve.precision,
        max_iter: solve.max_iter,
        digits,
        eps: rational_arg(&shape.eps)?,
        putinar: shape.putinar,
        ..PipelineOptions::default()
    })
}

/// `-1` once, every other inner product twice.
fn sphere_multiset(values: &[ExactScalar]) -> Result<Multiset> {
    let minus_one = ExactScalar::from_int(-1);
    Multiset::new(
        values
            .iter()
            .map(|v| (v.clone(), if *v == minus_one { 1 } else { 2 }))
            .collect(),
    )
}

fn parse_lambda(src: &str) -> Result<Vec<Rational>> {
    if let Ok(sol) = serde_json::from_str::<NumericSolution>(src) {
        return sol.lambda_rationals();
    }
    let body = match src.find("xVec") {
        Some(p) => {
            let rest = &src[p + 4..];
            let end = rest.find('}').map_or(rest.len(), |e| e + 1);
            &rest[..end]
        }
        None => src,
    };
    body.split(|c: char| c.is_whitespace() || "{},=".contains(c))
        .filter(|t| !t.is_empty())
        .map(parse_rational)
        .collect()
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Energy {
            code,
            f,
            convention,
        } => {
            let code = load_code(&code)?;
            let f = parse_poly(&f)?;
            let conv: Convention = convention.parse()?;
            println!("{}", energy(&code, &f, conv)?);
        }
        Command::Codes { action } => match action {
            CodesAction::List => {
                for (name, desc) in CATALOG {
                    println!("{name:<24} {desc}");
                }
                println!();
                println!("instances: {}", catalog_instances().join(", "));
            }
            CodesAction::Show { code } => print!("{}", load_code(&code)?.to_file_string()),
            CodesAction::Verify { code } => {
                let code = load_code(&code)?;
                let rep = verify_code(&code)?;
                println!("{rep}");
                let mut ok = rep.unit && rep.distinct;
                match triple_distribution(&code) {
                    Ok(dist) => {
                        println!("triple classes:");
                        for c in &dist.classes {
                            let vals = match &c.values {
                                Some(v) => format!("({}, {}, {})", v[0], v[1], v[2]),
                                None => format!(
                                    "squares ({}, {}, {})",
                                    c.squares[0], c.squares[1], c.squares[2]
                                ),
                            };
                            let tag = if c.in_domain() { "" } else { "  [coincident]" };
                            println!("  {vals}: {}{tag}", c.count);
                        }
                        for id in dist.identities() {
                            println!(
                                "identity {}: expected {}, found {} ({})",
                                id.name,
                                id.expected,
                                id.found,
                                if id.ok { "ok" } else { "FAILED" }
                            );
                            ok &= id.ok;
                        }
                    }
                    Err(e) => println!("triple distribution unavailable: {e}"),
                }
                if !ok {
                    return Err(Failure::Verification("code verification failed".into()));
                }
            }
        },
        Command::Design { code, max } => {
            let code = load_code(&code)?;
            let s = design_strength(&code, max)?;
            println!("{}: {s}-design", code.name);
            if s == max {
                println!("(strength search stopped at {max})");
            }
        }
        Command::Orthoplex {
            code,
            transform,
            show_gram,
        } => {
            let code = load_code(&code)?;
            let v = check_code(&code)?;
            println!("{v}");
            if show_gram || transform.is_some() {
                let f = transform.as_deref().map(parse_poly).transpose()?;
                let g = transform_code(&code, f.as_ref())?;
                println!("transform Gram matrix:");
                for i in 0..g.rows() {
                    let row: Vec<String> = (0..g.cols()).map(|j| g.get(i, j).to_string()).collect();
                    println!("  {}", row.join(" "));
                }
            }
        }
        Command::Basis { code, mult_zero } => {
            let code = load_code(&code)?;
            let values = verify_code(&code)?.values;
            let ms = match code.space {
                Space::Projective => {
                    let mz = mult_zero.unwrap_or_else(|| default_mult_zero(&values));
                    reduction_multiset(&values, mz)?
                }
                Space::Sphere => sphere_multiset(&values)?,
            };
            let nodes: Vec<String> = ms
                .entries()
                .iter()
                .map(|(x, m)| format!("{x} (x{m})"))
                .collect();
            println!("multiset: {}", nodes.join(", "));
            let basis = partial_products(&ms.expanded());
            for (i, p) in basis.iter().enumerate() {
                match ms.to_rational() {
                    Some(_) => println!(
                        "f_{i}(t) = {}",
                        format_poly(&p.map(|c| c.as_rational().cloned().expect("rational node")))
                    ),
                    None => println!("f_{i}(t) = {p}"),
                }
            }
        }
        Command::Bound { action } => run_bound(action)?,
        Command::ProveUniversal {
            code,
            solve,
            shape,
            digits,
            out_dir,
        } => {
            let code = load_code(&code)?;
            let opts = pipeline_options(&solve, &shape, digits)?;
            let rep = universal_optimality_pipeline(&code, &opts)?;
            println!("{rep}");
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir).map_err(Error::from)?;
                for p in &rep.potentials {
                    if let Some(c) = &p.certificate {
                        write(
                            &dir.join(format!("certificate_{}.json", p.index)),
                            &serde_json::to_string_pretty(c).map_err(Error::from)?,
                        )?;
                    }
                }
                write(
                    &dir.join("report.json"),
                    &serde_json::to_string_pretty(&rep).map_err(Error::from)?,
                )?;
            }
            if !rep.certified {
                return Err(Failure::Verification(rep.verdict));
            }
        }
    }
    Ok(())
}

fn run_bound(action: BoundAction) -> CliResult {
    match action {
        BoundAction::TwoPoint {
            n_points,
            n,
            f,
            max_degree,
        } => {
            let f = parse_poly(&f)?;
            let cert = two_point_bound(n_points, n, &f, max_degree)?;
            println!("f(t) = {}", format_poly(&f));
            println!("c = {}", cert.c);
            let a: Vec<String> = cert.a.iter().map(|x| x.to_string()).collect();
            println!("a = [{}]", a.join(", "));
            println!("numeric optimum: {:.12}", cert.numeric_bound);
            println!("verified: {}", verify_two_point(&cert));
            println!("bound: {}", cert.bound);
        }
        BoundAction::Build {
            code,
            f,
            no_perturb,
            shape,
            out,
            sdpa,
        } => {
            let code = load_code(&code)?;
            let f = parse_poly(&f)?;
            let f0 = if no_perturb {
                f
            } else {
                perturb_potential(
                    &f,
                    &default_perturbation_roots(),
                    &rational_arg(&shape.eps)?,
                )?
            };
            let prog = build_dual_program_with(
                code.len(),
                code.n,
                code.space,
                &f0,
                &shape.blocks,
                shape.sos_degree,
                Some(&code),
                &ProgramOptions {
                    putinar: shape.putinar,
                },
            )?;
            write(&out, &prog.to_json()?)?;
            println!(
                "program: {} unknowns, {} equations, {} matrices",
                prog.num_unknowns,
                prog.equations.len(),
                prog.matrices.len()
            );
            if let Some(t) = &prog.target {
                println!("target: {t}");
            }
            if let Some(path) = sdpa {
                let param = parameterize(&prog)?;
                write(&path, &export_sdpa(&prog, &param)?)?;
                println!("sdpa: {} parameters", param.dimension());
            }
        }
        BoundAction::Solve {
            program,
            solve,
            mode,
            out,
        } => {
            let prog = load_program(&program)?;
            let param = parameterize(&prog)?;
            let mode = mode.map(|m| match m {
                ModeArg::Objective => SolveMode::Objective,
                ModeArg::Interior => SolveMode::Interior {
                    trace_bound: 10.0
                        * prog
                            .psd_blocks
                            .iter()
                            .map(|b| (b.indices.len() - b.forced_kernel.len()) as f64)
                            .sum::<f64>(),
                },
            });
            let sol = solve_numeric(
                &prog,
                &param,
                &SolveOptions {
                    precision_bits: solve.precision,
                    max_iter: solve.max_iter,
                    mode,
                    ..SolveOptions::default()
                },
            )?;
            write(
                &out,
                &serde_json::to_string_pretty(&sol).map_err(Error::from)?,
            )?;
            println!("status: {:?}", sol.status);
            println!("iterations: {}", sol.iterations);
            println!("objective: {}", sol.objective);
            if let Some(e) = &sol.min_eigenvalue {
                println!("min eigenvalue: {e}");
            }
        }
        BoundAction::SolveSdpa { file } => {
            let p = import_sdpa(&read(&file)?)?;
            let lmi = p.to_lmi::<f64>(53);
            let res = solve_lmi(&lmi, &IpmSettings::default());
            println!("status: {:?}", res.status);
            // the SDPA objective is minimized; the internal form maximizes its negative
            println!("objective: {:.15e}", -res.dual_objective);
            let y: Vec<String> = res.y.iter().map(|v| format!("{v:.15e}")).collect();
            println!("xVec = {{{}}}", y.join(", "));
        }
        BoundAction::Round {
            program,
            solution,
            digits,
            out,
        } => {
            let prog = load_program(&program)?;
            let param = parameterize(&prog)?;
            let lambda = parse_lambda(&read(&solution)?)?;
            let rc = round_certificate(&prog, &param, &lambda, digits)?;
            write(
                &out,
                &serde_json::to_string_pretty(&rc.certificate).map_err(Error::from)?,
            )?;
            println!("bound: {}", rc.certificate.bound(prog.n_points));
        }
        BoundAction::Certify {
            cert,
            program,
            target,
        } => {
            let prog = load_program(&program)?;
            let cert: Certificate = serde_json::from_str(&read(&cert)?).map_err(Error::from)?;
            let target = match target {
                Some(t) => rational_arg(&t)?,
                None => prog.target.clone().ok_or_else(|| {
                    Error::InvalidArgument("program has no target; pass --target".into())
                })?,
            };
            let rep = verify_certificate(&cert, &prog, &target)?;
            println!("{rep}");
            if !rep.sharp {
                return Err(Failure::Verification("certificate is not sharp".into()));
            }
        }
        BoundAction::Uniqueness {
            cert,
            program,
            f,
            candidates,
        } => {
            let prog = load_program(&program)?;
            let cert: Certificate = serde_json::from_str(&read(&cert)?).map_err(Error::from)?;
            let f = match f {
                Some(s) => parse_poly(&s)?,
                None => prog.f0.clone(),
            };
            let cands: Vec<ExactScalar> = candidates
                .iter()
                .map(|s| rational_arg(s).map(ExactScalar::rational))
                .collect::<Result<_>>()?;
            let set = equality_set(&cert, &prog, &f, &cands)?;
            println!("equality set ({} classes):", set.len());
            for p in &set {
                println!("  ({}, {}, {})", p[0], p[1], p[2]);
            }
            let counts = uniqueness_counts(&cert, &prog, &set, prog.n_points)?;
            let c: Vec<String> = counts.iter().map(|x| x.to_string()).collect();
            println!("counts: ({})", c.join(", "));
            let total: Rational = counts.iter().sum();
            println!("total: {total}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.sequential {
        parallel::set_enabled(false);
    } else if cli.jobs > 0 {
        parallel::init_threads(cli.jobs);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
