//! Numeric semidefinite solving of dual programs, SDPA interchange and
//! rounding back to exact certificates.

pub mod dense;
pub mod ipm;
mod param;
pub mod real;
mod round;
mod sdpa;

pub use ipm::{solve_lmi, IpmResult, IpmSettings, IpmStatus, Lmi};
pub use param::{build_lmi, parameterize, AffineParameterization, LmiLayout, SolveMode};
pub use real::Real;
pub use round::{round_certificate, round_lambda, RoundedCertificate};
pub use sdpa::{export_sdpa, import_sdpa, SdpaProblem};

use serde::{Deserialize, Serialize};

use crate::bounds::DualProgram;
use crate::error::{Error, Result};
use crate::exact_arith::Rational;

/// Numeric solve settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub precision_bits: u32,
    pub max_iter: usize,
    /// `None` picks the interior mode for programs with a target code and
    /// objective maximization otherwise.
    pub mode: Option<SolveMode>,
    /// Stopping tolerance; defaults to `2^(-0.4 * precision_bits)`, floored
    /// at `1e-8`.
    pub tol: Option<f64>,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            precision_bits: 256,
            max_iter: 200,
            mode: None,
            tol: None,
            verbose: false,
        }
    }
}

impl SolveOptions {
    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or_else(|| {
            if self.precision_bits <= 53 {
                1e-8
            } else {
                2f64.powf(-0.4 * self.precision_bits as f64).min(1e-8)
            }
        })
    }
}

/// Output of [`solve_numeric`]. Decimal strings carry the working precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericSolution {
    pub status: IpmStatus,
    pub mode: SolveMode,
    pub precision_bits: u32,
    pub iterations: usize,
    /// One value per direction of the parameterization.
    pub lambda: Vec<String>,
    /// Program objective at `lambda`.
    pub objective: String,
    /// Smallest eigenvalue bound of the reduced blocks (interior mode).
    pub min_eigenvalue: Option<String>,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub gap: f64,
}

impl NumericSolution {
    pub fn lambda_rationals(&self) -> Result<Vec<Rational>> {
        self.lambda
            .iter()
            .map(|s| crate::exact_arith::parse_rational(s))
            .collect()
    }

    pub fn objective_f64(&self) -> f64 {
        self.objective.parse().unwrap_or(f64::NAN)
    }
}

fn default_mode(prog: &DualProgram, lmi_size: usize) -> SolveMode {
    if prog.target.is_some() {
        SolveMode::Interior {
            trace_bound: 10.0 * lmi_size as f64,
        }
    } else {
        SolveMode::Objective
    }
}

fn run<T: Real>(
    prog: &DualProgram,
    param: &AffineParameterization,
    opts: &SolveOptions,
) -> Result<NumericSolution> {
    let prec = opts.precision_bits;
    let size: usize = prog
        .psd_blocks
        .iter()
        .map(|b| b.indices.len() - b.forced_kernel.len())
        .sum();
    let mode = opts.mode.unwrap_or_else(|| default_mode(prog, size));
    let (lmi, layout) = build_lmi::<T>(prog, param, mode, prec)?;
    let settings = IpmSettings {
        max_iter: opts.max_iter,
        tol: opts.tolerance(),
        gamma: 0.9,
        verbose: opts.verbose,
    };
    let res = solve_lmi(&lmi, &settings);
    let lambda: Vec<T> = res.y[..layout.directions].to_vec();
    let mut obj = T::from_rational(&prog.objective.value(&param.solution.particular), prec);
    for (l, d) in lambda.iter().zip(&param.solution.basis) {
        let mut coef = Rational::from_integer(0.into());
        for (i, v) in d {
            for (j, c) in &prog.objective.terms {
                if i == j {
                    coef += c * v;
                }
            }
        }
        obj.mul_add_assign(l, &T::from_rational(&coef, prec));
    }
    Ok(NumericSolution {
        status: res.status,
        mode,
        precision_bits: prec,
        iterations: res.iterations,
        lambda: lambda.iter().map(|x| x.to_decimal()).collect(),
        objective: obj.to_decimal(),
        min_eigenvalue: layout.eigen_var.map(|i| res.y[i].to_decimal()),
        primal_infeasibility: res.primal_infeasibility,
        dual_infeasibility: res.dual_infeasibility,
        gap: res.gap,
    })
}

/// Solves the program numerically over its affine parameterization.
///
/// `precision_bits = 53` runs in `f64`; larger values use MPFR floats.
pub fn solve_numeric(
    prog: &DualProgram,
    param: &AffineParameterization,
    opts: &SolveOptions,
) -> Result<NumericSolution> {
    match opts.precision_bits {
        0..=52 => Err(Error::InvalidArgument(format!(
            "precision must be at least 53 bits, got {}",
            opts.precision_bits
        ))),
        53 => run::<f64>(prog, param, opts),
        _ => {
            #[cfg(feature = "mpfr")]
            {
                run::<rug::Float>(prog, param, opts)
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
