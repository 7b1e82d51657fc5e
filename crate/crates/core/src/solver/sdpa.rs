//! SDPA sparse format (`.dat-s`).
//!
//! The problem is `min c^T x  s.t.  sum F_i x_i - F_0 ⪰ 0`. Exported dual
//! programs have one block per matrix unknown, `x` the parameters of the
//! affine parameterization, `c` the negated objective and `F_0` the negated
//! particular solution.

use std::fmt::Write as _;

use num_traits::Zero;

use super::dense::RMat;
use super::ipm::Lmi;
use super::param::AffineParameterization;
use super::real::Real;
use super::round::decimal_digits;
use crate::bounds::DualProgram;
use crate::error::{Error, Result};
use crate::exact_arith::{parse_rational, rational_to_f64, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct SdpaProblem {
    pub num_constraints: usize,
    /// Negative sizes mark diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub objective: Vec<Rational>,
    /// `(matno, block, i, j, value)`, one-based block and indices, `i <= j`.
    pub entries: Vec<(usize, usize, usize, usize, Rational)>,
}

fn fmt_value(x: &Rational) -> String {
    if x.is_integer() {
        return x.numer().to_string();
    }
    match decimal_digits(x, 60) {
        Some(d) => {
            let scale = num_traits::pow(num_bigint::BigInt::from(10), d as usize);
            let k = (x * Rational::from_integer(scale)).to_integer();
            let neg = k < 0.into();
            let digits = if neg { (-k).to_string() } else { k.to_string() };
            let d = d as usize;
            let padded = format!("{:0>width$}", digits, width = d + 1);
            let (ip, fp) = padded.split_at(padded.len() - d);
            format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
        }
        None => format!("{:.17e}", rational_to_f64(x)),
    }
}

impl SdpaProblem {
    pub fn to_string_sdpa(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.num_constraints);
        let _ = writeln!(s, "{}", self.block_sizes.len());
        let sizes: Vec<String> = self.block_sizes.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "{}", sizes.join(" "));
        let obj: Vec<String> = self.objective.iter().map(fmt_value).collect();
        let _ = writeln!(s, "{}", obj.join(" "));
        for (m, b, i, j, v) in &self.entries {
            let _ = writeln!(s, "{m} {b} {i} {j} {}", fmt_value(v));
        }
        s
    }

    /// The problem as `maximize (-c)^T x  s.t.  -F_0 - sum x_i (-F_i) ⪰ 0`.
    pub fn to_lmi<T: Real>(&self, prec: u32) -> Lmi<T> {
        let sizes: Vec<usize> = self
            .block_sizes
            .iter()
            .map(|b| b.unsigned_abs() as usize)
            .collect();
        let mut c: Vec<RMat<T>> = sizes.iter().map(|&n| RMat::zeros(n, prec)).collect();
        let mut a: Vec<Vec<(usize, RMat<T>)>> = vec![Vec::new(); self.num_constraints];
        for (m, b, i, j, v) in &self.entries {
            let (b, i, j) = (b - 1, i - 1, j - 1);
            let val = -T::from_rational(v, prec);
            let target = if *m == 0 {
                &mut c[b]
            } else {
                let list = &mut a[m - 1];
                let pos = match list.iter().position(|(bb, _)| *bb == b) {
                    Some(p) => p,
                    None => {
                        list.push((b, RMat::zeros(sizes[b], prec)));
                        list.len() - 1
                    }
                };
                &mut list[pos].1
            };
            target.set(i, j, val.clone());
            target.set(j, i, val);
        }
        let b = self
            .objective
            .iter()
            .map(|x| -T::from_rational(x, prec))
            .collect();
        Lmi { sizes, c, a, b }
    }
}

/// Writes the dual program over its parameterization in SDPA sparse format.
pub fn export_sdpa(prog: &DualProgram, param: &AffineParameterization) -> Result<String> {
    let m = param.dimension();
    let mut obj = vec![Rational::zero(); prog.num_unknowns];
    for (i, c) in &prog.objective.terms {
        obj[*i] = c.clone();
    }
    let objective: Vec<Rational> = param
        .solution
        .basis
        .iter()
        .map(|d| {
            let mut acc = Rational::zero();
            for (i, v) in d {
                acc += &obj[*i] * v;
            }
            -acc
        })
        .collect();
    let mut entries = Vec::new();
    let x0 = &param.solution.particular;
    for (bi, mv) in prog.matrices.iter().enumerate() {
        let b = bi + 1;
        for i in 0..mv.size {
            for j in i..mv.size {
                let u = match mv.entry(i, j) {
                    Some(u) => u,
                    None => continue,
                };
                if !x0[u].is_zero() {
                    entries.push((0, b, i + 1, j + 1, -x0[u].clone()));
                }
            }
        }
    }
    for (k, d) in param.solution.basis.iter().enumerate() {
        for (bi, mv) in prog.matrices.iter().enumerate() {
            for i in 0..mv.size {
                for j in i..mv.size {
                    let u = match mv.entry(i, j) {
                        Some(u) => u,
                        None => continue,
                    };
                    if let Ok(p) = d.binary_search_by_key(&u, |(t, _)| *t) {
                        entries.push((k + 1, bi + 1, i + 1, j + 1, d[p].1.clone()));
                    }
                }
            }
        }
    }
    entries.sort_by_key(|a| (a.0, a.1, a.2, a.3));
    let problem = SdpaProblem {
        num_constraints: m,
        block_sizes: prog.matrices.iter().map(|mv| mv.size as i64).collect(),
        objective,
        entries,
    };
    Ok(problem.to_string_sdpa())
}

fn clean(line: &str) -> String {
    line.chars()
        .map(|c| if "{}(),".contains(c) { ' ' } else { c })
        .collect()
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parses SDPA sparse format. Comment lines before the header start with
/// `"` or `*`.
pub fn import_sdpa(src: &str) -> Result<SdpaProblem> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('"') && !t.starts_with('*')
        });
    let total_lines = src.lines().count();
    let mut header = |what: &str| -> Result<(usize, String)> {
        lines
            .next()
            .map(|(n, l)| (n, clean(l)))
            .ok_or_else(|| Error::Parse {
                line: total_lines + 1,
                msg: format!("unexpected end of input, expected {what}"),
            })
    };
    let (ln, l) = header("the number of constraints")?;
    let m: usize = parse_num(
        l.split_whitespace().next().unwrap_or(""),
        ln,
        "constraint count",
    )?;
    let (ln, l) = header("the number of blocks")?;
    let nb: usize = parse_num(l.split_whitespace().next().unwrap_or(""), ln, "block count")?;
    let (ln, l) = header("the block sizes")?;
    let block_sizes: Vec<i64> = l
        .split_whitespace()
        .take(nb)
        .map(|t| parse_num(t, ln, "block size"))
        .collect::<Result<_>>()?;
    if block_sizes.len() != nb || block_sizes.contains(&0) {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected {nb} nonzero block sizes"),
        });
    }
    let (ln, l) = header("the objective vector")?;
    let objective: Vec<Rational> = l
        .split_whitespace()
        .take(m)
        .map(|t| {
            parse_rational(t).map_err(|_| Error::Parse {
                line: ln,
                msg: format!("invalid number `{t}`"),
            })
        })
        .collect::<Result<_>>()?;
    if objective.len() != m {
        return Err(Error::Parse {
            line: ln,
            msg: format!("expected {m} objective entries, found {}", objective.len()),
        });
    }
    let mut entries = Vec::new();
    for (ln, l) in lines {
        let l = clean(l);
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(Error::Parse {
                line: ln,
                msg: format!(
                    "expected `matno block i j value`, found {} fields",
                    toks.len()
                ),
            });
        }
        let matno: usize = parse_num(toks[0], ln, "matrix number")?;
        let blk: usize = parse_num(toks[1], ln, "block number")?;
        let i: usize = parse_num(toks[2], ln, "row index")?;
        let j: usize = parse_num(toks[3], ln, "column index")?;
        let v = parse_rational(toks[4]).map_err(|_| Error::Parse {
            line: ln,
            msg: format!("invalid number `{}`", toks[4]),
        })?;
        if matno > m || blk == 0 || blk > nb {
            return Err(Error::Parse {
                line: ln,
                msg: format!("matrix {matno} block {blk} out of range"),
            });
        }
        let size = block_sizes[blk - 1];
        let n = size.unsigned_abs() as usize;
        if i == 0 || j == 0 || i > n || j > n || (size < 0 && i != j) {
            return Err(Error::Parse {
                line: ln,
                msg: format!("entry ({i},{j}) outside block {blk} of size {size}"),
            });
        }
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        entries.push((matno, blk, i, j, v));
    }
    Ok(SdpaProblem {
        num_constraints: m,
        block_sizes,
        objective,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    const SMALL: &str = "\"a comment\n1\n2\n{1, -2}\n-1\n0 1 1 1 -5\n1 1 1 1 -1\n1 2 2 2 0.5\n";

    #[test]
    fn roundtrip() {
        let p = import_sdpa(SMALL).unwrap();
        assert_eq!(p.num_constraints, 1);
        assert_eq!(p.block_sizes, vec![1, -2]);
        assert_eq!(p.entries.len(), 3);
        assert_eq!(p.entries[2].4, rat(1, 2));
        let again = import_sdpa(&p.to_string_sdpa()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn truncated_reports_line() {
        match import_sdpa("1\n2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match import_sdpa("1\n1\n1\n1\n0 1 1") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn value_format() {
        assert_eq!(fmt_value(&rat(-3, 40)), "-0.075");
        assert_eq!(fmt_value(&rat(7, 1)), "7");
        assert!(fmt_value(&rat(1, 3)).starts_with("3.33333"));
    }

    #[test]
    fn lmi_from_sdpa() {
        // min -y s.t. 5 - y >= 0 in SDPA form: F_1 = -1, F_0 = -5, c = -1
        let p = import_sdpa("1\n1\n1\n-1\n0 1 1 1 -5\n1 1 1 1 -1\n").unwrap();
        let lmi = p.to_lmi::<f64>(53);
        let r = super::super::solve_lmi(&lmi, &Default::default());
        assert!((r.y[0] - 5.0).abs() < 1e-6);
    }
}
