use serde::{Deserialize, Serialize};

use super::dense::RMat;
use super::ipm::Lmi;
use super::real::Real;
use crate::bounds::DualProgram;
use crate::error::{Error, Result};
use crate::exact_arith::{row_basis, solve_affine, AffineSolution, Rational, SparseVec};
use num_traits::Zero;

/// The affine solution set of a program's linear equations, restricted to
/// directions that move a PSD block or the objective. The free unknowns of
/// the remaining directions are fixed at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineParameterization {
    pub solution: AffineSolution,
    pub fixed: Vec<usize>,
}

impl AffineParameterization {
    pub fn dimension(&self) -> usize {
        self.solution.dimension()
    }

    pub fn evaluate(&self, lambda: &[Rational]) -> Result<Vec<Rational>> {
        self.solution.evaluate(lambda)
    }
}

/// Solves the equations of `prog` exactly and keeps the useful directions.
pub fn parameterize(prog: &DualProgram) -> Result<AffineParameterization> {
    let full = solve_affine(prog.num_unknowns, &prog.equations)?;
    let used = prog.block_unknowns();
    let mut objective = vec![Rational::zero(); prog.num_unknowns];
    for (i, c) in &prog.objective.terms {
        objective[*i] = c.clone();
    }
    let mut free = Vec::new();
    let mut basis = Vec::new();
    let mut fixed = Vec::new();
    for (f, b) in full.free.iter().zip(full.basis) {
        let moves = b.iter().any(|(i, _)| used[*i] || !objective[*i].is_zero());
        if moves {
            free.push(*f);
            basis.push(b);
        } else {
            fixed.push(*f);
        }
    }
    Ok(AffineParameterization {
        solution: AffineSolution {
            num_unknowns: full.num_unknowns,
            particular: full.particular,
            free,
            basis,
        },
        fixed,
    })
}

/// How the numeric solve chooses a point in the feasible set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Maximize the program's objective.
    Objective,
    /// Maximize the smallest eigenvalue over all reduced blocks, with the
    /// total trace bounded.
    Interior { trace_bound: f64 },
}

/// Exact null space of `rows` (as columns of length `n`).
fn null_space(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let rref = row_basis(rows);
    let pivots: Vec<usize> = rref
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
        .collect();
    let mut out = Vec::new();
    for f in 0..n {
        if pivots.contains(&f) {
            continue;
        }
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::from_integer(1.into());
        for (r, &p) in rref.iter().zip(&pivots) {
            v[p] = -r[f].clone();
        }
        out.push(v);
    }
    out
}

/// Orthonormal columns spanning the same space, by modified Gram-Schmidt
/// applied twice.
fn orthonormalize<T: Real>(vecs: &[Vec<Rational>], prec: u32) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    for v in vecs {
        let mut w: Vec<T> = v.iter().map(|x| T::from_rational(x, prec)).collect();
        for _ in 0..2 {
            for q in &out {
                let mut d = T::zero(prec);
                for (a, b) in w.iter().zip(q) {
                    d.mul_add_assign(a, b);
                }
                for (a, b) in w.iter_mut().zip(q) {
                    let p = d.clone() * b;
                    *a -= &p;
                }
            }
        }
        let mut nn = T::zero(prec);
        for a in &w {
            nn.mul_add_assign(a, a);
        }
        let nrm = nn.sqrt();
        if nrm.to_f64() > 1e-12 {
            out.push(w.into_iter().map(|a| a / &nrm).collect());
        }
    }
    out
}

/// The blocks of the LMI: reduced PSD blocks `V^T B V`.
pub struct LmiLayout {
    pub labels: Vec<String>,
    /// Number of program directions (the first entries of `y`).
    pub directions: usize,
    /// Index of the auxiliary eigenvalue variable in interior mode.
    pub eigen_var: Option<usize>,
}

fn block_matrix(
    prog: &DualProgram,
    block: usize,
    values: &SparseVec,
    dense: Option<&[Rational]>,
) -> Vec<Rational> {
    let b = &prog.psd_blocks[block];
    let mv = &prog.matrices[b.matrix];
    let k = b.indices.len();
    let lookup = |u: usize| -> Rational {
        match dense {
            Some(x) => x[u].clone(),
            None => values
                .binary_search_by_key(&u, |(i, _)| *i)
                .map(|p| values[p].1.clone())
                .unwrap_or_else(|_| Rational::zero()),
        }
    };
    let mut out = vec![Rational::zero(); k * k];
    for (p, &i) in b.indices.iter().enumerate() {
        for (q, &j) in b.indices.iter().enumerate() {
            if let Some(u) = mv.entry(i, j) {
                out[p * k + q] = lookup(u);
            }
        }
    }
    out
}

fn reduce<T: Real>(v: &[Vec<T>], k: usize, m: &[Rational], prec: u32) -> RMat<T> {
    let r = v.len();
    let mt: Vec<T> = m.iter().map(|x| T::from_rational(x, prec)).collect();
    // W = M V  (k x r)
    let mut w = vec![T::zero(prec); k * r];
    for p in 0..k {
        for q in 0..k {
            if m[p * k + q].is_zero() {
                continue;
            }
            let a = &mt[p * k + q];
            for (c, col) in v.iter().enumerate() {
                w[p * r + c].mul_add_assign(a, &col[q]);
            }
        }
    }
    let mut out = RMat::zeros(r, prec);
    for a in 0..r {
        for b in a..r {
            let mut acc = T::zero(prec);
            for p in 0..k {
                acc.mul_add_assign(&v[a][p], &w[p * r + b]);
            }
            out.set(b, a, acc.clone());
            out.set(a, b, acc);
        }
    }
    out
}

/// Builds the numeric LMI in the parameters `lambda` (and, in interior
/// mode, the auxiliary eigenvalue bound).
pub fn build_lmi<T: Real>(
    prog: &DualProgram,
    param: &AffineParameterization,
    mode: SolveMode,
    prec: u32,
) -> Result<(Lmi<T>, LmiLayout)> {
    let dirs = &param.solution.basis;
    let m = dirs.len();
    let mut sizes = Vec::new();
    let mut labels = Vec::new();
    let mut c = Vec::new();
    let mut a: Vec<Vec<(usize, RMat<T>)>> = vec![Vec::new(); m];
    for (bi, blk) in prog.psd_blocks.iter().enumerate() {
        let k = blk.indices.len();
        let comp = if blk.forced_kernel.is_empty() {
            (0..k)
                .map(|i| {
                    let mut e = vec![Rational::zero(); k];
                    e[i] = Rational::from_integer(1.into());
                    e
                })
                .collect()
        } else {
            null_space(&blk.forced_kernel, k)
        };
        let v: Vec<Vec<T>> = orthonormalize(&comp, prec);
        if v.is_empty() {
            continue;
        }
        let slot = sizes.len();
        sizes.push(v.len());
        labels.push(blk.label.clone());
        let b0 = block_matrix(prog, bi, &Vec::new(), Some(&param.solution.particular));
        c.push(reduce(&v, k, &b0, prec));
        for (i, d) in dirs.iter().enumerate() {
            let bd = block_matrix(prog, bi, d, None);
            if bd.iter().all(|x| x.is_zero()) {
                continue;
            }
            let neg: Vec<Rational> = bd.into_iter().map(|x| -x).collect();
            a[i].push((slot, reduce(&v, k, &neg, prec)));
        }
    }
    let mut obj = vec![Rational::zero(); prog.num_unknowns];
    for (i, coef) in &prog.objective.terms {
        obj[*i] = coef.clone();
    }
    let mut b: Vec<T> = Vec::with_capacity(m + 1);
    let mut eigen_var = None;
    match mode {
        SolveMode::Objective => {
            for d in dirs {
                let mut acc = Rational::zero();
                for (i, v) in d {
                    acc += &obj[*i] * v;
                }
                b.push(T::from_rational(&acc, prec));
            }
        }
        SolveMode::Interior { trace_bound } => {
            if !(trace_bound > 0.0) {
                return Err(Error::InvalidArgument(
                    "trace bound must be positive".into(),
                ));
            }
            b.extend((0..m).map(|_| T::zero(prec)));
            b.push(T::one(prec));
            let ident: Vec<(usize, RMat<T>)> = sizes
                .iter()
                .enumerate()
                .map(|(s, &n)| (s, RMat::identity(n, prec)))
                .collect();
            eigen_var = Some(m);
            // trace row: R - sum tr(C_b) + sum lambda_i sum_b tr(A_ib) >= 0
            let tslot = sizes.len();
            let mut ctr = T::from_f64(trace_bound, prec);
            for cb in &c {
                ctr -= &cb.trace();
            }
            for ai in a.iter_mut() {
                let mut t = T::zero(prec);
                for (_, mat) in ai.iter() {
                    t += &mat.trace();
                }
                ai.push((
                    tslot,
                    RMat {
                        n: 1,
                        data: vec![-t],
                    },
                ));
            }
            a.push(ident);
            sizes.push(1);
            labels.push("trace".into());
            c.push(RMat {
                n: 1,
                data: vec![ctr],
            });
        }
    }
    Ok((
        Lmi { sizes, c, a, b },
        LmiLayout {
            labels,
            directions: m,
            eigen_var,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat};

    #[test]
    fn null_space_basis() {
        let rows = vec![vec![int(1), int(1), int(0)]];
        let ns = null_space(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&v[0] + &v[1]).is_zero());
        }
        let q: Vec<Vec<f64>> = orthonormalize(&ns, 53);
        assert_eq!(q.len(), 2);
        let d: f64 = q[0].iter().zip(&q[1]).map(|(a, b)| a * b).sum();
        assert!(d.abs() < 1e-12);
        assert_eq!(null_space(&[vec![rat(1, 2)]], 1).len(), 0);
    }
}
