use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codes::{energy, triple_distribution, Code, Convention, Space, EVEN_FLIPS};
use crate::error::{Error, Result};
use crate::exact_arith::{
    int, rational_string, row_basis, ExactMatrix, ExactScalar, LinearEquation, Matrix,
    OrderedField, Rational, Ring, SparseVec,
};
use crate::kernels::{t_blocks, KernelMatrix};
use crate::polynomials::{Exponent, TriPoly, UniPoly, PERMUTATIONS};

use super::monomials;

/// What a matrix unknown stands for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixRole {
    /// `F_k`, paired with the kernel `T_k`.
    Kernel { k: usize },
    /// The Gram matrix `M` of the sum of squares.
    Sos,
    /// Gram matrix of a sum of squares multiplied by a polynomial that is
    /// nonnegative on the domain.
    Multiplier {
        index: usize,
        weight: TriPoly,
        monomials: Vec<Exponent>,
    },
}

/// A symmetric matrix whose entries are scalar unknowns (possibly shared).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixVar {
    pub role: MatrixRole,
    pub size: usize,
    /// Row-major unknown index of each entry; `None` for structural zeros.
    pub entries: Vec<Option<usize>>,
}

impl MatrixVar {
    pub fn entry(&self, i: usize, j: usize) -> Option<usize> {
        self.entries[i * self.size + j]
    }

    pub fn assemble(&self, x: &[Rational]) -> Matrix<Rational> {
        Matrix::from_fn(self.size, self.size, |i, j| match self.entry(i, j) {
            Some(u) => x[u].clone(),
            None => int(0),
        })
    }
}

/// A principal submatrix that must be PSD. Submatrices that are
/// permutation copies of listed ones are omitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdBlock {
    pub label: String,
    pub matrix: usize,
    pub indices: Vec<usize>,
    /// Rational vectors (over `indices`) that every feasible point
    /// annihilates.
    #[serde(with = "dense_vecs")]
    pub forced_kernel: Vec<Vec<Rational>>,
}

/// One support class of the target code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportTriple {
    pub values: [ExactScalar; 3],
    pub count: u64,
}

/// Linear objective `constant + sum coef * x[var]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    #[serde(with = "crate::exact_arith::sparse_vec")]
    pub terms: SparseVec,
    #[serde(with = "rational_string")]
    pub constant: Rational,
}

impl Objective {
    pub fn value(&self, x: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (i, c) in &self.terms {
            acc += c * &x[*i];
        }
        acc
    }
}

/// Build options beyond the basic data.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramOptions {
    /// Add sums of squares weighted by `3 - u^2 - v^2 - t^2` and
    /// `1 + 2uvt - u^2 - v^2 - t^2`, both nonnegative on the domain.
    pub putinar: bool,
}

/// The dual three-point program over the unknowns `c`, `F_k`, `M`.
///
/// Unknown 0 is `c`. The sum of squares matrix is invariant under
/// permutations of `u, v, t` (and, for projective codes, under even sign
/// changes), which is no loss of generality because both sides of the
/// identity are.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualProgram {
    pub n_points: usize,
    pub n: usize,
    pub space: Space,
    pub f0: UniPoly,
    pub blocks: Vec<usize>,
    pub sos_degree: u32,
    pub options: ProgramOptions,
    pub monomials: Vec<Exponent>,
    pub max_degree: u32,
    pub num_unknowns: usize,
    pub matrices: Vec<MatrixVar>,
    pub psd_blocks: Vec<PsdBlock>,
    pub equations: Vec<LinearEquation>,
    pub objective: Objective,
    pub support: Vec<SupportTriple>,
    #[serde(with = "opt_rational")]
    pub target: Option<Rational>,
}

/// An exact dual solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "rational_string")]
    pub c: Rational,
    #[serde(with = "rational_matrices")]
    pub f: Vec<Matrix<Rational>>,
    #[serde(with = "rational_matrix")]
    pub m: Matrix<Rational>,
    #[serde(with = "rational_matrices", default)]
    pub multipliers: Vec<Matrix<Rational>>,
    pub monomial_order: Vec<Exponent>,
}

impl Certificate {
    /// The dual bound `(N/2)((N-1)c - <F_0, J>)`.
    pub fn bound(&self, n_points: usize) -> Rational {
        let f0 = self
            .f
            .first()
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(0, 0));
        bound_value(&self.c, &f0, n_points)
    }
}

/// `(N/2)((N-1)c - <F_0, J>)`.
pub fn bound_value(c: &Rational, f0: &Matrix<Rational>, n_points: usize) -> Rational {
    let n = int(n_points as i64);
    let sum: Rational = f0.data().iter().sum();
    (&n / int(2)) * ((&n - int(1)) * c - sum)
}

/// `(f0(u^2) + f0(v^2) + f0(t^2)) / 3`, or with `f0(u)` on spheres.
pub fn potential_average(space: Space, f0: &UniPoly) -> TriPoly {
    let g = match space {
        Space::Projective => {
            let mut c = vec![int(0); 2 * f0.coeffs().len()];
            for (i, a) in f0.coeffs().iter().enumerate() {
                c[2 * i] = a.clone();
            }
            UniPoly::new(c)
        }
        Space::Sphere => f0.clone(),
    };
    let mut acc = TriPoly::zero();
    for i in 0..3 {
        acc = &acc + &TriPoly::from_uni(&g, i);
    }
    acc.scale(&Rational::new(1.into(), 3.into()))
}

/// Symmetry group of the identity: permutations, and even sign changes
/// for projective codes.
pub fn symmetry_images(space: Space, p: &[ExactScalar; 3]) -> Vec<[ExactScalar; 3]> {
    let flips: &[[i8; 3]] = match space {
        Space::Sphere => &EVEN_FLIPS[..1],
        Space::Projective => &EVEN_FLIPS,
    };
    let mut out: Vec<[ExactScalar; 3]> = Vec::new();
    for f in flips {
        for perm in PERMUTATIONS {
            let img: [ExactScalar; 3] = std::array::from_fn(|i| {
                let x = p[perm[i]].clone();
                if f[perm[i]] < 0 {
                    -x
                } else {
                    x
                }
            });
            if !out.contains(&img) {
                out.push(img);
            }
        }
    }
    out
}

fn permute_exp(e: Exponent, perm: [usize; 3]) -> Exponent {
    let a = [e.0, e.1, e.2];
    (a[perm[0]], a[perm[1]], a[perm[2]])
}

fn add_exp(a: Exponent, b: Exponent) -> Exponent {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

fn is_sorted_exp(e: Exponent) -> bool {
    e.0 >= e.1 && e.1 >= e.2
}

/// Sign-character class of a monomial: monomials in different classes never
/// pair up in an invariant Gram matrix.
fn sign_class(space: Space, e: Exponent) -> (u32, u32) {
    match space {
        Space::Sphere => (0, 0),
        Space::Projective => ((e.0 ^ e.1) & 1, (e.0 ^ e.2) & 1),
    }
}

/// Monomial values `x^e` at a point.
fn monomial_values(mons: &[Exponent], p: &[ExactScalar; 3]) -> Vec<ExactScalar> {
    let maxd = mons
        .iter()
        .map(|e| e.0.max(e.1).max(e.2))
        .max()
        .unwrap_or(0);
    let pows: Vec<Vec<ExactScalar>> = p
        .iter()
        .map(|x| {
            let mut v = vec![ExactScalar::from_int(1)];
            for _ in 0..maxd {
                let next = v.last().unwrap().clone() * x;
                v.push(next);
            }
            v
        })
        .collect();
    mons.iter()
        .map(|e| pows[0][e.0 as usize].clone() * &pows[1][e.1 as usize] * &pows[2][e.2 as usize])
        .collect()
}

/// Unknown allocation for a Gram matrix with orbit tying.
fn gram_var(role: MatrixRole, space: Space, mons: &[Exponent], next: &mut usize) -> MatrixVar {
    let s = mons.len();
    let pos: BTreeMap<Exponent, usize> = mons.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut entries = vec![None; s * s];
    for a in 0..s {
        for b in a..s {
            if sign_class(space, mons[a]) != sign_class(space, mons[b]) {
                continue;
            }
            let key = PERMUTATIONS
                .iter()
                .filter_map(|&perm| {
                    let pa = *pos.get(&permute_exp(mons[a], perm))?;
                    let pb = *pos.get(&permute_exp(mons[b], perm))?;
                    Some((pa.min(pb), pa.max(pb)))
                })
                .min()
                .expect("identity permutation");
            let id = *ids.entry(key).or_insert_with(|| {
                *next += 1;
                *next - 1
            });
            entries[a * s + b] = Some(id);
            entries[b * s + a] = Some(id);
        }
    }
    MatrixVar {
        role,
        size: s,
        entries,
    }
}

/// Class blocks of a Gram matrix that must be checked; for projective codes
/// the classes `(1,0)` and `(0,1)` are permutation copies of `(1,1)`.
fn gram_blocks(space: Space, mons: &[Exponent]) -> Vec<((u32, u32), Vec<usize>)> {
    let keep: Vec<(u32, u32)> = match space {
        Space::Sphere => vec![(0, 0)],
        Space::Projective => vec![(0, 0), (1, 1)],
    };
    keep.into_iter()
        .map(|cl| {
            let idx: Vec<usize> = (0..mons.len())
                .filter(|&i| sign_class(space, mons[i]) == cl)
                .collect();
            (cl, idx)
        })
        .filter(|(_, idx)| !idx.is_empty())
        .collect()
}

/// Splits exact equation data into its rational and `sqrt(q)` parts.
fn push_split(
    out: &mut Vec<LinearEquation>,
    terms: &BTreeMap<usize, ExactScalar>,
    rhs: &ExactScalar,
    label: &str,
) {
    let rat_terms: Vec<(usize, Rational)> = terms
        .iter()
        .filter(|(_, c)| !c.a.is_zero())
        .map(|(i, c)| (*i, c.a.clone()))
        .collect();
    let irr_terms: Vec<(usize, Rational)> = terms
        .iter()
        .filter(|(_, c)| !c.b.is_zero())
        .map(|(i, c)| (*i, c.b.clone()))
        .collect();
    if !rat_terms.is_empty() || !rhs.a.is_zero() {
        out.push(LinearEquation::new(rat_terms, rhs.a.clone(), label));
    }
    if !irr_terms.is_empty() || !rhs.b.is_zero() {
        out.push(LinearEquation::new(
            irr_terms,
            rhs.b.clone(),
            format!("{label} (sqrt part)"),
        ));
    }
}

pub(crate) fn in_domain(p: &[ExactScalar; 3]) -> bool {
    let one = ExactScalar::from_int(1);
    if p.iter().any(|x| x.square() >= one) {
        return false;
    }
    let det = one.clone() + &(p[0].clone() * &p[1] * &p[2] * &ExactScalar::from_int(2))
        - &p[0].square()
        - &p[1].square()
        - &p[2].square();
    det.sgn() >= 0
}

impl DualProgram {
    /// The kernel matrices `T_k` for the program's blocks.
    pub fn kernels(&self) -> Result<Vec<KernelMatrix>> {
        t_blocks(self.space.into(), self.n, self.n_points, &self.blocks)
    }

    pub fn kernel_matrices(&self) -> impl Iterator<Item = (usize, &MatrixVar)> {
        self.matrices.iter().filter_map(|m| match m.role {
            MatrixRole::Kernel { k } => Some((k, m)),
            _ => None,
        })
    }

    pub fn sos_matrix(&self) -> &MatrixVar {
        self.matrices
            .iter()
            .find(|m| m.role == MatrixRole::Sos)
            .expect("program has a sum of squares block")
    }

    /// Unknowns that appear in some PSD block.
    pub fn block_unknowns(&self) -> Vec<bool> {
        let mut used = vec![false; self.num_unknowns];
        for m in &self.matrices {
            for u in m.entries.iter().flatten() {
                used[*u] = true;
            }
        }
        used
    }

    /// Builds the exact certificate from a full assignment of the unknowns.
    pub fn assemble(&self, x: &[Rational]) -> Result<Certificate> {
        if x.len() != self.num_unknowns {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} unknowns",
                x.len(),
                self.num_unknowns
            )));
        }
        let mut f = Vec::new();
        let mut m = None;
        let mut multipliers = Vec::new();
        for mv in &self.matrices {
            let a = mv.assemble(x);
            match mv.role {
                MatrixRole::Kernel { .. } => f.push(a),
                MatrixRole::Sos => m = Some(a),
                MatrixRole::Multiplier { .. } => multipliers.push(a),
            }
        }
        Ok(Certificate {
            c: x[0].clone(),
            f,
            m: m.expect("sum of squares block"),
            multipliers,
            monomial_order: self.monomials.clone(),
        })
    }

    /// Value and first-derivative equations at the given domain triples.
    pub fn tangency_constraints(
        &self,
        triples: &[[ExactScalar; 3]],
    ) -> Result<Vec<LinearEquation>> {
        let kernels = self.kernels()?;
        tangency_equations(self, &kernels, triples)
    }

    /// Serializes as deterministic JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn tangency_equations(
    prog: &DualProgram,
    kernels: &[KernelMatrix],
    triples: &[[ExactScalar; 3]],
) -> Result<Vec<LinearEquation>> {
    let lhs = potential_average(prog.space, &prog.f0);
    let mut out = Vec::new();
    for p in triples {
        if !in_domain(p) {
            return Err(Error::InvalidArgument(format!(
                "triple ({}, {}, {}) is outside the domain",
                p[0], p[1], p[2]
            )));
        }
        ExactScalar::check_context(p.iter())?;
        let pt = [&p[0], &p[1], &p[2]];
        let name = format!("({}, {}, {})", p[0], p[1], p[2]);
        for d in 0..4 {
            let (label, lhs_d): (String, TriPoly) = if d == 0 {
                (format!("value at {name}"), lhs.clone())
            } else {
                (format!("d/dx{} at {name}", d - 1), lhs.partial(d - 1))
            };
            let mut terms: BTreeMap<usize, ExactScalar> = BTreeMap::new();
            if d == 0 {
                terms.insert(0, ExactScalar::from_int(1));
            }
            for (kern, (_, mv)) in kernels.iter().zip(prog.kernel_matrices()) {
                for i in 0..mv.size {
                    for j in 0..mv.size {
                        let u = match mv.entry(i, j) {
                            Some(u) => u,
                            None => continue,
                        };
                        let e = kern.entry(i, j);
                        let poly = if d == 0 { e.clone() } else { e.partial(d - 1) };
                        let val = poly.eval(pt);
                        if val.is_zero() {
                            continue;
                        }
                        let slot = terms.entry(u).or_insert_with(ExactScalar::zero);
                        *slot = slot.clone() + &val;
                    }
                }
            }
            terms.retain(|_, v| !v.is_zero());
            push_split(&mut out, &terms, &lhs_d.eval(pt), &label);
        }
    }
    Ok(out)
}

/// Builds the dual program. With a target code the complementary slackness,
/// forced zeros of the sum of squares and tangency conditions of that code
/// are added, and the code's energy becomes the program's target.
#[allow(clippy::too_many_arguments)]
pub fn build_dual_program(
    n_points: usize,
    n: usize,
    space: Space,
    f0: &UniPoly,
    blocks: &[usize],
    sos_degree: u32,
    target_code: Option<&Code>,
) -> Result<DualProgram> {
    build_dual_program_with(
        n_points,
        n,
        space,
        f0,
        blocks,
        sos_degree,
        target_code,
        &ProgramOptions::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn build_dual_program_with(
    n_points: usize,
    n: usize,
    space: Space,
    f0: &UniPoly,
    blocks: &[usize],
    sos_degree: u32,
    target_code: Option<&Code>,
    options: &ProgramOptions,
) -> Result<DualProgram> {
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "three-point bounds need N >= 3, got {n_points}"
        )));
    }
    if n < 3 && !blocks.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "kernels need n >= 3, got {n}"
        )));
    }
    if let Some(code) = target_code {
        if code.len() != n_points || code.n != n || code.space != space {
            return Err(Error::InvalidArgument(format!(
                "target code `{}` has N = {}, n = {}, space {} but the program has N = {n_points}, n = {n}, space {space}",
                code.name,
                code.len(),
                code.n,
                code.space
            )));
        }
    }
    let kernels = t_blocks(space.into(), n, n_points, blocks)?;
    let lhs = potential_average(space, f0);
    let mons = monomials(sos_degree);

    // unknowns
    let mut next = 1usize;
    let mut matrices = Vec::new();
    for (k, &d) in blocks.iter().enumerate() {
        let mut entries = vec![None; d * d];
        for i in 0..d {
            for j in i..d {
                entries[i * d + j] = Some(next);
                entries[j * d + i] = Some(next);
                next += 1;
            }
        }
        matrices.push(MatrixVar {
            role: MatrixRole::Kernel { k },
            size: d,
            entries,
        });
    }
    matrices.push(gram_var(MatrixRole::Sos, space, &mons, &mut next));
    if options.putinar && sos_degree >= 1 {
        let u = TriPoly::var(0);
        let v = TriPoly::var(1);
        let t = TriPoly::var(2);
        let sq = &(&(&u * &u) + &(&v * &v)) + &(&t * &t);
        let g1 = &TriPoly::constant(int(3)) - &sq;
        let g2 = &(&TriPoly::constant(int(1)) + &(&(&u * &v) * &t).scale(&int(2))) - &sq;
        let low = monomials(sos_degree - 1);
        for (index, weight) in [g1, g2].into_iter().enumerate() {
            matrices.push(gram_var(
                MatrixRole::Multiplier {
                    index,
                    weight,
                    monomials: low.clone(),
                },
                space,
                &low,
                &mut next,
            ));
        }
    }
    let num_unknowns = next;

    let kernel_deg = kernels.iter().map(|k| k.degree()).max().unwrap_or(0);
    let lhs_deg = lhs.total_degree().unwrap_or(0);
    let sos_top = matrices
        .iter()
        .map(|m| match &m.role {
            MatrixRole::Sos => 2 * sos_degree,
            MatrixRole::Multiplier { weight, .. } => {
                2 * (sos_degree - 1) + weight.total_degree().unwrap_or(0)
            }
            MatrixRole::Kernel { .. } => 0,
        })
        .max()
        .unwrap_or(0);
    if lhs_deg > kernel_deg.max(sos_top) {
        return Err(Error::DegreeMismatch(format!(
            "potential average has degree {lhs_deg} but the kernels reach {kernel_deg} and the squares {sos_top}"
        )));
    }
    let max_degree = kernel_deg.max(sos_top).max(lhs_deg);

    // coefficient matching over sorted monomials
    let mut rows: BTreeMap<Exponent, BTreeMap<usize, Rational>> = BTreeMap::new();
    let mut add = |e: Exponent, u: usize, c: Rational| {
        if is_sorted_exp(e) {
            let slot = rows
                .entry(e)
                .or_default()
                .entry(u)
                .or_insert_with(|| int(0));
            *slot += c;
        }
    };
    add((0, 0, 0), 0, int(1));
    let mut kern_iter = kernels.iter();
    for mv in &matrices {
        match &mv.role {
            MatrixRole::Kernel { .. } => {
                let kern = kern_iter.next().expect("one kernel per block");
                for i in 0..mv.size {
                    for j in 0..mv.size {
                        let u = mv.entry(i, j).expect("dense");
                        for (e, c) in kern.entry(i, j).terms() {
                            add(*e, u, c.clone());
                        }
                    }
                }
            }
            MatrixRole::Sos => {
                for a in 0..mv.size {
                    for b in 0..mv.size {
                        if let Some(u) = mv.entry(a, b) {
                            add(add_exp(mons[a], mons[b]), u, int(1));
                        }
                    }
                }
            }
            MatrixRole::Multiplier {
                weight, monomials, ..
            } => {
                for a in 0..mv.size {
                    for b in 0..mv.size {
                        if let Some(u) = mv.entry(a, b) {
                            let base = add_exp(monomials[a], monomials[b]);
                            for (e, c) in weight.terms() {
                                add(add_exp(base, *e), u, c.clone());
                            }
                        }
                    }
                }
            }
        }
    }
    let mut equations = Vec::new();
    let mut all_sorted: Vec<Exponent> = Vec::new();
    for i in 0..=max_degree {
        for j in 0..=i {
            for k in 0..=j {
                if i + j + k <= max_degree {
                    all_sorted.push((i, j, k));
                }
            }
        }
    }
    all_sorted.sort();
    for e in all_sorted {
        let rhs = lhs.coeff(e);
        let terms: Vec<(usize, Rational)> = rows
            .get(&e)
            .map(|r| {
                r.iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(u, c)| (*u, c.clone()))
                    .collect()
            })
            .unwrap_or_default();
        if terms.is_empty() {
            if !rhs.is_zero() {
                return Err(Error::DegreeMismatch(format!(
                    "coefficient of u^{} v^{} t^{} cannot be matched",
                    e.0, e.1, e.2
                )));
            }
            continue;
        }
        equations.push(LinearEquation::new(
            terms,
            rhs,
            format!("coefficient of u^{} v^{} t^{}", e.0, e.1, e.2),
        ));
    }

    // objective (N/2)((N-1)c - <F_0, J>)
    let half_n = Rational::new((n_points as i64).into(), 2.into());
    let mut obj: BTreeMap<usize, Rational> = BTreeMap::new();
    obj.insert(0, &half_n * int(n_points as i64 - 1));
    if let Some(mv) = matrices
        .first()
        .filter(|m| m.role == MatrixRole::Kernel { k: 0 })
    {
        for u in mv.entries.iter().flatten() {
            *obj.entry(*u).or_insert_with(|| int(0)) -= &half_n;
        }
    }
    let objective = Objective {
        terms: obj.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        constant: int(0),
    };

    let mut support = Vec::new();
    let mut target = None;
    let mut kernel_vectors: Vec<Vec<Vec<Rational>>> = vec![Vec::new(); matrices.len()];
    if let Some(code) = target_code {
        let dist = triple_distribution(code)?;
        for cl in dist.domain_classes() {
            let values = cl.values.clone().ok_or_else(|| {
                Error::Unsupported(format!(
                    "inner products of `{}` leave the quadratic field",
                    code.name
                ))
            })?;
            support.push(SupportTriple {
                values,
                count: cl.count,
            });
        }
        let conv = match space {
            Space::Projective => Convention::Hat,
            Space::Sphere => Convention::Tilde,
        };
        let e = energy(code, f0, conv)?;
        target = Some(e.as_rational().cloned().ok_or_else(|| {
            Error::Unsupported(format!("energy {e} of `{}` is irrational", code.name))
        })?);

        // complementary slackness F_k Y_k = 0
        let nn2 = ExactScalar::from_int((n_points * (n_points - 2)) as i64);
        for (mi, (kern, mv)) in kernels.iter().zip(&matrices).enumerate() {
            let d = mv.size;
            let k = kern.k;
            let mut y: ExactMatrix = if k == 0 {
                Matrix::from_fn(d, d, |_, _| nn2.clone())
            } else {
                Matrix::zeros(d, d)
            };
            for s in &support {
                let val =
                    crate::kernels::eval_kernel(kern, [&s.values[0], &s.values[1], &s.values[2]])?;
                y = y.add(&val.scale(&ExactScalar::from_int(s.count as i64)))?;
            }
            for i in 0..d {
                for j in 0..d {
                    let mut terms: BTreeMap<usize, ExactScalar> = BTreeMap::new();
                    for l in 0..d {
                        let c = y.get(l, j);
                        if c.is_zero() {
                            continue;
                        }
                        let u = mv.entry(i, l).expect("dense");
                        let slot = terms.entry(u).or_insert_with(ExactScalar::zero);
                        *slot = slot.clone() + c;
                    }
                    terms.retain(|_, v| !v.is_zero());
                    if !terms.is_empty() {
                        push_split(
                            &mut equations,
                            &terms,
                            &ExactScalar::zero(),
                            &format!("slackness F_{k} Y_{k} entry ({i},{j})"),
                        );
                    }
                }
            }
            let cols: Vec<Vec<Rational>> = (0..d)
                .flat_map(|j| {
                    let a: Vec<Rational> = (0..d).map(|i| y.get(i, j).a.clone()).collect();
                    let b: Vec<Rational> = (0..d).map(|i| y.get(i, j).b.clone()).collect();
                    [a, b]
                })
                .collect();
            kernel_vectors[mi] = row_basis(&cols);
        }

        // zeros of the sums of squares at the support and its images
        for (mi, mv) in matrices.iter().enumerate() {
            let (mon, weight) = match &mv.role {
                MatrixRole::Sos => (&mons, None),
                MatrixRole::Multiplier {
                    weight, monomials, ..
                } => (monomials, Some(weight)),
                MatrixRole::Kernel { .. } => continue,
            };
            let mut vecs: Vec<Vec<Rational>> = Vec::new();
            let mut rep_vecs: Vec<Vec<Rational>> = Vec::new();
            for s in &support {
                if let Some(w) = weight {
                    let p = &s.values;
                    if w.eval([&p[0], &p[1], &p[2]]).is_zero() {
                        continue;
                    }
                }
                for (im_no, img) in symmetry_images(space, &s.values).into_iter().enumerate() {
                    let z = monomial_values(mon, &img);
                    let a: Vec<Rational> = z.iter().map(|x| x.a.clone()).collect();
                    let b: Vec<Rational> = z.iter().map(|x| x.b.clone()).collect();
                    for part in [a, b] {
                        if part.iter().any(|x| !x.is_zero()) {
                            if im_no == 0 {
                                rep_vecs.push(part.clone());
                            }
                            vecs.push(part);
                        }
                    }
                }
            }
            kernel_vectors[mi] = row_basis(&vecs);
            // invariance of the Gram matrix carries the representatives'
            // equations to all images
            for (vi, kv) in row_basis(&rep_vecs).iter().enumerate() {
                for a in 0..mv.size {
                    let mut terms: BTreeMap<usize, Rational> = BTreeMap::new();
                    for (b, x) in kv.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        if let Some(u) = mv.entry(a, b) {
                            *terms.entry(u).or_insert_with(|| int(0)) += x;
                        }
                    }
                    let terms: Vec<(usize, Rational)> =
                        terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                    if !terms.is_empty() {
                        equations.push(LinearEquation::new(
                            terms,
                            int(0),
                            format!("zero of square block {mi} along vector {vi}, row {a}"),
                        ));
                    }
                }
            }
        }
    }

    let mut prog = DualProgram {
        n_points,
        n,
        space,
        f0: f0.clone(),
        blocks: blocks.to_vec(),
        sos_degree,
        options: options.clone(),
        monomials: mons.clone(),
        max_degree,
        num_unknowns,
        matrices,
        psd_blocks: Vec::new(),
        equations,
        objective,
        support,
        target,
    };
    if !prog.support.is_empty() {
        let reps: Vec<[ExactScalar; 3]> = prog.support.iter().map(|s| s.values.clone()).collect();
        let tangency = tangency_equations(&prog, &kernels, &reps)?;
        prog.equations.extend(tangency);
    }

    // PSD blocks with their forced kernels
    let mut psd_blocks = Vec::new();
    for (mi, mv) in prog.matrices.iter().enumerate() {
        let (label, parts): (String, Vec<((u32, u32), Vec<usize>)>) = match &mv.role {
            MatrixRole::Kernel { k } => (format!("F_{k}"), vec![((0, 0), (0..mv.size).collect())]),
            MatrixRole::Sos => ("M".into(), gram_blocks(space, &mons)),
            MatrixRole::Multiplier {
                index, monomials, ..
            } => (format!("G_{index}"), gram_blocks(space, monomials)),
        };
        for (cl, idx) in parts {
            if idx.is_empty() {
                continue;
            }
            let forced: Vec<Vec<Rational>> = kernel_vectors[mi]
                .iter()
                .map(|v| idx.iter().map(|&i| v[i].clone()).collect::<Vec<Rational>>())
                .filter(|v| v.iter().any(|x| !x.is_zero()))
                .collect();
            let label = match mv.role {
                MatrixRole::Kernel { .. } => label.clone(),
                _ => format!("{label} class {}{}", cl.0, cl.1),
            };
            psd_blocks.push(PsdBlock {
                label,
                matrix: mi,
                indices: idx,
                forced_kernel: row_basis(&forced),
            });
        }
    }
    prog.psd_blocks = psd_blocks;
    Ok(prog)
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|r| r.to_string()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| crate::exact_arith::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub(crate) mod dense_vecs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[Vec<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let out: Vec<Vec<String>> = v
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|s| {
                        crate::exact_arith::parse_rational(&s).map_err(serde::de::Error::custom)
                    })
                    .collect()
            })
            .collect()
    }
}

pub(crate) mod rational_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &Matrix<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Matrix<Rational>, D::Error> {
        let rows = dense_vecs::deserialize(d)?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, 0));
        }
        Matrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod rational_matrices {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "rational_matrix")] Matrix<Rational>);

    pub fn serialize<S: Serializer>(
        v: &[Matrix<Rational>],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let w: Vec<Wrap> = v.iter().cloned().map(Wrap).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Matrix<Rational>>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?
            .into_iter()
            .map(|w| w.0)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::monomials;
    use crate::codes::{orthogonal_lines, rhombic7};
    use crate::exact_arith::rat;

    fn small() -> DualProgram {
        let code = orthogonal_lines(3, 3).unwrap();
        let f = UniPoly::from_ints(&[0, 1]);
        build_dual_program(3, 3, Space::Projective, &f, &[2, 1], 2, Some(&code)).unwrap()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(0), vec![(0, 0, 0)]);
        assert_eq!(monomials(2).len(), 10);
        assert_eq!(monomials(7).len(), 120);
    }

    #[test]
    fn layout_of_a_small_program() {
        let p = small();
        assert_eq!(p.matrices.len(), 3);
        assert_eq!(p.kernel_matrices().count(), 2);
        assert_eq!(p.sos_matrix().size, p.monomials.len());
        assert_eq!(p.target, Some(int(0)));
        assert!(p
            .equations
            .iter()
            .any(|e| e.label.starts_with("coefficient")));
        assert!(p.equations.iter().any(|e| e.label.starts_with("slackness")));
        for m in &p.matrices {
            for i in 0..m.size {
                for j in 0..m.size {
                    assert_eq!(m.entry(i, j), m.entry(j, i));
                }
            }
        }
    }

    #[test]
    fn assembled_certificates_are_symmetric() {
        let p = small();
        let x: Vec<Rational> = (0..p.num_unknowns).map(|i| rat(i as i64, 7)).collect();
        let c = p.assemble(&x).unwrap();
        assert_eq!(c.c, x[0]);
        assert!(c.f.iter().all(|f| f.is_symmetric()));
        assert!(c.m.is_symmetric());
        assert_eq!(p.objective.value(&x), c.bound(3));
    }

    #[test]
    fn json_round_trip() {
        let p = small();
        let s = p.to_json().unwrap();
        assert_eq!(DualProgram::from_json(&s).unwrap(), p);
    }

    #[test]
    fn bound_formula() {
        let f0 = Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(2)]]).unwrap();
        // (7/2)(6 * 2 - 5)
        assert_eq!(bound_value(&int(2), &f0, 7), rat(49, 2));
    }

    #[test]
    fn symmetry_orbits() {
        let s = ExactScalar::rational(rat(1, 3));
        let z = ExactScalar::from_int(0);
        let p = [s.clone(), s.clone(), z.clone()];
        assert_eq!(symmetry_images(Space::Sphere, &p).len(), 3);
        // (-s, -s, 0) and the six arrangements of (s, -s, 0)
        assert_eq!(symmetry_images(Space::Projective, &p).len(), 12);
    }

    #[test]
    fn rhombic_support_and_target() {
        let code = rhombic7().unwrap();
        let f = UniPoly::from_ints(&[0, 0, 1]);
        let p = build_dual_program(7, 3, Space::Projective, &f, &[2, 2], 3, Some(&code)).unwrap();
        assert_eq!(p.target, Some(rat(38, 27)));
        let total: u64 = p.support.iter().map(|s| s.count).sum();
        assert_eq!(total, 210);
        assert!(p.support.iter().all(|s| in_domain(&s.values)));
    }
}
