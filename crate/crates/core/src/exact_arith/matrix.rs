use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::scalar::{denominator_lcm, OrderedField, Rational, Ring};
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type ExactMatrix = Matrix<super::ExactScalar>;
pub type RationalMatrix = Matrix<Rational>;

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// All-ones matrix.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, n, |_, _| T::one())
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// First asymmetric position, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.asymmetry().is_none()
    }

    pub fn ensure_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if let Some((row, col)) = self.asymmetry() {
            return Err(Error::NotSymmetric { row, col });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    acc = acc + &(a.clone() * o.get(k, j));
                }
            }
            acc
        }))
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows.min(self.cols) {
            acc = acc + self.get(i, i);
        }
        acc
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| {
            self.get(idx[i], idx[j]).clone()
        })
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }
}

/// Berkowitz algorithm. Returns the coefficients of `det(xI - m)` in
/// ascending order. Uses ring operations only.
pub fn berkowitz<T: Ring>(m: &Matrix<T>) -> Vec<T> {
    let n = m.rows;
    if n == 0 {
        return vec![T::one()];
    }
    // descending coefficient vector of the leading r x r charpoly
    let mut v: Vec<T> = vec![T::one(), -m.get(0, 0).clone()];
    for r in 1..n {
        // column of the Toeplitz factor: 1, -a_rr, -R C, -R A C, ...
        let mut col: Vec<T> = Vec::with_capacity(r + 2);
        col.push(T::one());
        col.push(-m.get(r, r).clone());
        let mut x: Vec<T> = (0..r).map(|i| m.get(i, r).clone()).collect();
        for k in 0..r {
            let mut dot = T::zero();
            for (j, xj) in x.iter().enumerate() {
                let a = m.get(r, j);
                if !a.is_zero() && !xj.is_zero() {
                    dot = dot + &(a.clone() * xj);
                }
            }
            col.push(-dot);
            if k + 1 < r {
                x = (0..r)
                    .map(|i| {
                        let mut acc = T::zero();
                        for (j, xj) in x.iter().enumerate() {
                            let a = m.get(i, j);
                            if !a.is_zero() && !xj.is_zero() {
                                acc = acc + &(a.clone() * xj);
                            }
                        }
                        acc
                    })
                    .collect();
            }
        }
        let mut nv = Vec::with_capacity(r + 2);
        for i in 0..(r + 2) {
            let mut acc = T::zero();
            for j in 0..=i.min(r) {
                if !v[j].is_zero() && !col[i - j].is_zero() {
                    acc = acc + &(col[i - j].clone() * &v[j]);
                }
            }
            nv.push(acc);
        }
        v = nv;
    }
    v.reverse();
    v
}

/// Characteristic polynomial `det(xI - m)`, ascending coefficients.
pub fn charpoly<T: Ring>(m: &Matrix<T>) -> Result<Vec<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(berkowitz(m))
}

/// Fields whose symmetric matrices admit a PSD decision via the sign test.
pub trait PsdField: OrderedField {
    /// Signs of the coefficients of `det(xI - m)` (ascending).
    fn charpoly_signs(m: &Matrix<Self>) -> Vec<i8> {
        berkowitz(m).iter().map(|c| c.sgn()).collect()
    }
}

impl PsdField for super::ExactScalar {}

impl PsdField for Rational {
    /// Clears denominators and runs the division-free algorithm over the
    /// integers; scaling by a positive constant does not change signs.
    fn charpoly_signs(m: &Matrix<Self>) -> Vec<i8> {
        let l = denominator_lcm(m.data.iter());
        let im: Matrix<BigInt> = m.map(|x| (x * Rational::from_integer(l.clone())).to_integer());
        berkowitz(&im)
            .iter()
            .map(|c| match c.sign() {
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
                num_bigint::Sign::Plus => 1,
            })
            .collect()
    }
}

/// Connected components of the nonzero pattern of a symmetric matrix.
pub fn diagonal_blocks<T: Ring>(m: &Matrix<T>) -> Vec<Vec<usize>> {
    let n = m.rows;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if !m.get(i, j).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Sign test: a real symmetric matrix with charpoly p is PSD iff the
/// coefficients of `(-1)^d p(-x)` are all nonnegative.
fn sign_test(signs: &[i8]) -> bool {
    let d = signs.len() - 1;
    signs.iter().enumerate().all(|(i, &s)| {
        // coefficient of x^i in (-1)^d p(-x) is (-1)^(d+i) c_i
        let flip = if (d + i).is_multiple_of(2) { 1 } else { -1 };
        s * flip >= 0
    })
}

/// Pivoted LDL^T decision: repeatedly eliminate the largest diagonal entry.
pub fn ldl_psd<T: OrderedField>(m: &Matrix<T>) -> bool {
    let mut a = m.clone();
    let mut active: Vec<usize> = (0..m.rows).collect();
    while !active.is_empty() {
        let mut best: Option<usize> = None;
        for (pos, &i) in active.iter().enumerate() {
            let d = a.get(i, i);
            if d.sgn() < 0 {
                return false;
            }
            match best {
                None => best = Some(pos),
                Some(b) => {
                    let bi = active[b];
                    if (d.clone() - a.get(bi, bi)).sgn() > 0 {
                        best = Some(pos);
                    }
                }
            }
        }
        let pos = best.expect("nonempty");
        let p = active[pos];
        let piv = a.get(p, p).clone();
        if piv.sgn() == 0 {
            // every remaining diagonal entry is zero; the rest must vanish
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| a.get(i, j).is_zero()));
        }
        active.remove(pos);
        let inv = piv.inv().expect("nonzero pivot");
        let col: Vec<T> = active.iter().map(|&i| a.get(i, p).clone()).collect();
        for (x, &i) in active.iter().enumerate() {
            if col[x].is_zero() {
                continue;
            }
            let f = col[x].clone() * &inv;
            for (y, &j) in active.iter().enumerate() {
                if col[y].is_zero() {
                    continue;
                }
                let v = a.get(i, j).clone() - &(f.clone() * &col[y]);
                a.set(i, j, v);
            }
        }
    }
    true
}

/// Exact PSD decision for a symmetric matrix; zero eigenvalues count as PSD.
///
/// The matrix is split into irreducible diagonal blocks; each block is
/// decided by the characteristic polynomial sign test and cross-checked by a
/// pivoted LDL^T elimination. Disagreement is reported as an error.
pub fn psd_check<T: PsdField>(m: &Matrix<T>) -> Result<bool> {
    m.ensure_symmetric()?;
    for block in diagonal_blocks(m) {
        let b = m.principal(&block);
        let by_charpoly = sign_test(&T::charpoly_signs(&b));
        let by_ldl = ldl_psd(&b);
        if by_charpoly != by_ldl {
            return Err(Error::Solver(format!(
                "PSD tests disagree on a block of size {} (charpoly {by_charpoly}, LDL {by_ldl})",
                block.len()
            )));
        }
        if !by_charpoly {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Frobenius inner product `sum a_ij b_ij` of two symmetric matrices.
pub fn mat_inner<T: Ring>(a: &Matrix<T>, b: &Matrix<T>) -> Result<T> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    a.ensure_symmetric()?;
    b.ensure_symmetric()?;
    let mut acc = T::zero();
    for (x, y) in a.data.iter().zip(&b.data) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + &(x.clone() * y);
        }
    }
    Ok(acc)
}

/// Determinant via Berkowitz.
pub fn det<T: Ring>(m: &Matrix<T>) -> Result<T> {
    let p = charpoly(m)?;
    let c0 = p[0].clone();
    Ok(if m.rows.is_multiple_of(2) { c0 } else { -c0 })
}
