use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::scalar::{rational_vec, Rational};
use crate::error::{Error, Result};

/// Sparse vector as sorted `(index, value)` pairs.
pub type SparseVec = Vec<(usize, Rational)>;

/// `sum coef * x[var] = rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearEquation {
    #[serde(with = "sparse_vec")]
    pub terms: Vec<(usize, Rational)>,
    #[serde(with = "super::scalar::rational_string")]
    pub rhs: Rational,
    pub label: String,
}

impl LinearEquation {
    pub fn new(terms: Vec<(usize, Rational)>, rhs: Rational, label: impl Into<String>) -> Self {
        LinearEquation {
            terms,
            rhs,
            label: label.into(),
        }
    }

    pub fn residual(&self, x: &[Rational]) -> Rational {
        let mut acc = -self.rhs.clone();
        for (v, c) in &self.terms {
            acc += c * &x[*v];
        }
        acc
    }
}

/// Solution set `particular + span(basis)` of an affine system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineSolution {
    pub num_unknowns: usize,
    #[serde(with = "rational_vec")]
    pub particular: Vec<Rational>,
    /// Free unknown behind each basis direction.
    pub free: Vec<usize>,
    #[serde(with = "sparse_vecs")]
    pub basis: Vec<SparseVec>,
}

impl AffineSolution {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `particular + sum lambda_i basis_i`.
    pub fn evaluate(&self, lambda: &[Rational]) -> Result<Vec<Rational>> {
        if lambda.len() != self.basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for a {}-dimensional solution space",
                lambda.len(),
                self.basis.len()
            )));
        }
        let mut x = self.particular.clone();
        for (l, b) in lambda.iter().zip(&self.basis) {
            if l.is_zero() {
                continue;
            }
            for (i, v) in b {
                x[*i] += l * v;
            }
        }
        Ok(x)
    }

    /// Dense f64 copy of the basis, one column per parameter.
    pub fn basis_f64(&self) -> Vec<Vec<(usize, f64)>> {
        self.basis
            .iter()
            .map(|b| {
                b.iter()
                    .map(|(i, v)| (*i, super::rational_to_f64(v)))
                    .collect()
            })
            .collect()
    }
}

pub(crate) mod sparse_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &[(usize, Rational)],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let out: Vec<(usize, String)> = v.iter().map(|(i, r)| (*i, r.to_string())).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<SparseVec, D::Error> {
        let raw = Vec::<(usize, String)>::deserialize(d)?;
        raw.into_iter()
            .map(|(i, s)| {
                crate::exact_arith::parse_rational(&s)
                    .map(|r| (i, r))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

mod sparse_vecs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[SparseVec], s: S) -> std::result::Result<S::Ok, S::Error> {
        let out: Vec<Vec<(usize, String)>> = v
            .iter()
            .map(|b| b.iter().map(|(i, r)| (*i, r.to_string())).collect())
            .collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<SparseVec>, D::Error> {
        let raw = Vec::<Vec<(usize, String)>>::deserialize(d)?;
        raw.into_iter()
            .map(|b| {
                b.into_iter()
                    .map(|(i, s)| {
                        crate::exact_arith::parse_rational(&s)
                            .map(|r| (i, r))
                            .map_err(serde::de::Error::custom)
                    })
                    .collect()
            })
            .collect()
    }
}

struct PivotRow {
    entries: BTreeMap<usize, Rational>,
    rhs: Rational,
}

/// Incremental reduced row echelon form over the rationals.
///
/// Pivot rows are kept fully reduced: a pivot row mentions its own pivot
/// (implicitly with coefficient 1) and free columns only.
pub struct Elimination {
    num_unknowns: usize,
    pivots: HashMap<usize, PivotRow>,
    /// column -> pivot columns whose rows mention it
    occurs: HashMap<usize, BTreeSet<usize>>,
    equations_seen: usize,
}

impl Elimination {
    pub fn new(num_unknowns: usize) -> Self {
        Elimination {
            num_unknowns,
            pivots: HashMap::new(),
            occurs: HashMap::new(),
            equations_seen: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds one equation. Returns `Ok(true)` if it raised the rank.
    pub fn push(&mut self, eq: &LinearEquation) -> Result<bool> {
        let row_index = self.equations_seen;
        self.equations_seen += 1;
        let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in &eq.terms {
            if *v >= self.num_unknowns {
                return Err(Error::InvalidArgument(format!(
                    "equation `{}` references unknown {v} of {}",
                    eq.label, self.num_unknowns
                )));
            }
            if c.is_zero() {
                continue;
            }
            let e = row.entry(*v).or_insert_with(Rational::zero);
            *e += c;
            if e.is_zero() {
                row.remove(v);
            }
        }
        let mut rhs = eq.rhs.clone();
        let hits: Vec<(usize, Rational)> = row
            .iter()
            .filter(|(c, _)| self.pivots.contains_key(c))
            .map(|(c, v)| (*c, v.clone()))
            .collect();
        for (p, coef) in hits {
            row.remove(&p);
            let prow = &self.pivots[&p];
            rhs -= &coef * &prow.rhs;
            for (c, v) in &prow.entries {
                let e = row.entry(*c).or_insert_with(Rational::zero);
                *e -= &coef * v;
                if e.is_zero() {
                    row.remove(c);
                }
            }
        }
        if row.is_empty() {
            if rhs.is_zero() {
                return Ok(false);
            }
            return Err(Error::Inconsistent {
                row: row_index,
                label: eq.label.clone(),
                residual: rhs.to_string(),
            });
        }
        // fewest pivot rows touched, then smallest height, then smallest column
        let mut pcol = 0;
        let mut best: Option<(usize, u64)> = None;
        for (c, v) in &row {
            let fill = self.occurs.get(c).map_or(0, |s| s.len());
            let height = v.numer().bits() + v.denom().bits();
            let key = (fill, height);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
                pcol = *c;
            }
        }
        let pv = row.remove(&pcol).expect("pivot present");
        let inv = pv.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        rhs *= &inv;
        // eliminate the new pivot column from existing pivot rows
        if let Some(users) = self.occurs.remove(&pcol) {
            for q in users {
                let qrow = self.pivots.get_mut(&q).expect("pivot row");
                let f = match qrow.entries.remove(&pcol) {
                    Some(f) => f,
                    None => continue,
                };
                qrow.rhs -= &f * &rhs;
                for (c, v) in &row {
                    let e = qrow.entries.entry(*c).or_insert_with(Rational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        qrow.entries.remove(c);
                        if let Some(s) = self.occurs.get_mut(c) {
                            s.remove(&q);
                        }
                    } else {
                        self.occurs.entry(*c).or_default().insert(q);
                    }
                }
            }
        }
        for c in row.keys() {
            self.occurs.entry(*c).or_default().insert(pcol);
        }
        self.pivots.insert(pcol, PivotRow { entries: row, rhs });
        Ok(true)
    }

    pub fn solution(&self) -> AffineSolution {
        let n = self.num_unknowns;
        let mut particular = vec![Rational::zero(); n];
        for (p, row) in &self.pivots {
            particular[*p] = row.rhs.clone();
        }
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains_key(c)).collect();
        let basis = free
            .iter()
            .map(|&f| {
                let mut v: SparseVec = vec![(f, Rational::from_integer(1.into()))];
                if let Some(users) = self.occurs.get(&f) {
                    for p in users {
                        let coef = &self.pivots[p].entries[&f];
                        v.push((*p, -coef.clone()));
                    }
                }
                v.sort_by_key(|(i, _)| *i);
                v
            })
            .collect();
        AffineSolution {
            num_unknowns: n,
            particular,
            free,
            basis,
        }
    }
}

/// Exact particular solution and homogeneous basis of a rational system.
///
/// Sparse equations are eliminated first; an inconsistency is reported with
/// the index of the offending equation in the input.
pub fn solve_affine(num_unknowns: usize, equations: &[LinearEquation]) -> Result<AffineSolution> {
    let mut order: Vec<usize> = (0..equations.len()).collect();
    order.sort_by_key(|&i| equations[i].terms.len());
    let mut el = Elimination::new(num_unknowns);
    for i in order {
        el.push(&equations[i]).map_err(|e| match e {
            Error::Inconsistent {
                label, residual, ..
            } => Error::Inconsistent {
                row: i,
                label,
                residual,
            },
            other => other,
        })?;
    }
    Ok(el.solution())
}

/// Exact unique solution; errors when the system leaves freedom.
pub fn solve_unique(num_unknowns: usize, equations: &[LinearEquation]) -> Result<Vec<Rational>> {
    let sol = solve_affine(num_unknowns, equations)?;
    if !sol.basis.is_empty() {
        return Err(Error::Underdetermined(format!(
            "{} free unknowns remain (first: {})",
            sol.basis.len(),
            sol.free[0]
        )));
    }
    Ok(sol.particular)
}

/// Reduced row echelon basis of the span of dense rational rows.
pub fn row_basis(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = Rational::from_integer(1.into()) / &v[p];
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            basis.push((p, v));
        }
    }
    basis.sort_by_key(|(p, _)| *p);
    basis.into_iter().map(|(_, v)| v).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{int, rat};

    #[test]
    fn two_by_two() {
        let eqs = vec![
            LinearEquation::new(vec![(0, int(1)), (1, int(1))], int(1), "sum"),
            LinearEquation::new(vec![(0, int(1)), (1, int(-1))], int(0), "diff"),
        ];
        let s = solve_affine(2, &eqs).unwrap();
        assert_eq!(s.particular, vec![rat(1, 2), rat(1, 2)]);
        assert!(s.basis.is_empty());
    }

    #[test]
    fn trace_zero_has_two_directions() {
        // unknowns m11, m12, m22
        let eqs = vec![LinearEquation::new(
            vec![(0, int(1)), (2, int(1))],
            int(0),
            "trace",
        )];
        let s = solve_affine(3, &eqs).unwrap();
        assert_eq!(s.dimension(), 2);
        for l in [[int(3), int(-2)], [int(0), int(5)]] {
            let x = s.evaluate(&l).unwrap();
            assert!(eqs.iter().all(|e| e.residual(&x).is_zero()));
        }
    }

    #[test]
    fn inconsistency_reports_row() {
        let eqs = vec![
            LinearEquation::new(vec![(0, int(1))], int(1), "a"),
            LinearEquation::new(vec![(1, int(2))], int(0), "b"),
            LinearEquation::new(vec![(0, int(2)), (1, int(1))], int(5), "c"),
        ];
        match solve_affine(2, &eqs) {
            Err(Error::Inconsistent { row, label, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(label, "c");
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_absorbed() {
        let eqs = vec![
            LinearEquation::new(vec![(0, int(1)), (1, int(2)), (2, int(3))], int(6), "a"),
            LinearEquation::new(vec![(0, int(2)), (1, int(4)), (2, int(6))], int(12), "2a"),
            LinearEquation::new(vec![(1, int(1)), (2, int(-1))], int(0), "b"),
        ];
        let s = solve_affine(3, &eqs).unwrap();
        assert_eq!(s.dimension(), 1);
        let x = s.evaluate(&[rat(7, 3)]).unwrap();
        assert!(eqs.iter().all(|e| e.residual(&x).is_zero()));
        assert!(solve_unique(3, &eqs).is_err());
    }
}
