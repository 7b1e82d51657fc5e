use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{ExactScalar, Field, Matrix, OrderedField, Rational, Ring};

/// Ambient space of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Sphere,
    Projective,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Sphere => write!(f, "sphere"),
            Space::Projective => write!(f, "projective"),
        }
    }
}

impl From<Space> for crate::kernels::Parity {
    fn from(s: Space) -> Self {
        match s {
            Space::Sphere => crate::kernels::Parity::Sphere,
            Space::Projective => crate::kernels::Parity::Projective,
        }
    }
}

/// A finite code on `S^{n-1}` or `RP^{n-1}`.
///
/// Points are stored as lifts that need not have unit length: each stored
/// vector carries its exact squared norm, and every quantity is computed
/// for the normalized vector. Codes whose coordinates leave the quadratic
/// field are stored by their Gram matrix alone.
///
/// An antipodal sphere code stores one point of each antipodal pair.
#[derive(Clone, Debug)]
pub struct Code {
    pub name: String,
    /// Dimension of the ambient sphere `S^{n-1}`.
    pub n: usize,
    pub space: Space,
    pub antipodal: bool,
    /// Quadratic context shared by all coordinates, if any.
    pub q: Option<Rational>,
    /// Stored lifts, when coordinates are available.
    pub points: Option<Vec<Vec<ExactScalar>>>,
    norms: Vec<ExactScalar>,
    raw_gram: Matrix<ExactScalar>,
}

impl Code {
    /// Builds a code from coordinates. Vectors may have any nonzero length.
    pub fn from_points(
        name: impl Into<String>,
        n: usize,
        space: Space,
        antipodal: bool,
        points: Vec<Vec<ExactScalar>>,
    ) -> Result<Self> {
        let q = ExactScalar::check_context(points.iter().flatten())?;
        let dim = points.first().map_or(0, |p| p.len());
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch(
                "points of different lengths".into(),
            ));
        }
        if dim < n {
            return Err(Error::DimensionMismatch(format!(
                "points have {dim} coordinates but the code lives in dimension {n}"
            )));
        }
        let m = points.len();
        let raw_gram = Matrix::from_fn(m, m, |i, j| dot(&points[i], &points[j]));
        let norms: Vec<ExactScalar> = (0..m).map(|i| raw_gram.get(i, i).clone()).collect();
        if norms.iter().any(|r| r.sgn() <= 0) {
            return Err(Error::InvalidArgument("zero vector in code".into()));
        }
        let code = Code {
            name: name.into(),
            n,
            space,
            antipodal: antipodal && space == Space::Sphere,
            q,
            points: Some(points),
            norms,
            raw_gram,
        };
        code.check_distinct()?;
        Ok(code)
    }

    /// Builds a code from the Gram matrix of unit vectors.
    pub fn from_gram(
        name: impl Into<String>,
        n: usize,
        space: Space,
        antipodal: bool,
        gram: Matrix<ExactScalar>,
    ) -> Result<Self> {
        gram.ensure_symmetric()?;
        let q = ExactScalar::check_context(gram.data())?;
        let one = ExactScalar::from_int(1);
        if (0..gram.rows()).any(|i| gram.get(i, i) != &one) {
            return Err(Error::InvalidArgument("Gram diagonal must be 1".into()));
        }
        let code = Code {
            name: name.into(),
            n,
            space,
            antipodal: antipodal && space == Space::Sphere,
            q,
            points: None,
            norms: vec![one; gram.rows()],
            raw_gram: gram,
        };
        code.check_distinct()?;
        Ok(code)
    }

    fn check_distinct(&self) -> Result<()> {
        let one = ExactScalar::from_int(1);
        for i in 0..self.stored_len() {
            for j in 0..i {
                let s = self.sq_inner(i, j);
                let same_line = s == one;
                let clash = match (self.space, self.antipodal) {
                    (Space::Projective, _) | (Space::Sphere, true) => same_line,
                    (Space::Sphere, false) => same_line && self.raw_gram.get(i, j).sgn() > 0,
                };
                if clash {
                    return Err(Error::InvalidArgument(format!(
                        "points {j} and {i} coincide (or are antipodal in a line code)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of stored lifts.
    pub fn stored_len(&self) -> usize {
        self.norms.len()
    }

    /// Code size `N`: lines for projective codes, points for sphere codes.
    pub fn len(&self) -> usize {
        if self.antipodal {
            2 * self.stored_len()
        } else {
            self.stored_len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn norms(&self) -> &[ExactScalar] {
        &self.norms
    }

    pub fn raw_gram(&self) -> &Matrix<ExactScalar> {
        &self.raw_gram
    }

    /// Squared inner product of the normalized stored lifts `i`, `j`.
    pub fn sq_inner(&self, i: usize, j: usize) -> ExactScalar {
        let g = self.raw_gram.get(i, j);
        (g.clone() * g)
            .div(&(self.norms[i].clone() * &self.norms[j]))
            .expect("nonzero norms")
    }

    /// Sign of the inner product of stored lifts `i`, `j`.
    pub fn inner_sign(&self, i: usize, j: usize) -> i8 {
        self.raw_gram.get(i, j).sgn()
    }

    /// Inner product of the normalized stored lifts, if it lies in the field.
    pub fn inner(&self, i: usize, j: usize) -> Option<ExactScalar> {
        let g = self.raw_gram.get(i, j);
        if i == j {
            return Some(ExactScalar::from_int(1));
        }
        let den = self.norms[i].clone() * &self.norms[j];
        let root = den.sqrt(self.q.as_ref())?;
        g.div(&root)
    }

    /// Normalized Gram matrix of the stored lifts when it lies in the field.
    pub fn gram(&self) -> Option<Matrix<ExactScalar>> {
        let m = self.stored_len();
        let mut out = Matrix::zeros(m, m);
        for i in 0..m {
            for j in 0..=i {
                let v = self.inner(i, j)?;
                out.set(i, j, v.clone());
                out.set(j, i, v);
            }
        }
        Some(out)
    }

    /// `sum_i x_i x_j ... ` product `<x_i,x_j><x_j,x_k><x_k,x_i>` of normalized lifts.
    pub fn triple_product(&self, i: usize, j: usize, k: usize) -> ExactScalar {
        let num =
            self.raw_gram.get(i, j).clone() * self.raw_gram.get(j, k) * self.raw_gram.get(k, i);
        let den = self.norms[i].clone() * &self.norms[j] * &self.norms[k];
        num.div(&den).expect("nonzero norms")
    }

    /// Sphere code with both members of each antipodal pair stored.
    pub fn expanded(&self) -> Code {
        if !self.antipodal {
            return self.clone();
        }
        let m = self.stored_len();
        let sign = |i: usize| if i < m { 1 } else { -1 };
        let raw_gram = Matrix::from_fn(2 * m, 2 * m, |i, j| {
            let g = self.raw_gram.get(i % m, j % m).clone();
            if sign(i) * sign(j) < 0 {
                -g
            } else {
                g
            }
        });
        let points = self.points.as_ref().map(|pts| {
            let mut v = pts.clone();
            v.extend(pts.iter().map(|p| p.iter().map(|x| -x.clone()).collect()));
            v
        });
        let mut norms = self.norms.clone();
        norms.extend(self.norms.iter().cloned());
        Code {
            name: self.name.clone(),
            n: self.n,
            space: Space::Sphere,
            antipodal: false,
            q: self.q.clone(),
            points,
            norms,
            raw_gram,
        }
    }

    /// The line configuration of an antipodal sphere code, or the sphere
    /// code of one lift per line.
    pub fn with_space(&self, space: Space) -> Code {
        let mut c = self.clone();
        c.space = space;
        c.antipodal = false;
        c
    }

    /// Flips the sign of selected lifts; all projective quantities are
    /// unchanged.
    pub fn relift(&self, flips: &[bool]) -> Code {
        let m = self.stored_len();
        let s = |i: usize| flips.get(i).copied().unwrap_or(false);
        let raw_gram = Matrix::from_fn(m, m, |i, j| {
            let g = self.raw_gram.get(i, j).clone();
            if s(i) != s(j) {
                -g
            } else {
                g
            }
        });
        let points = self.points.as_ref().map(|pts| {
            pts.iter()
                .enumerate()
                .map(|(i, p)| {
                    if s(i) {
                        p.iter().map(|x| -x.clone()).collect()
                    } else {
                        p.clone()
                    }
                })
                .collect()
        });
        Code {
            raw_gram,
            points,
            ..self.clone()
        }
    }

    /// Drops stored lift `i`.
    pub fn remove_point(&self, i: usize) -> Code {
        let keep: Vec<usize> = (0..self.stored_len()).filter(|&j| j != i).collect();
        Code {
            name: format!("{}-minus-{i}", self.name),
            points: self
                .points
                .as_ref()
                .map(|p| keep.iter().map(|&j| p[j].clone()).collect()),
            norms: keep.iter().map(|&j| self.norms[j].clone()).collect(),
            raw_gram: self.raw_gram.principal(&keep),
            ..self.clone()
        }
    }

    /// Writes the code file format: a JSON header line, then one JSON
    /// array per line (coordinates, or Gram rows for Gram-defined codes).
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let header = CodeHeader {
            name: self.name.clone(),
            n: self.n,
            space: self.space,
            q: self.q.as_ref().map(|q| q.to_string()),
            antipodal: self.antipodal,
            gram: self.points.is_none(),
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        match &self.points {
            Some(pts) => {
                for p in pts {
                    writeln!(w, "{}", serde_json::to_string(p)?)?;
                }
            }
            None => {
                for i in 0..self.stored_len() {
                    let row: Vec<&ExactScalar> = (0..self.stored_len())
                        .map(|j| self.raw_gram.get(i, j))
                        .collect();
                    writeln!(w, "{}", serde_json::to_string(&row)?)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf8")
    }

    pub fn read_from(r: impl BufRead) -> Result<Code> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| {
            l.as_ref().map_or(true, |s| {
                !s.trim().is_empty() && !s.trim_start().starts_with('#')
            })
        });
        let (_, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header: CodeHeader = serde_json::from_str(&first?).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let mut rows = Vec::new();
        for (no, line) in lines {
            let v: Vec<ExactScalar> = serde_json::from_str(&line?).map_err(|e| Error::Parse {
                line: no + 1,
                msg: e.to_string(),
            })?;
            rows.push(v);
        }
        if header.gram {
            let m = Matrix::from_rows(rows)?;
            Code::from_gram(header.name, header.n, header.space, header.antipodal, m)
        } else {
            Code::from_points(header.name, header.n, header.space, header.antipodal, rows)
        }
    }

    pub fn from_file_str(s: &str) -> Result<Code> {
        Code::read_from(std::io::Cursor::new(s))
    }
}

#[derive(Serialize, Deserialize)]
struct CodeHeader {
    #[serde(default)]
    name: String,
    n: usize,
    space: Space,
    #[serde(default)]
    q: Option<String>,
    #[serde(default)]
    antipodal: bool,
    #[serde(default)]
    gram: bool,
}

pub(crate) fn dot(a: &[ExactScalar], b: &[ExactScalar]) -> ExactScalar {
    let mut acc = ExactScalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + &(x.clone() * y);
        }
    }
    acc
}
