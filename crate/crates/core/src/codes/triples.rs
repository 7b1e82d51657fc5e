use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::code::{Code, Space};
use crate::error::{Error, Result};
use crate::exact_arith::{ExactScalar, OrderedField};
use crate::parallel;
use crate::polynomials::PERMUTATIONS;

/// The four sign patterns with an even number of flips.
pub const EVEN_FLIPS: [[i8; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];

/// Lexicographically largest image of `(u, v, t)` under permutations (and,
/// for projective codes, under negating two entries).
pub fn canonical_triple(space: Space, p: &[ExactScalar; 3]) -> [ExactScalar; 3] {
    let flips: &[[i8; 3]] = match space {
        Space::Sphere => &EVEN_FLIPS[..1],
        Space::Projective => &EVEN_FLIPS,
    };
    let mut best: Option<[ExactScalar; 3]> = None;
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
            if best.as_ref().is_none_or(|b| img > *b) {
                best = Some(img);
            }
        }
    }
    best.expect("nonempty")
}

/// One orbit of ordered point triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleClass {
    /// Canonical `(u, v, t)` when the inner products lie in the field.
    pub values: Option<[ExactScalar; 3]>,
    /// Squared inner products, nonincreasing.
    pub squares: [ExactScalar; 3],
    /// `u v t`.
    pub product: ExactScalar,
    /// Number of ordered point triples in the class.
    pub count: u64,
    /// Number of the three pairs made of coinciding points (or lines).
    pub coincident_pairs: u8,
}

impl TripleClass {
    /// Triples of pairwise distinct points.
    pub fn in_domain(&self) -> bool {
        self.coincident_pairs == 0
    }

    /// `1 + 2uvt - u^2 - v^2 - t^2`, the determinant of the 3x3 Gram matrix.
    pub fn gram_det(&self) -> ExactScalar {
        ExactScalar::from_int(1) + &(self.product.clone() * &ExactScalar::from_int(2))
            - &self.squares[0]
            - &self.squares[1]
            - &self.squares[2]
    }

    /// Whether an arbitrary value triple falls into this class.
    pub fn matches(&self, space: Space, p: &[ExactScalar; 3]) -> bool {
        match (&self.values, space) {
            (Some(v), _) => canonical_triple(space, p) == *v,
            (None, _) => {
                let mut sq: Vec<ExactScalar> = p.iter().map(|x| x.square()).collect();
                sq.sort();
                sq.reverse();
                sq.as_slice() == self.squares.as_slice()
                    && p[0].clone() * &p[1] * &p[2] == self.product
            }
        }
    }
}

/// Counts of ordered triples `(x, y, z)` by the orbit of
/// `(<x,y>, <x,z>, <y,z>)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleDistribution {
    pub n_points: usize,
    pub space: Space,
    /// Sorted by decreasing squares, then product.
    pub classes: Vec<TripleClass>,
}

type Key = (u16, u16, u16, i8);

/// Per-pair data: index of the value (or squared value) and the sign.
struct PairTable {
    values: Vec<ExactScalar>,
    index: Vec<u16>,
    sign: Vec<i8>,
    /// Whether the pair consists of one point (or line) twice.
    same: Vec<bool>,
    m: usize,
}

fn pair_table(code: &Code) -> Result<PairTable> {
    let m = code.stored_len();
    let mut raw: Vec<ExactScalar> = Vec::with_capacity(m * m);
    let mut sign = Vec::with_capacity(m * m);
    let mut same = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            match code.space {
                Space::Sphere => {
                    let u = code.inner(i, j).ok_or_else(|| {
                        Error::Unsupported(format!(
                            "inner product of points {i}, {j} of `{}` leaves the field",
                            code.name
                        ))
                    })?;
                    raw.push(u);
                    sign.push(1);
                }
                Space::Projective => {
                    raw.push(code.sq_inner(i, j));
                    sign.push(if i == j { 1 } else { code.inner_sign(i, j) });
                }
            }
            same.push(i == j);
        }
    }
    let mut values = raw.clone();
    values.sort();
    values.dedup();
    let index = raw
        .iter()
        .map(|x| values.binary_search(x).expect("present") as u16)
        .collect();
    Ok(PairTable {
        values,
        index,
        sign,
        same,
        m,
    })
}

fn sort3(mut a: [u16; 3]) -> [u16; 3] {
    a.sort_unstable_by(|x, y| y.cmp(x));
    a
}

/// Triple distribution of a code; antipodal sphere codes are expanded first.
pub fn triple_distribution(code: &Code) -> Result<TripleDistribution> {
    let code = code.expanded();
    let t = pair_table(&code)?;
    let m = t.m;
    let partial: Vec<HashMap<Key, (u64, (usize, usize, usize), u8)>> =
        parallel::map_range(m, |x| {
            let mut map: HashMap<Key, (u64, (usize, usize, usize), u8)> = HashMap::new();
            for y in 0..m {
                let xy = x * m + y;
                for z in 0..m {
                    let xz = x * m + z;
                    let yz = y * m + z;
                    let idx = sort3([t.index[xy], t.index[xz], t.index[yz]]);
                    let s = match code.space {
                        Space::Sphere => 1,
                        Space::Projective => t.sign[xy] * t.sign[xz] * t.sign[yz],
                    };
                    let coincident = t.same[xy] as u8 + t.same[xz] as u8 + t.same[yz] as u8;
                    let e = map.entry((idx[0], idx[1], idx[2], s)).or_insert((
                        0,
                        (x, y, z),
                        coincident,
                    ));
                    e.0 += 1;
                }
            }
            map
        });
    let mut merged: HashMap<Key, (u64, (usize, usize, usize), u8)> = HashMap::new();
    for map in partial {
        for (k, (c, w, co)) in map {
            let e = merged.entry(k).or_insert((0, w, co));
            e.0 += c;
            if w < e.1 {
                e.1 = w;
            }
        }
    }
    let mut classes: Vec<TripleClass> = merged
        .into_iter()
        .map(|(k, (count, (x, y, z), coincident_pairs))| {
            let vals = [
                &t.values[k.0 as usize],
                &t.values[k.1 as usize],
                &t.values[k.2 as usize],
            ];
            let (values, squares, product) = match code.space {
                Space::Sphere => {
                    let v = [vals[0].clone(), vals[1].clone(), vals[2].clone()];
                    let mut sq: Vec<ExactScalar> = v.iter().map(|a| a.square()).collect();
                    sq.sort();
                    sq.reverse();
                    let p = v[0].clone() * &v[1] * &v[2];
                    (Some(v), [sq[0].clone(), sq[1].clone(), sq[2].clone()], p)
                }
                Space::Projective => {
                    let squares = [vals[0].clone(), vals[1].clone(), vals[2].clone()];
                    let product = code.triple_product(x, y, z);
                    let values = projective_representative(&squares, &product, code.q.as_ref());
                    (values, squares, product)
                }
            };
            TripleClass {
                values,
                squares,
                product,
                count,
                coincident_pairs,
            }
        })
        .collect();
    classes.sort_by(|a, b| {
        b.squares
            .cmp(&a.squares)
            .then_with(|| b.product.cmp(&a.product))
            .then_with(|| b.values.cmp(&a.values))
    });
    Ok(TripleDistribution {
        n_points: code.len(),
        space: code.space,
        classes,
    })
}

/// `(a, b, sign * c)` from square roots `a >= b >= c`, the lexicographically
/// largest image under permutations and even sign changes.
fn projective_representative(
    squares: &[ExactScalar; 3],
    product: &ExactScalar,
    q: Option<&crate::exact_arith::Rational>,
) -> Option<[ExactScalar; 3]> {
    let a = squares[0].sqrt(q)?;
    let b = squares[1].sqrt(q)?;
    let c = squares[2].sqrt(q)?;
    let c = if product.sgn() < 0 { -c } else { c };
    Some([a, b, c])
}

/// One named identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub ok: bool,
}

impl TripleDistribution {
    /// Classes of pairwise distinct points.
    pub fn domain_classes(&self) -> impl Iterator<Item = &TripleClass> {
        self.classes.iter().filter(|c| c.in_domain())
    }

    pub fn total(&self) -> u64 {
        self.classes.iter().map(|c| c.count).sum()
    }

    pub fn domain_total(&self) -> u64 {
        self.domain_classes().map(|c| c.count).sum()
    }

    /// Count of the class containing the given value triple.
    pub fn count_of(&self, p: &[ExactScalar; 3]) -> u64 {
        self.classes
            .iter()
            .find(|c| c.matches(self.space, p))
            .map_or(0, |c| c.count)
    }

    /// The structural identities every triple distribution satisfies.
    pub fn identities(&self) -> Vec<IdentityCheck> {
        let n = self.n_points as u64;
        let mut out = Vec::new();
        let check = |name: &str, expected: u64, found: u64| IdentityCheck {
            name: name.into(),
            expected: expected.to_string(),
            found: found.to_string(),
            ok: expected == found,
        };
        let diag: u64 = self
            .classes
            .iter()
            .filter(|c| c.coincident_pairs == 3)
            .map(|c| c.count)
            .sum();
        out.push(check("A(1,1,1) = N", n, diag));
        // exactly two equal points: the pair (y, z) is coincident in one third
        let two: u64 = self
            .classes
            .iter()
            .filter(|c| c.coincident_pairs == 1)
            .map(|c| c.count)
            .sum();
        out.push(check("sum_u A(u,u,1) = N^2", n * n, diag + two / 3));
        out.push(check("sum A = N^3", n * n * n, self.total()));
        out.push(check(
            "sum over D = N(N-1)(N-2)",
            n * (n - 1) * (n - 2),
            self.domain_total(),
        ));
        let psd_ok = self.domain_classes().all(|c| c.gram_det().sgn() >= 0);
        let bad = self
            .domain_classes()
            .filter(|c| c.gram_det().sgn() < 0)
            .count() as u64;
        out.push(IdentityCheck {
            name: "Gram determinant >= 0 on the support".into(),
            expected: "0 violations".into(),
            found: format!("{bad} violations"),
            ok: psd_ok,
        });
        let incoherent = self
            .classes
            .iter()
            .filter(|c| c.coincident_pairs == 2)
            .count() as u64;
        out.push(check(
            "no triple with exactly two coincident pairs",
            0,
            incoherent,
        ));
        out
    }

    pub fn identities_hold(&self) -> bool {
        self.identities().iter().all(|c| c.ok)
    }
}

/// Direct triple count by brute force over exact values, used to
/// cross-check the indexed enumeration.
pub fn count_triples_direct(code: &Code, p: &[ExactScalar; 3]) -> Result<u64> {
    let code = code.expanded();
    let m = code.stored_len();
    let target = canonical_triple(code.space, p);
    let mut count = 0;
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let vals = match code.space {
                    Space::Sphere => [code.inner(x, y), code.inner(x, z), code.inner(y, z)],
                    Space::Projective => [
                        signed_inner(&code, x, y),
                        signed_inner(&code, x, z),
                        signed_inner(&code, y, z),
                    ],
                };
                let vals = match vals {
                    [Some(a), Some(b), Some(c)] => [a, b, c],
                    _ => return Err(Error::Unsupported("inner products leave the field".into())),
                };
                if canonical_triple(code.space, &vals) == target {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

fn signed_inner(code: &Code, i: usize, j: usize) -> Option<ExactScalar> {
    if i == j {
        return Some(ExactScalar::from_int(1));
    }
    code.inner(i, j).or_else(|| {
        let s = code.sq_inner(i, j).sqrt(code.q.as_ref())?;
        Some(if code.inner_sign(i, j) < 0 { -s } else { s })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::catalog::{orthogonal_lines, rhombic7};
    use crate::exact_arith::{int, rat};

    fn sc(r: crate::exact_arith::Rational) -> ExactScalar {
        ExactScalar::rational(r)
    }

    #[test]
    fn canonical_examples() {
        let t = [sc(rat(-1, 3)), sc(rat(-1, 3)), sc(rat(-1, 3))];
        assert_eq!(
            canonical_triple(Space::Projective, &t),
            [sc(rat(1, 3)), sc(rat(1, 3)), sc(rat(-1, 3))]
        );
        assert_eq!(canonical_triple(Space::Sphere, &t), t);
    }

    #[test]
    fn orthogonal_frame() {
        let d = triple_distribution(&orthogonal_lines(3, 3).unwrap()).unwrap();
        let dom: Vec<&TripleClass> = d.domain_classes().collect();
        assert_eq!(dom.len(), 1);
        assert_eq!(dom[0].count, 6);
        assert_eq!(dom[0].values, Some([sc(int(0)), sc(int(0)), sc(int(0))]));
        assert!(d.identities_hold());
    }

    #[test]
    fn rhombic_classes_match_direct_count() {
        let c = rhombic7().unwrap();
        let d = triple_distribution(&c).unwrap();
        assert_eq!(d.domain_total(), 210);
        for cl in d.domain_classes() {
            let v = cl.values.clone().unwrap();
            assert_eq!(count_triples_direct(&c, &v).unwrap(), cl.count);
        }
    }

    #[test]
    fn rhombic_counts() {
        let d = triple_distribution(&rhombic7().unwrap()).unwrap();
        let s3 = ExactScalar::sqrt_of(&rat(1, 3)).unwrap();
        let z = sc(int(0));
        let third = sc(rat(1, 3));
        let reps = [
            ([z.clone(), z.clone(), z.clone()], 6),
            ([-third.clone(), -third.clone(), -third.clone()], 24),
            ([-third.clone(), s3.clone(), s3.clone()], 36),
            ([s3.clone(), s3.clone(), z.clone()], 72),
            ([third.clone(), s3.clone(), s3.clone()], 72),
        ];
        for (p, c) in &reps {
            assert_eq!(d.count_of(p), *c);
        }
        assert_eq!(d.domain_classes().count(), 5);
        assert!(d.identities_hold());
    }
}
