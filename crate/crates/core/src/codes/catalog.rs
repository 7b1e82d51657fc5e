use super::code::{Code, Space};
use crate::error::{Error, Result};
use crate::exact_arith::{int, parse_rational, rat, ExactScalar, Matrix, Rational};

/// Catalog entries with their argument syntax.
pub const CATALOG: &[(&str, &str)] = &[
    (
        "orthogonal_lines(n,m)",
        "m mutually orthogonal lines in RP^{n-1}",
    ),
    (
        "simplex_lines(n)",
        "n+1 lines through the vertices of a regular simplex in R^n",
    ),
    (
        "rhombic7",
        "7 lines through the vertices of a cube and its dual octahedron in RP^2",
    ),
    (
        "icosa6",
        "6 lines through opposite vertices of an icosahedron in RP^2",
    ),
    (
        "cube4",
        "4 lines through opposite vertices of a cube in RP^2",
    ),
    (
        "antipodal22_S3",
        "22-point antipodal code in S^3 with maximal inner product 1/2",
    ),
    (
        "icosaVF16",
        "16 lines through vertices and face centers of an icosahedron in RP^2",
    ),
    (
        "petersen10_S3",
        "10 edge midpoints of a regular simplex, in S^3",
    ),
    (
        "pentagons10_S3",
        "two regular pentagons in orthogonal planes, in S^3",
    ),
    (
        "antiprism8(h)",
        "square antiprism in S^2 with squares at heights +h and -h",
    ),
    ("cell600", "120 vertices of the regular 600-cell in S^3"),
];

fn r(x: Rational) -> ExactScalar {
    ExactScalar::rational(x)
}

fn i(x: i64) -> ExactScalar {
    ExactScalar::from_int(x)
}

/// `a + b sqrt(q)`.
fn quad(a: Rational, b: Rational, q: i64) -> ExactScalar {
    ExactScalar::new(a, b, int(q)).expect("non-square context")
}

fn parse_args(name: &str) -> (String, Vec<String>) {
    let name = name.trim();
    match name.find('(') {
        Some(p) if name.ends_with(')') => {
            let args = name[p + 1..name.len() - 1]
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            (name[..p].to_string(), args)
        }
        _ => (name.to_string(), vec![]),
    }
}

fn usize_arg(name: &str, args: &[String], idx: usize) -> Result<usize> {
    args.get(idx)
        .ok_or_else(|| Error::InvalidArgument(format!("`{name}` needs argument {}", idx + 1)))?
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("`{name}` expects integer arguments")))
}

/// Looks up a catalog code by name, e.g. `rhombic7` or `orthogonal_lines(3,3)`.
pub fn builtin(name: &str) -> Result<Code> {
    let (base, args) = parse_args(name);
    match base.as_str() {
        "orthogonal_lines" => {
            let n = usize_arg(&base, &args, 0)?;
            let m = usize_arg(&base, &args, 1)?;
            orthogonal_lines(n, m)
        }
        "simplex_lines" => simplex_lines(usize_arg(&base, &args, 0)?),
        "rhombic7" => rhombic7(),
        "icosa6" => icosa6(),
        "cube4" => cube4(),
        "antipodal22_S3" => antipodal22(),
        "icosaVF16" => icosa_vf16(),
        "petersen10_S3" => petersen10(),
        "pentagons10_S3" => pentagons10(),
        "antiprism8" => {
            let h = args.first().map(|s| parse_rational(s)).transpose()?;
            antiprism8(h.unwrap_or_else(|| rat(1, 3)))
        }
        "cell600" => cell600(),
        _ => Err(Error::UnknownCode(name.to_string())),
    }
}

/// Names of all parameter-free catalog codes plus default instances.
pub fn catalog_instances() -> Vec<String> {
    [
        "orthogonal_lines(3,3)",
        "simplex_lines(2)",
        "simplex_lines(3)",
        "rhombic7",
        "icosa6",
        "cube4",
        "antipodal22_S3",
        "icosaVF16",
        "petersen10_S3",
        "pentagons10_S3",
        "antiprism8(1/3)",
        "cell600",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

pub fn orthogonal_lines(n: usize, m: usize) -> Result<Code> {
    if m > n || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m <= n for orthogonal lines, got n={n}, m={m}"
        )));
    }
    let pts = (0..m)
        .map(|a| (0..n).map(|b| i((a == b) as i64)).collect())
        .collect();
    Code::from_points(
        format!("orthogonal_lines({n},{m})"),
        n,
        Space::Projective,
        false,
        pts,
    )
}

/// Vertices of the regular simplex as `e_i - (1/(n+1)) 1` in the sum-zero
/// hyperplane of `R^{n+1}`.
pub fn simplex_lines(n: usize) -> Result<Code> {
    if n < 2 {
        return Err(Error::InvalidArgument("simplex lines need n >= 2".into()));
    }
    let c = rat(1, n as i64 + 1);
    let pts = (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| r(if a == b { int(1) - &c } else { -c.clone() }))
                .collect()
        })
        .collect();
    Code::from_points(
        format!("simplex_lines({n})"),
        n,
        Space::Projective,
        false,
        pts,
    )
}

fn cube_diagonals(s: &ExactScalar) -> Vec<Vec<ExactScalar>> {
    // even number of minus signs
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
        .iter()
        .map(|v| v.iter().map(|&x| s.clone() * &i(x)).collect())
        .collect()
}

pub fn rhombic7() -> Result<Code> {
    let s = ExactScalar::sqrt_of(&rat(1, 3))?;
    let mut pts: Vec<Vec<ExactScalar>> = (0..3)
        .map(|a| (0..3).map(|b| i((a == b) as i64)).collect())
        .collect();
    pts.extend(cube_diagonals(&s));
    Code::from_points("rhombic7", 3, Space::Projective, false, pts)
}

pub fn cube4() -> Result<Code> {
    let s = ExactScalar::sqrt_of(&rat(1, 3))?;
    Code::from_points("cube4", 3, Space::Projective, false, cube_diagonals(&s))
}

fn phi() -> ExactScalar {
    quad(rat(1, 2), rat(1, 2), 5)
}

/// One lift per line of the icosahedron vertices `(0, ±1, ±phi)` and cyclic shifts.
fn icosa_vertex_lifts() -> Vec<Vec<ExactScalar>> {
    let p = phi();
    let mut out = Vec::new();
    for sign in [1, -1] {
        let base = [i(0), i(1), p.clone() * &i(sign)];
        for shift in 0..3 {
            out.push((0..3).map(|k| base[(k + 3 - shift) % 3].clone()).collect());
        }
    }
    out
}

pub fn icosa6() -> Result<Code> {
    Code::from_points("icosa6", 3, Space::Projective, false, icosa_vertex_lifts())
}

/// Icosahedron vertices together with its face centers (dodecahedron vertices).
pub fn icosa_vf16() -> Result<Code> {
    let p = phi();
    let pinv = p.clone() - &i(1);
    let mut pts = icosa_vertex_lifts();
    for v in [[1, 1, 1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]] {
        pts.push(v.iter().map(|&x| i(x)).collect());
    }
    for sign in [1, -1] {
        let base = [i(0), p.clone(), pinv.clone() * &i(sign)];
        for shift in 0..3 {
            pts.push((0..3).map(|k| base[(k + 3 - shift) % 3].clone()).collect());
        }
    }
    Code::from_points("icosaVF16", 3, Space::Projective, false, pts)
}

pub fn antipodal22() -> Result<Code> {
    // context sqrt(3)
    let s3 = ExactScalar::sqrt_of(&int(3))?;
    let c = s3.clone() * &r(rat(1, 3));
    let h = s3.clone() * &r(rat(1, 2));
    let half = r(rat(1, 2));
    let zero = i(0);
    let mut pts = Vec::new();
    for v in [[1, 1, 1], [1, 1, -1], [1, -1, 1], [-1, 1, 1]] {
        let mut p: Vec<ExactScalar> = v.iter().map(|&x| c.clone() * &i(x)).collect();
        p.push(zero.clone());
        pts.push(p);
    }
    pts.push(vec![zero.clone(), zero.clone(), zero.clone(), i(1)]);
    for axis in 0..3 {
        for sign in [1, -1] {
            let mut p = vec![zero.clone(); 4];
            p[axis] = h.clone();
            p[3] = half.clone() * &i(sign);
            pts.push(p);
        }
    }
    Code::from_points("antipodal22_S3", 4, Space::Sphere, true, pts)
}

/// Midpoints `e_i + e_j` of the simplex edges, centred in the sum-zero
/// hyperplane of `R^5`.
pub fn petersen10() -> Result<Code> {
    let c = rat(2, 5);
    let mut pts = Vec::new();
    for a in 0..5 {
        for b in (a + 1)..5 {
            pts.push(
                (0..5)
                    .map(|k| {
                        let e = if k == a || k == b { int(1) } else { int(0) };
                        r(e - &c)
                    })
                    .collect(),
            );
        }
    }
    Code::from_points("petersen10_S3", 4, Space::Sphere, false, pts)
}

/// Cosines of multiples of `2 pi / 5`.
fn pentagon_cos(k: usize) -> ExactScalar {
    match k % 5 {
        0 => i(1),
        1 | 4 => quad(rat(-1, 4), rat(1, 4), 5),
        _ => quad(rat(-1, 4), rat(-1, 4), 5),
    }
}

pub fn pentagons10() -> Result<Code> {
    let g = Matrix::from_fn(10, 10, |a, b| {
        if a / 5 != b / 5 {
            i(0)
        } else {
            pentagon_cos((a + 5 - b) % 5)
        }
    });
    Code::from_gram("pentagons10_S3", 4, Space::Sphere, false, g)
}

/// Two squares at heights `h` and `-h`, the lower one rotated by 45 degrees.
pub fn antiprism8(h: Rational) -> Result<Code> {
    if h <= int(0) || h >= int(1) {
        return Err(Error::InvalidArgument(format!(
            "antiprism height must lie in (0,1), got {h}"
        )));
    }
    let h2 = &h * &h;
    let r2 = int(1) - &h2;
    let half_sqrt2 = quad(int(0), rat(1, 2), 2);
    // angle index in units of 45 degrees; upper square even, lower odd
    let cos45 = |k: usize| -> ExactScalar {
        match k % 8 {
            0 => i(1),
            1 | 7 => half_sqrt2.clone(),
            2 | 6 => i(0),
            3 | 5 => -half_sqrt2.clone(),
            _ => i(-1),
        }
    };
    let angle = |a: usize| if a < 4 { 2 * a } else { 2 * (a - 4) + 1 };
    let height = |a: usize| if a < 4 { h.clone() } else { -h.clone() };
    let g = Matrix::from_fn(8, 8, |a, b| {
        if a == b {
            return i(1);
        }
        let d = (angle(a) + 8 - angle(b)) % 8;
        cos45(d) * &r(r2.clone()) + &r(height(a) * height(b))
    });
    Code::from_gram(format!("antiprism8({h})"), 3, Space::Sphere, false, g)
}

/// Even permutations of four slots.
fn even_permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    let all = permutations4();
    for p in all {
        let mut inv = 0;
        for a in 0..4 {
            for b in (a + 1)..4 {
                if p[a] > p[b] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            out.push(p);
        }
    }
    out
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    if p.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

pub fn cell600() -> Result<Code> {
    let half = r(rat(1, 2));
    let hphi = phi() * &half;
    let hpinv = (phi() - &i(1)) * &half;
    let mut pts: Vec<Vec<ExactScalar>> = Vec::new();
    for axis in 0..4 {
        for s in [1, -1] {
            let mut p = vec![i(0); 4];
            p[axis] = i(s);
            pts.push(p);
        }
    }
    for mask in 0..16 {
        pts.push(
            (0..4)
                .map(|k| {
                    if mask >> k & 1 == 1 {
                        -half.clone()
                    } else {
                        half.clone()
                    }
                })
                .collect(),
        );
    }
    let base = [hphi, half.clone(), hpinv, i(0)];
    for perm in even_permutations() {
        for mask in 0..8 {
            let signed: Vec<ExactScalar> = (0..3)
                .map(|k| {
                    if mask >> k & 1 == 1 {
                        -base[k].clone()
                    } else {
                        base[k].clone()
                    }
                })
                .chain(std::iter::once(i(0)))
                .collect();
            let mut p = vec![i(0); 4];
            for k in 0..4 {
                p[perm[k]] = signed[k].clone();
            }
            pts.push(p);
        }
    }
    Code::from_points("cell600", 4, Space::Sphere, false, pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::OrderedField;

    #[test]
    fn catalog_instances_build() {
        for name in catalog_instances() {
            let c = builtin(&name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!c.is_empty());
        }
        assert!(matches!(builtin("nonsense"), Err(Error::UnknownCode(_))));
    }

    #[test]
    fn sizes() {
        assert_eq!(rhombic7().unwrap().len(), 7);
        assert_eq!(antipodal22().unwrap().len(), 22);
        assert_eq!(icosa_vf16().unwrap().len(), 16);
        assert_eq!(cell600().unwrap().len(), 120);
        assert_eq!(petersen10().unwrap().len(), 10);
    }

    #[test]
    fn unit_norms_where_promised() {
        for c in [rhombic7(), antipodal22(), cell600(), cube4()] {
            let c = c.unwrap();
            assert!(c.norms().iter().all(|x| *x == i(1)), "{}", c.name);
        }
    }

    #[test]
    fn antiprism_gram_is_psd_rank_three() {
        let c = antiprism8(rat(1, 3)).unwrap();
        let g = c.gram().unwrap();
        assert!(crate::exact_arith::psd_check(&g).unwrap());
        // nearest neighbours across squares share one inner product
        assert_eq!(g.get(0, 4), g.get(1, 4));
        assert!(g.get(0, 4).sgn() != 0);
    }

    #[test]
    fn pentagons_gram_is_psd() {
        let c = pentagons10().unwrap();
        assert!(crate::exact_arith::psd_check(c.raw_gram()).unwrap());
    }
}
