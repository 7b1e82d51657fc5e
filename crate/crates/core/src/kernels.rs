//! Matrix-valued three-point kernels as exact polynomial matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{int, ExactMatrix, ExactScalar, Matrix, Rational};
use crate::parallel;
use crate::polynomials::{gegenbauer, TriPoly};

/// Sphere kernels keep every index; projective kernels keep indices of the
/// same parity as `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Sphere,
    Projective,
}

/// A `d x d` matrix of symmetric polynomials in `u, v, t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub parity: Parity,
    /// Row-major entries.
    pub entries: Vec<TriPoly>,
}

impl KernelMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &TriPoly {
        &self.entries[i * self.d + j]
    }

    /// Original row indices kept by this truncation.
    pub fn indices(&self) -> Vec<usize> {
        kept_indices(self.k, self.d, self.parity)
    }

    /// Maximal total degree over all entries.
    pub fn degree(&self) -> u32 {
        self.entries
            .iter()
            .filter_map(|p| p.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn map_entries(&self, f: impl Fn(&TriPoly) -> TriPoly + Sync + Send) -> KernelMatrix {
        KernelMatrix {
            entries: parallel::map_slice(&self.entries, f),
            ..self.clone()
        }
    }

    pub fn eval_f64(&self, p: [f64; 3]) -> Vec<f64> {
        self.entries.iter().map(|e| e.eval_f64(p)).collect()
    }
}

fn kept_indices(k: usize, d: usize, parity: Parity) -> Vec<usize> {
    match parity {
        Parity::Sphere => (0..d).collect(),
        Parity::Projective => (0..d).map(|i| 2 * i + k % 2).collect(),
    }
}

/// Unsymmetrized entry `u^i v^j ((1-u^2)(1-v^2))^{k/2} P_k^{n-1}((t-uv)/sqrt(...))`.
fn raw_entry(i: usize, j: usize, radial: &TriPoly) -> TriPoly {
    radial * &TriPoly::monomial((i as u32, j as u32, 0), int(1))
}

/// `sum_m c_m ((1-u^2)(1-v^2))^{(k-m)/2} (t-uv)^m` for the coefficients of `P_k^{n-1}`.
fn radial_part(n: usize, k: usize) -> Result<TriPoly> {
    let p = gegenbauer(n - 1, k)?;
    let u = TriPoly::var(0);
    let v = TriPoly::var(1);
    let t = TriPoly::var(2);
    let one = TriPoly::constant(int(1));
    let w = &(&one - &(&u * &u)) * &(&one - &(&v * &v));
    let s = &t - &(&u * &v);
    let mut acc = TriPoly::zero();
    for (m, c) in p.coeffs().iter().enumerate() {
        if *c == int(0) {
            continue;
        }
        debug_assert_eq!((k - m) % 2, 0);
        let term = &w.pow(((k - m) / 2) as u32) * &s.pow(m as u32);
        acc = &acc + &term.scale(c);
    }
    Ok(acc)
}

fn build(n: usize, k: usize, d: usize, parity: Parity) -> Result<KernelMatrix> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "kernels need n >= 3, got {n}"
        )));
    }
    if d == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be positive".into(),
        ));
    }
    let radial = radial_part(n, k)?;
    let idx = kept_indices(k, d, parity);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let upper = parallel::map_slice(&pairs, |&(a, b)| {
        raw_entry(idx[a], idx[b], &radial).symmetrize()
    });
    let mut entries = vec![TriPoly::zero(); d * d];
    for ((a, b), e) in pairs.into_iter().zip(upper) {
        entries[b * d + a] = e.clone();
        entries[a * d + b] = e;
    }
    Ok(KernelMatrix {
        n,
        k,
        d,
        parity,
        entries,
    })
}

/// `S_k^n` truncated to its leading `d x d` block.
pub fn sphere_s(n: usize, k: usize, d: usize) -> Result<KernelMatrix> {
    build(n, k, d, Parity::Sphere)
}

/// Submatrix of `S_k^n` on the first `d` indices congruent to `k` mod 2.
pub fn projective_s(n: usize, k: usize, d: usize) -> Result<KernelMatrix> {
    build(n, k, d, Parity::Projective)
}

pub fn kernel_s(parity: Parity, n: usize, k: usize, d: usize) -> Result<KernelMatrix> {
    build(n, k, d, parity)
}

/// `(N-2) S(u,v,t) + S(u,u,1) + S(v,v,1) + S(t,t,1)`.
pub fn make_t(s: &KernelMatrix, n_points: usize) -> Result<KernelMatrix> {
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "code size must be at least 3, got {n_points}"
        )));
    }
    let scale = int(n_points as i64 - 2);
    let u = TriPoly::var(0);
    let v = TriPoly::var(1);
    let t = TriPoly::var(2);
    let one = TriPoly::constant(int(1));
    let subs = [
        [u.clone(), u.clone(), one.clone()],
        [v.clone(), v.clone(), one.clone()],
        [t.clone(), t.clone(), one],
    ];
    Ok(s.map_entries(|e| {
        let mut acc = e.scale(&scale);
        for sub in &subs {
            acc = &acc + &e.substitute(sub);
        }
        acc
    }))
}

/// Exact entrywise evaluation at a triple sharing one quadratic context.
pub fn eval_kernel(k: &KernelMatrix, point: [&ExactScalar; 3]) -> Result<ExactMatrix> {
    ExactScalar::check_context(point)?;
    let vals: Vec<ExactScalar> = k.entries.iter().map(|e| e.eval(point)).collect();
    Ok(Matrix::from_fn(k.d, k.d, |i, j| vals[i * k.d + j].clone()))
}

/// Rational evaluation when the result is known to be rational.
pub fn eval_kernel_rational(
    k: &KernelMatrix,
    point: [&ExactScalar; 3],
) -> Result<Matrix<Rational>> {
    eval_kernel(k, point)?.try_map(|x| {
        x.as_rational()
            .cloned()
            .ok_or_else(|| Error::Unsupported(format!("kernel value {x} is irrational")))
    })
}

/// Builds `T` for each `(k, d)` block.
pub fn t_blocks(
    parity: Parity,
    n: usize,
    n_points: usize,
    blocks: &[usize],
) -> Result<Vec<KernelMatrix>> {
    let jobs: Vec<(usize, usize)> = blocks.iter().copied().enumerate().collect();
    parallel::map_slice(&jobs, |&(k, d)| {
        make_t(&kernel_s(parity, n, k, d)?, n_points)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::{psd_check, rat};

    fn sc(r: Rational) -> ExactScalar {
        ExactScalar::rational(r)
    }

    #[test]
    fn small_entries() {
        let s = sphere_s(4, 0, 1).unwrap();
        assert_eq!(s.entry(0, 0), &TriPoly::constant(int(1)));
        let s = sphere_s(3, 1, 1).unwrap();
        let u = TriPoly::var(0);
        let v = TriPoly::var(1);
        let t = TriPoly::var(2);
        let expect = &(&(&u + &v) + &t) - &(&(&(&u * &v) + &(&u * &t)) + &(&v * &t));
        assert_eq!(s.entry(0, 0), &expect.scale(&rat(1, 3)));
    }

    #[test]
    fn value_at_identity_triple() {
        let one = sc(int(1));
        for k in 0..4 {
            let s = sphere_s(3, k, 3).unwrap();
            let m = eval_kernel(&s, [&one, &one, &one]).unwrap();
            for x in m.data() {
                assert_eq!(*x, sc(int(if k == 0 { 1 } else { 0 })));
            }
        }
    }

    #[test]
    fn symmetric_entries_and_degree_bound() {
        for k in 0..4 {
            let s = sphere_s(4, k, 3).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(s.entry(i, j), s.entry(j, i));
                    assert!(s.entry(i, j).is_symmetric());
                }
            }
            // index degree i + j plus 2k from the radial factor
            assert_eq!(s.degree() as usize, 2 * k + 4);
            let p = projective_s(3, k, 2).unwrap();
            assert_eq!(p.indices(), vec![k % 2, k % 2 + 2]);
            assert_eq!(p.degree() as usize, 2 * k + 2 * (k % 2 + 2));
        }
    }

    #[test]
    fn t_with_three_points() {
        let s = sphere_s(3, 0, 1).unwrap();
        let t = make_t(&s, 7).unwrap();
        assert_eq!(t.entry(0, 0), &TriPoly::constant(int(8)));
        assert!(make_t(&s, 2).is_err());
        let s = projective_s(3, 1, 1).unwrap();
        let t3 = make_t(&s, 3).unwrap();
        let one = TriPoly::constant(int(1));
        let u = TriPoly::var(0);
        let v = TriPoly::var(1);
        let tt = TriPoly::var(2);
        let e = s.entry(0, 0);
        let manual = &(&(e + &e.substitute(&[u.clone(), u.clone(), one.clone()]))
            + &e.substitute(&[v.clone(), v.clone(), one.clone()]))
            + &e.substitute(&[tt.clone(), tt.clone(), one]);
        assert_eq!(t3.entry(0, 0), &manual);
    }

    #[test]
    fn radicals_cancel_for_projective_kernels() {
        let s3 = ExactScalar::sqrt_of(&rat(1, 3)).unwrap();
        let zero = sc(int(0));
        for k in 0..4 {
            let p = projective_s(3, k, 2).unwrap();
            let m = eval_kernel(&p, [&s3, &s3, &zero]).unwrap();
            assert!(m.data().iter().all(|x| x.is_rational()));
        }
    }

    #[test]
    fn orthonormal_frame_sum_is_psd() {
        // ordered triples of e1, e2, e3
        let pts = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        let ip = |a: usize, b: usize| -> i64 { (0..3).map(|i| pts[a][i] * pts[b][i]).sum() };
        for k in 0..3 {
            let s = sphere_s(3, k, 3).unwrap();
            let mut acc = Matrix::<ExactScalar>::zeros(3, 3);
            for x in 0..3 {
                for y in 0..3 {
                    for z in 0..3 {
                        let (a, b, c) = (sc(int(ip(x, y))), sc(int(ip(x, z))), sc(int(ip(y, z))));
                        acc = acc.add(&eval_kernel(&s, [&a, &b, &c]).unwrap()).unwrap();
                    }
                }
            }
            assert!(psd_check(&acc).unwrap());
        }
    }
}
