use super::real::Real;

/// Dense square matrix over a [`Real`] type.
#[derive(Clone, Debug)]
pub struct RMat<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> RMat<T> {
    pub fn zeros(n: usize, prec: u32) -> Self {
        RMat {
            n,
            data: vec![T::zero(prec); n * n],
        }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        Self::scaled_identity(n, T::one(prec))
    }

    pub fn scaled_identity(n: usize, x: T) -> Self {
        let prec = x.prec();
        let mut m = Self::zeros(n, prec);
        for i in 0..n {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn prec(&self) -> u32 {
        self.data.first().map_or(53, |x| x.prec())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n, self.prec());
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                for j in 0..n {
                    let (left, right) = (&mut out.data[i * n + j], &o.data[k * n + j]);
                    left.mul_add_assign(a, right);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.data[j * n + i].clone();
            }
        }
        out
    }

    /// `(A + A^T) / 2`.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        let half = T::from_f64(0.5, self.prec());
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] =
                    (self.data[i * n + j].clone() + &self.data[j * n + i]) * &half;
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        RMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        RMat {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * s).collect(),
        }
    }

    /// `self += s * o`.
    pub fn axpy(&mut self, s: &T, o: &Self) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            a.mul_add_assign(s, b);
        }
    }

    /// `tr(A B)` for symmetric `B`, i.e. the entrywise inner product.
    pub fn inner(&self, o: &Self) -> T {
        let mut acc = T::zero(self.prec());
        for (a, b) in self.data.iter().zip(&o.data) {
            acc.mul_add_assign(a, b);
        }
        acc
    }

    /// `tr(A B)` for general `A`, `B`.
    pub fn trace_prod(&self, o: &Self) -> T {
        let n = self.n;
        let mut acc = T::zero(self.prec());
        for i in 0..n {
            for j in 0..n {
                acc.mul_add_assign(&self.data[i * n + j], &o.data[j * n + i]);
            }
        }
        acc
    }

    pub fn trace(&self) -> T {
        let mut acc = T::zero(self.prec());
        for i in 0..self.n {
            acc += &self.data[i * self.n + i];
        }
        acc
    }

    pub fn frobenius(&self) -> T {
        self.inner(self).sqrt()
    }

    /// Lower Cholesky factor, `None` unless positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let prec = self.prec();
        let zero = T::zero(prec);
        let mut l = Self::zeros(n, prec);
        for j in 0..n {
            let mut d = self.data[j * n + j].clone();
            for k in 0..j {
                let x = l.data[j * n + k].clone();
                d -= &(x.clone() * &x);
            }
            if d <= zero {
                return None;
            }
            let r = d.sqrt();
            for i in j + 1..n {
                let mut s = self.data[i * n + j].clone();
                for k in 0..j {
                    let prod = l.data[i * n + k].clone() * &l.data[j * n + k];
                    s -= &prod;
                }
                l.data[i * n + j] = s / &r;
            }
            l.data[j * n + j] = r;
        }
        Some(l)
    }

    /// Inverse of a lower triangular matrix.
    pub fn lower_inverse(&self) -> Self {
        let n = self.n;
        let prec = self.prec();
        let mut inv = Self::zeros(n, prec);
        for j in 0..n {
            inv.data[j * n + j] = T::one(prec) / &self.data[j * n + j];
            for i in j + 1..n {
                let mut s = T::zero(prec);
                for k in j..i {
                    s.mul_add_assign(&self.data[i * n + k], &inv.data[k * n + j]);
                }
                inv.data[i * n + j] = -(s / &self.data[i * n + i]);
            }
        }
        inv
    }

    /// Inverse of a positive definite matrix from its Cholesky factor.
    pub fn spd_inverse(l: &Self) -> Self {
        let li = l.lower_inverse();
        li.transpose().mul(&li)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|x| x.to_f64()).collect()
    }
}

/// Solves `L L^T x = b`.
pub fn cholesky_solve<T: Real>(l: &RMat<T>, b: &[T]) -> Vec<T> {
    let n = l.n;
    let prec = l.prec();
    let mut y: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = b[i].clone();
        for k in 0..i {
            let p = l.data[i * n + k].clone() * &y[k];
            s -= &p;
        }
        y.push(s / &l.data[i * n + i]);
    }
    let mut x = vec![T::zero(prec); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for k in i + 1..n {
            let p = l.data[k * n + i].clone() * &x[k];
            s -= &p;
        }
        x[i] = s / &l.data[i * n + i];
    }
    x
}

/// Eigenvalues of a symmetric `f64` matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(n: usize, mut a: Vec<f64>) -> Vec<f64> {
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a[i * n + j] * a[i * n + j];
                total += x;
                if i != j {
                    off += x;
                }
            }
        }
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Largest `alpha <= cap` with `X + alpha dX` positive semidefinite, given
/// the Cholesky factor of `X`.
pub fn max_step<T: Real>(l: &RMat<T>, dx: &RMat<T>, cap: f64) -> f64 {
    let li = l.lower_inverse();
    let w = li.mul(dx).mul(&li.transpose());
    let ev = symmetric_eigenvalues(w.n, w.symmetrized().to_f64());
    let min = ev.into_iter().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        cap
    } else {
        (-1.0 / min).min(cap)
    }
}
