//! Primal-dual interior-point method (HKM direction with Mehrotra
//! predictor-corrector) for block-diagonal linear matrix inequalities.

use serde::{Deserialize, Serialize};

use super::dense::{cholesky_solve, max_step, RMat};
use super::real::Real;
use crate::parallel;

/// `maximize b^T y  s.t.  C - sum y_i A_i ⪰ 0` with primal
/// `minimize <C, X>  s.t.  <A_i, X> = b_i, X ⪰ 0`.
#[derive(Clone, Debug)]
pub struct Lmi<T> {
    pub sizes: Vec<usize>,
    pub c: Vec<RMat<T>>,
    /// Nonzero blocks of each constraint matrix.
    pub a: Vec<Vec<(usize, RMat<T>)>>,
    pub b: Vec<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct IpmSettings {
    pub max_iter: usize,
    pub tol: f64,
    /// Fraction of the step to the boundary.
    pub gamma: f64,
    pub verbose: bool,
}

impl Default for IpmSettings {
    fn default() -> Self {
        IpmSettings {
            max_iter: 200,
            tol: 1e-8,
            gamma: 0.9,
            verbose: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IpmStatus {
    Optimal,
    MaxIterations,
    Stalled,
    /// Dual objective grows without bound (primal infeasible).
    DualUnbounded,
}

#[derive(Clone, Debug)]
pub struct IpmResult<T> {
    pub status: IpmStatus,
    pub y: Vec<T>,
    pub x: Vec<RMat<T>>,
    pub s: Vec<RMat<T>>,
    pub primal_objective: T,
    pub dual_objective: T,
    pub iterations: usize,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub gap: f64,
}

impl<T: Real> Lmi<T> {
    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    fn prec(&self) -> u32 {
        self.c.first().map_or(53, |m| m.prec())
    }

    /// `sum y_i A_i` per block.
    pub fn combine(&self, y: &[T]) -> Vec<RMat<T>> {
        let prec = self.prec();
        let mut out: Vec<RMat<T>> = self.sizes.iter().map(|&n| RMat::zeros(n, prec)).collect();
        for (yi, ai) in y.iter().zip(&self.a) {
            for (b, m) in ai {
                out[*b].axpy(yi, m);
            }
        }
        out
    }

    /// `C - sum y_i A_i` per block.
    pub fn slack(&self, y: &[T]) -> Vec<RMat<T>> {
        self.c
            .iter()
            .zip(self.combine(y))
            .map(|(c, a)| c.sub(&a))
            .collect()
    }

    /// `(<A_i, X>)_i`.
    pub fn apply(&self, x: &[RMat<T>]) -> Vec<T> {
        let prec = self.prec();
        self.a
            .iter()
            .map(|ai| {
                let mut acc = T::zero(prec);
                for (b, m) in ai {
                    acc += &m.inner(&x[*b]);
                }
                acc
            })
            .collect()
    }
}

fn norm<T: Real>(v: &[T]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

fn block_norm<T: Real>(v: &[RMat<T>]) -> f64 {
    v.iter()
        .map(|m| m.frobenius().to_f64().powi(2))
        .sum::<f64>()
        .sqrt()
}

fn inner_blocks<T: Real>(a: &[RMat<T>], b: &[RMat<T>], prec: u32) -> T {
    let mut acc = T::zero(prec);
    for (x, y) in a.iter().zip(b) {
        acc += &x.inner(y);
    }
    acc
}

/// Schur complement `M_ij = sum_b tr(A_ib X_b A_jb S_b^{-1})`.
fn schur<T: Real>(lmi: &Lmi<T>, x: &[RMat<T>], sinv: &[RMat<T>]) -> RMat<T> {
    let m = lmi.num_constraints();
    let prec = lmi.prec();
    let nb = lmi.sizes.len();
    let lookup: Vec<Vec<Option<usize>>> = lmi
        .a
        .iter()
        .map(|aj| {
            let mut v = vec![None; nb];
            for (pos, (b, _)) in aj.iter().enumerate() {
                v[*b] = Some(pos);
            }
            v
        })
        .collect();
    let rows: Vec<Vec<T>> = parallel::map_range(m, |i| {
        let p: Vec<(usize, RMat<T>)> = lmi.a[i]
            .iter()
            .map(|(b, ai)| (*b, x[*b].mul(ai).mul(&sinv[*b])))
            .collect();
        (i..m)
            .map(|j| {
                let mut acc = T::zero(prec);
                for (b, pi) in &p {
                    if let Some(pos) = lookup[j][*b] {
                        acc += &lmi.a[j][pos].1.inner(pi);
                    }
                }
                acc
            })
            .collect()
    });
    let mut out = RMat::zeros(m, prec);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            let j = i + k;
            out.set(j, i, v.clone());
            out.set(i, j, v);
        }
    }
    out
}

fn factor_regularized<T: Real>(m: &RMat<T>) -> Option<RMat<T>> {
    if let Some(l) = m.cholesky() {
        return Some(l);
    }
    let prec = m.prec();
    let maxdiag = (0..m.n)
        .map(|i| m.get(i, i).to_f64().abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut delta = maxdiag * 2f64.powi(-(prec as i32) / 2);
    for _ in 0..20 {
        let mut r = m.clone();
        let d = T::from_f64(delta, prec);
        for i in 0..m.n {
            let v = r.get(i, i).clone() + &d;
            r.set(i, i, v);
        }
        if let Some(l) = r.cholesky() {
            return Some(l);
        }
        delta *= 100.0;
    }
    None
}

struct Direction<T> {
    dx: Vec<RMat<T>>,
    dy: Vec<T>,
    ds: Vec<RMat<T>>,
}

/// Search direction for the complementarity target `t` (per block):
/// `dX = (t - X (S + dS)) S^{-1}` symmetrized, with `A(dX) = rp`.
#[allow(clippy::too_many_arguments)]
fn direction<T: Real>(
    lmi: &Lmi<T>,
    lm: &RMat<T>,
    x: &[RMat<T>],
    s: &[RMat<T>],
    sinv: &[RMat<T>],
    rp: &[T],
    rd: &[RMat<T>],
    target: &[RMat<T>],
) -> Direction<T> {
    let g: Vec<RMat<T>> = (0..x.len())
        .map(|b| target[b].sub(&x[b].mul(&s[b].add(&rd[b]))).mul(&sinv[b]))
        .collect();
    let ag = lmi.apply(&g);
    let rhs: Vec<T> = rp.iter().zip(&ag).map(|(r, a)| r.clone() - a).collect();
    let dy = cholesky_solve(lm, &rhs);
    let ay = lmi.combine(&dy);
    let ds: Vec<RMat<T>> = rd.iter().zip(&ay).map(|(r, a)| r.sub(a)).collect();
    let dx: Vec<RMat<T>> = (0..x.len())
        .map(|b| {
            target[b]
                .sub(&x[b].mul(&s[b].add(&ds[b])))
                .mul(&sinv[b])
                .symmetrized()
        })
        .collect();
    Direction { dx, dy, ds }
}

fn step_lengths<T: Real>(lx: &[RMat<T>], ls: &[RMat<T>], d: &Direction<T>) -> (f64, f64) {
    let ap = lx
        .iter()
        .zip(&d.dx)
        .map(|(l, dx)| max_step(l, dx, 1e30))
        .fold(f64::INFINITY, f64::min);
    let ad = ls
        .iter()
        .zip(&d.ds)
        .map(|(l, ds)| max_step(l, ds, 1e30))
        .fold(f64::INFINITY, f64::min);
    (ap, ad)
}

/// Runs the interior-point method from a scaled identity starting point.
pub fn solve_lmi<T: Real>(lmi: &Lmi<T>, settings: &IpmSettings) -> IpmResult<T> {
    let prec = lmi.prec();
    let m = lmi.num_constraints();
    let total: usize = lmi.sizes.iter().sum();
    let total_t = T::from_f64(total as f64, prec);

    let mut xi: f64 = 1.0;
    let mut eta: f64 = 1.0;
    for (b, &n) in lmi.sizes.iter().enumerate() {
        let cn = lmi.c[b].frobenius().to_f64();
        let mut amax: f64 = 0.0;
        for (i, ai) in lmi.a.iter().enumerate() {
            if let Some((_, a)) = ai.iter().find(|(bb, _)| *bb == b) {
                let an = a.frobenius().to_f64();
                amax = amax.max(an);
                xi = xi.max(n as f64 * (1.0 + lmi.b[i].to_f64().abs()) / (1.0 + an));
            }
        }
        eta = eta.max((1.0 + amax.max(cn)) / (n as f64).sqrt());
    }
    let mut x: Vec<RMat<T>> = lmi
        .sizes
        .iter()
        .map(|&n| RMat::scaled_identity(n, T::from_f64(xi, prec)))
        .collect();
    let mut s: Vec<RMat<T>> = lmi
        .sizes
        .iter()
        .map(|&n| RMat::scaled_identity(n, T::from_f64(eta, prec)))
        .collect();
    let mut y: Vec<T> = vec![T::zero(prec); m];

    let bnorm = norm(&lmi.b);
    let cnorm = block_norm(&lmi.c);
    let mut status = IpmStatus::MaxIterations;
    let mut iterations = 0;
    let (mut pinf, mut dinf, mut gap) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut small_steps = 0;
    let mut last_step = 0.0;

    for it in 0..settings.max_iter {
        iterations = it;
        let ax = lmi.apply(&x);
        let rp: Vec<T> = lmi.b.iter().zip(&ax).map(|(b, a)| b.clone() - a).collect();
        let slack = lmi.slack(&y);
        let rd: Vec<RMat<T>> = slack.iter().zip(&s).map(|(c, s)| c.sub(s)).collect();
        let pobj = inner_blocks(&lmi.c, &x, prec);
        let mut dobj = T::zero(prec);
        for (b, yi) in lmi.b.iter().zip(&y) {
            dobj.mul_add_assign(b, yi);
        }
        let mu = inner_blocks(&x, &s, prec) / &total_t;
        pinf = norm(&rp) / (1.0 + bnorm);
        dinf = block_norm(&rd) / (1.0 + cnorm);
        let (pf, df) = (pobj.to_f64(), dobj.to_f64());
        gap = (pobj.clone() - &dobj).to_f64().abs() / (1.0 + pf.abs() + df.abs());
        if settings.verbose {
            eprintln!(
                "iter {it:3}  pobj {pf:+.12e}  dobj {df:+.12e}  pinf {pinf:.2e}  dinf {dinf:.2e}  gap {gap:.2e}  mu {:.2e}",
                mu.to_f64()
            );
        }
        if pinf < settings.tol && dinf < settings.tol && gap < settings.tol {
            status = IpmStatus::Optimal;
            break;
        }
        if dinf < settings.tol && df > 1e8 * (1.0 + pf.abs()) && pinf > 1e-3 {
            status = IpmStatus::DualUnbounded;
            break;
        }

        let lx: Vec<RMat<T>> = match x.iter().map(|m| m.cholesky()).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => {
                status = IpmStatus::Stalled;
                break;
            }
        };
        let ls: Vec<RMat<T>> = match s.iter().map(|m| m.cholesky()).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => {
                status = IpmStatus::Stalled;
                break;
            }
        };
        let sinv: Vec<RMat<T>> = ls.iter().map(RMat::spd_inverse).collect();
        let mm = schur(lmi, &x, &sinv);
        let lm = match factor_regularized(&mm) {
            Some(l) => l,
            None => {
                status = IpmStatus::Stalled;
                break;
            }
        };

        // predictor
        let zero_target: Vec<RMat<T>> = lmi.sizes.iter().map(|&n| RMat::zeros(n, prec)).collect();
        let pred = direction(lmi, &lm, &x, &s, &sinv, &rp, &rd, &zero_target);
        let (ap, ad) = step_lengths(&lx, &ls, &pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let (apt, adt) = (T::from_f64(ap, prec), T::from_f64(ad, prec));
        let mut mu_aff = T::zero(prec);
        for b in 0..x.len() {
            let mut xa = x[b].clone();
            xa.axpy(&apt, &pred.dx[b]);
            let mut sa = s[b].clone();
            sa.axpy(&adt, &pred.ds[b]);
            mu_aff += &xa.inner(&sa);
        }
        let mu_aff = mu_aff / &total_t;
        let ratio = (mu_aff.to_f64() / mu.to_f64()).clamp(0.0, 1.0);
        let sigma = if ratio.is_finite() {
            ratio.powi(3)
        } else {
            0.5
        };

        // corrector
        let smu = T::from_f64(sigma, prec) * &mu;
        let target: Vec<RMat<T>> = (0..x.len())
            .map(|b| {
                let n = lmi.sizes[b];
                RMat::scaled_identity(n, smu.clone()).sub(&pred.dx[b].mul(&pred.ds[b]))
            })
            .collect();
        let corr = direction(lmi, &lm, &x, &s, &sinv, &rp, &rd, &target);
        let (ap, ad) = step_lengths(&lx, &ls, &corr);
        let gamma = settings.gamma + (0.99 - settings.gamma).max(0.0) * last_step;
        let ap = (gamma * ap).min(1.0);
        let ad = (gamma * ad).min(1.0);
        last_step = ap.min(ad);
        if ap < 1e-10 && ad < 1e-10 {
            small_steps += 1;
            if small_steps > 3 {
                status = IpmStatus::Stalled;
                break;
            }
        } else {
            small_steps = 0;
        }
        let (apt, adt) = (T::from_f64(ap, prec), T::from_f64(ad, prec));
        for b in 0..x.len() {
            x[b].axpy(&apt, &corr.dx[b]);
            s[b].axpy(&adt, &corr.ds[b]);
        }
        for (yi, d) in y.iter_mut().zip(&corr.dy) {
            yi.mul_add_assign(&adt, d);
        }
        iterations = it + 1;
    }

    let pobj = inner_blocks(&lmi.c, &x, prec);
    let mut dobj = T::zero(prec);
    for (b, yi) in lmi.b.iter().zip(&y) {
        dobj.mul_add_assign(b, yi);
    }
    IpmResult {
        status,
        y,
        x,
        s,
        primal_objective: pobj,
        dual_objective: dobj,
        iterations,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
        gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> RMat<f64> {
        RMat {
            n: 1,
            data: vec![v],
        }
    }

    #[test]
    fn scalar_bound() {
        // maximize c s.t. 5 - c >= 0
        let lmi = Lmi {
            sizes: vec![1],
            c: vec![scalar(5.0)],
            a: vec![vec![(0, scalar(1.0))]],
            b: vec![1.0],
        };
        let r = solve_lmi(&lmi, &IpmSettings::default());
        assert_eq!(r.status, IpmStatus::Optimal);
        assert!((r.y[0] - 5.0).abs() < 1e-6);
    }

    #[test]
    fn min_eigenvalue() {
        // maximize t s.t. [[2,1],[1,2]] - t I >= 0, optimum 1
        let lmi = Lmi {
            sizes: vec![2],
            c: vec![RMat {
                n: 2,
                data: vec![2.0, 1.0, 1.0, 2.0],
            }],
            a: vec![vec![(0, RMat::identity(2, 53))]],
            b: vec![1.0],
        };
        let r = solve_lmi(&lmi, &IpmSettings::default());
        assert_eq!(r.status, IpmStatus::Optimal);
        assert!((r.y[0] - 1.0).abs() < 1e-6);
    }

    #[cfg(feature = "mpfr")]
    #[test]
    fn high_precision() {
        use rug::Float;
        let p = 256;
        let one = |v: f64| RMat::<Float> {
            n: 1,
            data: vec![Float::with_val(p, v)],
        };
        // maximize y1 + y2 s.t. 1 - y1 >= 0, 1/3 - y2 >= 0 (as a 2x2 diagonal block)
        let mut c = RMat::<Float>::zeros(2, p);
        c.set(0, 0, Float::with_val(p, 1));
        c.set(1, 1, Float::with_val(p, 1) / Float::with_val(p, 3));
        let mut a1 = RMat::<Float>::zeros(2, p);
        a1.set(0, 0, Float::with_val(p, 1));
        let mut a2 = RMat::<Float>::zeros(2, p);
        a2.set(1, 1, Float::with_val(p, 1));
        let lmi = Lmi {
            sizes: vec![2, 1],
            c: vec![c, one(4.0)],
            a: vec![vec![(0, a1), (1, one(1.0))], vec![(0, a2)]],
            b: vec![Float::with_val(p, 1), Float::with_val(p, 1)],
        };
        let settings = IpmSettings {
            tol: 1e-40,
            ..IpmSettings::default()
        };
        let r = solve_lmi(&lmi, &settings);
        assert_eq!(r.status, IpmStatus::Optimal);
        let third = Float::with_val(p, 1) / Float::with_val(p, 3);
        let err = Float::with_val(p, &r.y[1] - &third).abs();
        assert!(err < 1e-35);
    }
}
