//! Small dense-free linear solvers: a two-sided tridiagonal factorization,
//! conjugate gradients in a weighted inner product, and restarted GMRES.

use crate::error::{Error, Result};
use crate::scalar::{lit, max_abs, to_f64, Real};

/// Tridiagonal factorization eliminated simultaneously from both ends
/// toward the middle row. For persymmetric matrices (row `i` mirrors row
/// `n-1-i`) the two sweeps perform identical floating-point operations, so
/// mirror-symmetric and mirror-antisymmetric right-hand sides yield exactly
/// symmetric and antisymmetric solutions.
#[derive(Debug, Clone)]
pub struct TwoSidedTridiagonal<T> {
    lower: Vec<T>,
    upper: Vec<T>,
    top_ratio: Vec<T>,
    top_pivot: Vec<T>,
    bottom_ratio: Vec<T>,
    bottom_pivot: Vec<T>,
    middle_pivot: T,
    middle: usize,
}

impl<T: Real> TwoSidedTridiagonal<T> {
    /// `lower[i]` multiplies `x[i-1]` and `upper[i]` multiplies `x[i+1]` in row `i`.
    pub fn new(lower: &[T], diag: &[T], upper: &[T]) -> Result<Self> {
        let n = diag.len();
        if n < 2 || lower.len() != n || upper.len() != n {
            return Err(Error::Shape { expected: n, found: lower.len().min(upper.len()) });
        }
        let m = n / 2;
        let mut top_ratio = vec![T::zero(); n];
        let mut top_pivot = vec![T::zero(); n];
        for i in 0..m {
            let p = if i == 0 { diag[0] } else { diag[i] - lower[i] * top_ratio[i - 1] };
            top_pivot[i] = p;
            top_ratio[i] = upper[i] / p;
        }
        let mut bottom_ratio = vec![T::zero(); n];
        let mut bottom_pivot = vec![T::zero(); n];
        for i in (m + 1..n).rev() {
            let p = if i == n - 1 { diag[i] } else { diag[i] - upper[i] * bottom_ratio[i + 1] };
            bottom_pivot[i] = p;
            bottom_ratio[i] = lower[i] / p;
        }
        let mut middle_pivot = diag[m];
        if m > 0 {
            middle_pivot -= lower[m] * top_ratio[m - 1];
        }
        if m + 1 < n {
            middle_pivot -= upper[m] * bottom_ratio[m + 1];
        }
        let pivots_ok = top_pivot[..m]
            .iter()
            .chain(&bottom_pivot[m + 1..])
            .chain(std::iter::once(&middle_pivot))
            .all(|p| p.is_finite() && *p != T::zero());
        if !pivots_ok {
            return Err(Error::Domain("singular tridiagonal system".into()));
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            top_ratio,
            top_pivot,
            bottom_ratio,
            bottom_pivot,
            middle_pivot,
            middle: m,
        })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Overwrites `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [T]) {
        let n = self.len();
        let m = self.middle;
        debug_assert_eq!(rhs.len(), n);
        for i in 0..m {
            let d = if i == 0 { rhs[0] } else { rhs[i] - self.lower[i] * rhs[i - 1] };
            rhs[i] = d / self.top_pivot[i];
        }
        for i in (m + 1..n).rev() {
            let d = if i == n - 1 { rhs[i] } else { rhs[i] - self.upper[i] * rhs[i + 1] };
            rhs[i] = d / self.bottom_pivot[i];
        }
        let mut d = rhs[m];
        if m > 0 {
            d -= self.lower[m] * rhs[m - 1];
        }
        if m + 1 < n {
            d -= self.upper[m] * rhs[m + 1];
        }
        rhs[m] = d / self.middle_pivot;
        for i in (0..m).rev() {
            rhs[i] = rhs[i] - self.top_ratio[i] * rhs[i + 1];
        }
        for i in m + 1..n {
            rhs[i] = rhs[i] - self.bottom_ratio[i] * rhs[i - 1];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovStats {
    pub iterations: usize,
    pub residual: f64,
}

fn weighted_dot<T: Real>(w: &[T], a: &[T], b: &[T]) -> T {
    w.iter().zip(a.iter().zip(b)).map(|(&wi, (&x, &y))| wi * x * y).sum()
}

/// Conjugate gradients for an operator self-adjoint and positive in the
/// inner product weighted by `weights`. Stops once the max-norm residual is
/// at most `rtol * |b|_inf`.
pub fn conjugate_gradient<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    b: &[T],
    x: &mut [T],
    weights: &[T],
    rtol: T,
    max_iter: usize,
) -> Result<KrylovStats> {
    let n = b.len();
    let target = rtol * max_abs(b);
    let mut r = vec![T::zero(); n];
    let mut ap = vec![T::zero(); n];
    apply(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let mut res = max_abs(&r);
    if res <= target {
        return Ok(KrylovStats { iterations: 0, residual: to_f64(res) });
    }
    let mut p = r.clone();
    let mut rr = weighted_dot(weights, &r, &r);
    let mut history = Vec::new();
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = weighted_dot(weights, &p, &ap);
        if !(pap > T::zero()) {
            return Err(Error::Convergence {
                what: "conjugate gradient (operator not positive)",
                iterations: it,
                residual: to_f64(res),
                history,
            });
        }
        let a = rr / pap;
        for i in 0..n {
            x[i] += a * p[i];
            r[i] -= a * ap[i];
        }
        res = max_abs(&r);
        history.push(to_f64(res));
        if res <= target {
            return Ok(KrylovStats { iterations: it, residual: to_f64(res) });
        }
        let rr_new = weighted_dot(weights, &r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Convergence { what: "conjugate gradient", iterations: max_iter, residual: to_f64(res), history })
}

/// Restarted GMRES with modified Gram-Schmidt. Stops once the Euclidean
/// residual is at most `rtol * |b|_2`.
pub fn gmres<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    b: &[T],
    x: &mut [T],
    restart: usize,
    rtol: T,
    max_iter: usize,
) -> Result<KrylovStats> {
    let n = b.len();
    let norm = |v: &[T]| v.iter().map(|&a| a * a).sum::<T>().sqrt();
    let bnorm = norm(b);
    if bnorm == T::zero() {
        x.iter_mut().for_each(|xi| *xi = T::zero());
        return Ok(KrylovStats { iterations: 0, residual: 0.0 });
    }
    let target = rtol * bnorm;
    let m = restart.max(1).min(n.max(1));
    let mut total = 0;
    let mut history = Vec::new();
    let mut tmp = vec![T::zero(); n];

    loop {
        apply(x, &mut tmp);
        let r: Vec<T> = b.iter().zip(&tmp).map(|(&bi, &ai)| bi - ai).collect();
        let beta = norm(&r);
        history.push(to_f64(beta));
        if beta <= target {
            return Ok(KrylovStats { iterations: total, residual: to_f64(beta) });
        }
        if total >= max_iter {
            return Err(Error::Convergence { what: "GMRES", iterations: total, residual: to_f64(beta), history });
        }

        let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|&ri| ri / beta).collect());
        let mut hess = vec![vec![T::zero(); m]; m + 1];
        let mut cs = vec![T::zero(); m];
        let mut sn = vec![T::zero(); m];
        let mut g = vec![T::zero(); m + 1];
        g[0] = beta;
        let mut k_used = 0;

        for k in 0..m {
            total += 1;
            let mut wv = vec![T::zero(); n];
            apply(&basis[k], &mut wv);
            for (j, vj) in basis.iter().enumerate() {
                let hjk: T = wv.iter().zip(vj).map(|(&a, &b)| a * b).sum();
                hess[j][k] = hjk;
                for (wi, &vi) in wv.iter_mut().zip(vj) {
                    *wi -= hjk * vi;
                }
            }
            let hnext = norm(&wv);
            hess[k + 1][k] = hnext;
            for j in 0..k {
                let t = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
                hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
                hess[j][k] = t;
            }
            let denom = hess[k][k].hypot(hess[k + 1][k]);
            if denom == T::zero() {
                cs[k] = T::one();
                sn[k] = T::zero();
            } else {
                cs[k] = hess[k][k] / denom;
                sn[k] = hess[k + 1][k] / denom;
            }
            hess[k][k] = cs[k] * hess[k][k] + sn[k] * hess[k + 1][k];
            hess[k + 1][k] = T::zero();
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            k_used = k + 1;
            let breakdown = hnext <= T::epsilon() * lit(16.0) * beta;
            if g[k + 1].abs() <= target || breakdown || total >= max_iter {
                break;
            }
            basis.push(wv.iter().map(|&a| a / hnext).collect());
        }

        let mut y = vec![T::zero(); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= hess[i][j] * y[j];
            }
            y[i] = s / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, &vi) in x.iter_mut().zip(&basis[j]) {
                *xi += *yj * vi;
            }
        }
    }
}
