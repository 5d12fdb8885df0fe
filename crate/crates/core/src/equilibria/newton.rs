use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::linalg::gmres;
use crate::model::SystemParams;
use crate::scalar::{lit, max_abs, to_f64, Real};

use super::solution::{residual_field, HeatInverse};

/// Applies the linearization `M = diag(d) − αK` with `K = κ(−dΔ_h + σ)⁻¹`.
pub(crate) struct Linearization<'a, T> {
    pub heat: &'a HeatInverse<T>,
    pub diag: Vec<T>,
    pub alpha: T,
    pub error: RefCell<Option<Error>>,
}

impl<'a, T: Real> Linearization<'a, T> {
    pub fn new(heat: &'a HeatInverse<T>, diag: Vec<T>, alpha: T) -> Self {
        Self { heat, diag, alpha, error: RefCell::new(None) }
    }

    pub fn apply(&self, x: &[T], out: &mut [T]) {
        match self.heat.apply(x) {
            Ok(kx) => {
                for i in 0..x.len() {
                    out[i] = self.diag[i] * x[i] - self.alpha * kx[i];
                }
            }
            Err(e) => {
                out.iter_mut().for_each(|o| *o = T::nan());
                self.error.borrow_mut().get_or_insert(e);
            }
        }
    }

    fn take_error(&self) -> Result<()> {
        match self.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Solves `M x = b` by GMRES, right-preconditioned with `diag⁻¹` when
    /// the diagonal is safely invertible.
    pub fn solve(&self, b: &[T], rtol: T) -> Result<Vec<T>> {
        let n = b.len();
        let precondition = self.diag.iter().all(|d| d.abs() >= lit(1e-8));
        let mut y = vec![T::zero(); n];
        let max_iter = 20 * n.max(50);
        if precondition {
            let scaled = |u: &[T], out: &mut [T]| {
                let z: Vec<T> = u.iter().zip(&self.diag).map(|(&a, &d)| a / d).collect();
                self.apply(&z, out);
            };
            let stats = gmres(scaled, b, &mut y, 60, rtol, max_iter);
            self.take_error()?;
            stats?;
            Ok(y.iter().zip(&self.diag).map(|(&a, &d)| a / d).collect())
        } else {
            let stats = gmres(|u, out| self.apply(u, out), b, &mut y, 60, rtol, max_iter);
            self.take_error()?;
            stats?;
            Ok(y)
        }
    }
}

pub(crate) struct NewtonOutcome<T> {
    pub v: Vec<T>,
    pub iterations: usize,
}

/// Damped Newton–Krylov for `f(v) = αKv` from `seed`. If Newton stalls, a
/// chord iteration with the seed's Jacobian diagonal is tried before giving up.
pub(crate) fn newton_equilibrium<T: Real>(
    params: &SystemParams<T>,
    heat: &HeatInverse<T>,
    seed: &[T],
    tolerance: T,
    max_iterations: usize,
) -> Result<NewtonOutcome<T>> {
    let nl = &params.nonlinearity;
    let mut v = seed.to_vec();
    let (mut r, _) = residual_field(&v, params, heat)?;
    let mut rnorm = max_abs(&r);
    let mut history = vec![to_f64(rnorm)];
    let mut iterations = 0;
    while rnorm > tolerance && iterations < max_iterations {
        iterations += 1;
        let diag: Vec<T> = v.iter().map(|&x| (nl.df)(x)).collect();
        let lin = Linearization::new(heat, diag, params.alpha);
        let neg: Vec<T> = r.iter().map(|&x| -x).collect();
        let delta = match lin.solve(&neg, lit(1e-12)) {
            Ok(d) => d,
            Err(_) => break,
        };
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<T> = v.iter().zip(&delta).map(|(&a, &d)| a + lambda * d).collect();
            let (rt, _) = residual_field(&trial, params, heat)?;
            let tn = max_abs(&rt);
            if tn < rnorm || tn <= tolerance {
                v = trial;
                r = rt;
                rnorm = tn;
                accepted = true;
                break;
            }
            lambda = lambda * lit(0.5);
        }
        history.push(to_f64(rnorm));
        if !accepted {
            break;
        }
    }
    if rnorm <= tolerance {
        return Ok(NewtonOutcome { v, iterations });
    }
    chord_iteration(params, heat, seed, tolerance, 50 * max_iterations.max(1), history)
}

/// `v ← v − D⁻¹F(v)` with `D = diag f′(seed)`: a contraction whenever the
/// coupling is weak relative to the root slopes.
fn chord_iteration<T: Real>(
    params: &SystemParams<T>,
    heat: &HeatInverse<T>,
    seed: &[T],
    tolerance: T,
    max_iterations: usize,
    mut history: Vec<f64>,
) -> Result<NewtonOutcome<T>> {
    let nl = &params.nonlinearity;
    let diag: Vec<T> = seed.iter().map(|&x| (nl.df)(x)).collect();
    if diag.iter().any(|d| d.abs() < lit(1e-8)) {
        return Err(Error::Convergence {
            what: "equilibrium Newton iteration",
            iterations: history.len(),
            residual: history.last().copied().unwrap_or(f64::NAN),
            history,
        });
    }
    let mut v = seed.to_vec();
    for k in 0..max_iterations {
        let (r, _) = residual_field(&v, params, heat)?;
        let rn = max_abs(&r);
        if !rn.is_finite() {
            break;
        }
        if rn <= tolerance {
            return Ok(NewtonOutcome { v, iterations: k });
        }
        if k % 10 == 0 {
            history.push(to_f64(rn));
        }
        for i in 0..v.len() {
            v[i] -= r[i] / diag[i];
        }
    }
    Err(Error::Convergence {
        what: "equilibrium Newton iteration",
        iterations: history.len(),
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}
