use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, gmres, TwoSidedTridiagonal};
use crate::model::SystemParams;
use crate::scalar::{lit, max_abs, to_f64, Real};

use super::inverse::MonotoneInverse;
use super::margin::margin_at;
use super::solution::{residual_field, EquilibriumSolution, EquilibriumSource, HeatInverse};
use super::EquilibriumOptions;

/// `G(w) = (−dΔ_h + σ)w − κ f⁻¹(αw)` and the diagonal `κα (f⁻¹)′(αw)`.
fn elliptic_residual<T: Real>(
    w: &[T],
    params: &SystemParams<T>,
    heat: &HeatInverse<T>,
    inv: &MonotoneInverse<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let gain = params.heat.source_gain;
    let a = params.alpha;
    let mut g = vec![T::zero(); w.len()];
    heat.solver().apply_into(w, &mut g);
    let mut diag = Vec::with_capacity(w.len());
    for (gi, &wi) in g.iter_mut().zip(w) {
        let v = inv.invert(a * wi)?;
        *gi -= gain * v;
        diag.push(gain * a / (inv.spec().df)(v));
    }
    Ok((g, diag))
}

/// Solves `((−dΔ_h + σ) − diag(c)) x = b`.
fn solve_jacobian<T: Real>(params: &SystemParams<T>, heat: &HeatInverse<T>, c: &[T], b: &[T]) -> Result<Vec<T>> {
    let grid = &params.grid;
    let n = b.len();
    if grid.dim() == 1 {
        let h = grid.spacing()[0];
        let k = params.heat.diffusivity / (h * h);
        let mut lower = vec![-k; n];
        let mut upper = vec![-k; n];
        lower[0] = T::zero();
        upper[n - 1] = T::zero();
        upper[0] = -k * lit(2.0);
        lower[n - 1] = -k * lit(2.0);
        let diag: Vec<T> = c.iter().map(|&ci| params.heat.decay + k * lit(2.0) - ci).collect();
        let mut x = b.to_vec();
        TwoSidedTridiagonal::new(&lower, &diag, &upper)?.solve_in_place(&mut x);
        return Ok(x);
    }
    let apply = |u: &[T], out: &mut [T]| {
        heat.solver().apply_into(u, out);
        for i in 0..u.len() {
            out[i] -= c[i] * u[i];
        }
    };
    let mut x = vec![T::zero(); n];
    let max_iter = 20 * n.max(100);
    match conjugate_gradient(apply, b, &mut x, grid.weights(), lit(1e-13), max_iter) {
        Ok(_) => Ok(x),
        Err(Error::Domain(_)) => {
            x.iter_mut().for_each(|v| *v = T::zero());
            gmres(apply, b, &mut x, 60, lit(1e-13), max_iter)?;
            Ok(x)
        }
        Err(e) => Err(e),
    }
}

/// Newton iteration for `(−dΔ_h + σ)w = κ f⁻¹(αw)` from `guess`; returns
/// `v₀ = f⁻¹(αw₀)` and `w₀ = K v₀`.
pub fn solve_monotone_equilibrium<T: Real>(
    params: &SystemParams<T>,
    guess: &[T],
    opts: &EquilibriumOptions<T>,
) -> Result<EquilibriumSolution<T>> {
    params.grid.check_len(guess)?;
    let inv = MonotoneInverse::with_default_range(&params.nonlinearity)?;
    let heat = HeatInverse::new(params, opts.solver_tolerance)?;
    let mut w = guess.to_vec();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let (g, c) = elliptic_residual(&w, params, &heat, &inv)?;
        let gn = max_abs(&g);
        history.push(to_f64(gn));
        if gn <= opts.elliptic_tolerance {
            break;
        }
        if iterations >= opts.max_newton {
            return Err(Error::Convergence {
                what: "monotone equilibrium Newton iteration",
                iterations,
                residual: to_f64(gn),
                history,
            });
        }
        let neg: Vec<T> = g.iter().map(|&x| -x).collect();
        let delta = solve_jacobian(params, &heat, &c, &neg)?;
        for (wi, d) in w.iter_mut().zip(&delta) {
            *wi += *d;
        }
        iterations += 1;
        // Stop at roundoff level of the discrete Laplacian.
        if max_abs(&delta) <= lit::<T>(1e-14) * (T::one() + max_abs(&w)) {
            break;
        }
    }
    let v0 = w.iter().map(|&wi| inv.invert(params.alpha * wi)).collect::<Result<Vec<T>>>()?;
    let (r, w0) = residual_field(&v0, params, &heat)?;
    let margin = margin_at(&v0, params)?;
    Ok(EquilibriumSolution {
        v0,
        w0,
        residual: max_abs(&r),
        correction_norm: None,
        margin: Some(margin.sigma_min),
        source: EquilibriumSource::MonotoneElliptic,
        alpha: params.alpha,
        partition: None,
        newton_iterations: iterations,
    })
}
