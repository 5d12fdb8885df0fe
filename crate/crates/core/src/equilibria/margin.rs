use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::{lit, to_f64, Real};

use super::inverse::MonotoneInverse;
use super::newton::Linearization;
use super::solution::{EquilibriumSolution, HeatInverse};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperbolicity<T> {
    /// Smallest singular value of `diag(f′(v₀)) − αK`.
    pub sigma_min: T,
    /// Rayleigh quotient of the linearization at the minimizing vector; its
    /// sign tells a negative eigenvalue from a positive one.
    pub eigenvalue: T,
    pub iterations: usize,
}

impl<T: Real> Hyperbolicity<T> {
    pub fn is_hyperbolic(&self, threshold: T) -> bool {
        self.sigma_min > threshold
    }
}

/// Lanczos with full reorthogonalization on `M²` in the quadrature inner
/// product (`M` is self-adjoint there, so `M²` plays the role of `MᵀM`).
/// The smallest Ritz value converges even when the spectrum of `M` is
/// tightly clustered, where plain inverse iteration would crawl.
pub(crate) fn smallest_singular_value<T: Real>(lin: &Linearization<'_, T>, weights: &[T]) -> Result<Hyperbolicity<T>> {
    let n = weights.len();
    let dot = |a: &[T], b: &[T]| -> T { weights.iter().zip(a.iter().zip(b)).map(|(&w, (&x, &y))| w * x * y).sum() };
    let apply_sq = |x: &[T]| -> Result<Vec<T>> {
        let mut mx = vec![T::zero(); n];
        lin.apply(x, &mut mx);
        let mut out = vec![T::zero(); n];
        lin.apply(&mx, &mut out);
        match lin.error.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    };
    // Start away from any symmetry subspace.
    let mut q: Vec<T> = (0..n).map(|i| T::one() + lit::<T>(((i * 7919) % 101) as f64 / 101.0)).collect();
    let s = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= s);

    let max_steps = n.min(400);
    let mut basis: Vec<Vec<T>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    let mut previous = f64::INFINITY;
    let mut norm_estimate = 0.0f64;
    for k in 0..max_steps {
        let mut z = apply_sq(&basis[k])?;
        let a = dot(&z, &basis[k]);
        alphas.push(to_f64(a));
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&z, b);
                z.iter_mut().zip(b).for_each(|(zi, &bi)| *zi -= c * bi);
            }
        }
        let beta = dot(&z, &z).sqrt();

        let m = alphas.len();
        let tri = nalgebra::DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = nalgebra::SymmetricEigen::new(tri);
        let (idx, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty tridiagonal");
        norm_estimate = norm_estimate.max(eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let residual_bound = to_f64(beta) * eig.eigenvectors[(m - 1, idx)].abs();
        history.push(theta.max(0.0).sqrt());
        let exhausted = to_f64(beta) <= 1e-14 * norm_estimate.max(1e-300) || k + 1 == max_steps;
        let settled = residual_bound <= 1e-13 * norm_estimate && (theta - previous).abs() <= 1e-14 * norm_estimate;
        if settled || exhausted {
            if !settled && residual_bound > 1e-8 * norm_estimate {
                break;
            }
            let mut x = vec![T::zero(); n];
            for (j, b) in basis.iter().enumerate() {
                let c = lit::<T>(eig.eigenvectors[(j, idx)]);
                x.iter_mut().zip(b).for_each(|(xi, &bi)| *xi += c * bi);
            }
            let mut mx = vec![T::zero(); n];
            lin.apply(&x, &mut mx);
            let sigma = dot(&mx, &mx).sqrt() / dot(&x, &x).sqrt();
            let rayleigh = dot(&x, &mx) / dot(&x, &x);
            return Ok(Hyperbolicity { sigma_min: sigma, eigenvalue: rayleigh, iterations: k + 1 });
        }
        previous = theta;
        betas.push(to_f64(beta));
        basis.push(z.iter().map(|&v| v / beta).collect());
    }
    Err(Error::Convergence {
        what: "hyperbolicity Lanczos iteration",
        iterations: history.len(),
        residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Margin of `diag(f′(v₀)) − α κ(−dΔ_h + σ)⁻¹` at `v0`.
pub fn margin_at<T: Real>(v0: &[T], params: &SystemParams<T>) -> Result<Hyperbolicity<T>> {
    params.grid.check_len(v0)?;
    let heat = HeatInverse::new(params, lit(1e-13))?;
    let diag = v0.iter().map(|&v| (params.nonlinearity.df)(v)).collect();
    smallest_singular_value(&Linearization::new(&heat, diag, params.alpha), params.grid.weights())
}

/// Margin of the linearization at an equilibrium.
pub fn hyperbolicity_margin<T: Real>(eq: &EquilibriumSolution<T>, params: &SystemParams<T>) -> Result<Hyperbolicity<T>> {
    margin_at(&eq.v0, params)
}

/// The same margin computed through the monotone inverse: the diagonal is
/// `1 / (f⁻¹)′(αw₀)` instead of `f′(v₀)`.
pub fn hyperbolicity_margin_monotone<T: Real>(
    eq: &EquilibriumSolution<T>,
    params: &SystemParams<T>,
    inverse: &MonotoneInverse<T>,
) -> Result<Hyperbolicity<T>> {
    params.grid.check_len(&eq.w0)?;
    let heat = HeatInverse::new(params, lit(1e-13))?;
    let diag = eq
        .w0
        .iter()
        .map(|&w| inverse.derivative(params.alpha * w).map(|d| T::one() / d))
        .collect::<Result<Vec<_>>>()?;
    smallest_singular_value(&Linearization::new(&heat, diag, params.alpha), params.grid.weights())
}
