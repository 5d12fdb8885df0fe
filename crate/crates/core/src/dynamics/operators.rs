//! Neumann finite-difference operators on [`Grid`]s.
//!
//! The discrete Laplacian uses central differences with mirror ghost nodes.
//! With trapezoidal weights it is self-adjoint in the quadrature inner
//! product and `(−Δ_h u, u) = ‖∇_h u‖²`, where the discrete gradient lives
//! on grid edges.

use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, TwoSidedTridiagonal};
use crate::model::Grid;
use crate::scalar::{lit, Real};

fn laplacian_1d_line<T: Real>(u: &[T], out: &mut [T], stride: usize, offset: usize, n: usize, inv_h2: T, add: bool) {
    let two = lit::<T>(2.0);
    for i in 0..n {
        let c = u[offset + i * stride];
        let left = if i == 0 { u[offset + stride] } else { u[offset + (i - 1) * stride] };
        let right = if i == n - 1 { u[offset + (n - 2) * stride] } else { u[offset + (i + 1) * stride] };
        let val = (left - two * c + right) * inv_h2;
        let slot = &mut out[offset + i * stride];
        if add {
            *slot += val;
        } else {
            *slot = val;
        }
    }
}

/// Writes `Δ_h u` into `out`.
pub fn laplacian_into<T: Real>(grid: &Grid<T>, u: &[T], out: &mut [T]) {
    let nodes = grid.nodes_per_axis();
    let h = grid.spacing();
    let nx = nodes[0];
    let ix2 = T::one() / (h[0] * h[0]);
    if grid.dim() == 1 {
        laplacian_1d_line(u, out, 1, 0, nx, ix2, false);
        return;
    }
    let ny = nodes[1];
    let iy2 = T::one() / (h[1] * h[1]);
    for j in 0..ny {
        laplacian_1d_line(u, out, 1, j * nx, nx, ix2, false);
    }
    for i in 0..nx {
        laplacian_1d_line(u, out, nx, i, ny, iy2, true);
    }
}

/// Discrete Neumann Laplacian `Δ_h u`.
pub fn laplacian_apply<T: Real>(grid: &Grid<T>, u: &[T]) -> Result<Vec<T>> {
    grid.check_len(u)?;
    let mut out = vec![T::zero(); u.len()];
    laplacian_into(grid, u, &mut out);
    Ok(out)
}

/// `‖∇_h u‖²` as a sum over grid edges, weighted so that it equals `(−Δ_h u, u)`.
pub fn gradient_norm_sq<T: Real>(grid: &Grid<T>, u: &[T]) -> T {
    let nodes = grid.nodes_per_axis();
    let h = grid.spacing();
    let nx = nodes[0];
    let edge_sum = |line: &dyn Fn(usize) -> T, n: usize, h: T| -> T {
        (0..n - 1)
            .map(|i| {
                let d = line(i + 1) - line(i);
                d * d
            })
            .sum::<T>()
            / h
    };
    if grid.dim() == 1 {
        return edge_sum(&|i| u[i], nx, h[0]);
    }
    let ny = nodes[1];
    let wx = grid.axis_weights(0);
    let wy = grid.axis_weights(1);
    let mut total = T::zero();
    for j in 0..ny {
        total += wy[j] * edge_sum(&|i| u[j * nx + i], nx, h[0]);
    }
    for i in 0..nx {
        total += wx[i] * edge_sum(&|j| u[j * nx + i], ny, h[1]);
    }
    total
}

/// Solver for `(−dΔ_h + σ) u = rhs` with Neumann boundary conditions.
///
/// 1D systems are factored once and solved directly; 2D systems use
/// conjugate gradients in the quadrature inner product.
#[derive(Debug, Clone)]
pub struct HelmholtzSolver<T> {
    grid: Grid<T>,
    shift: T,
    diffusivity: T,
    tolerance: T,
    max_iterations: usize,
    factor: Option<TwoSidedTridiagonal<T>>,
}

impl<T: Real> HelmholtzSolver<T> {
    pub fn new(grid: &Grid<T>, shift: T, diffusivity: T, tolerance: T) -> Result<Self> {
        if !(shift > T::zero()) || !(diffusivity > T::zero()) {
            return Err(Error::Domain(format!(
                "Helmholtz solve needs positive shift and diffusivity, got {shift} and {diffusivity}"
            )));
        }
        let factor = if grid.dim() == 1 {
            let n = grid.node_count();
            let h = grid.spacing()[0];
            let k = diffusivity / (h * h);
            let mut lower = vec![-k; n];
            let mut upper = vec![-k; n];
            lower[0] = T::zero();
            upper[n - 1] = T::zero();
            upper[0] = -k * lit(2.0);
            lower[n - 1] = -k * lit(2.0);
            let diag = vec![shift + k * lit(2.0); n];
            Some(TwoSidedTridiagonal::new(&lower, &diag, &upper)?)
        } else {
            None
        };
        Ok(Self {
            grid: grid.clone(),
            shift,
            diffusivity,
            tolerance,
            max_iterations: 20 * grid.node_count().max(100),
            factor,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Applies `(−dΔ_h + σ)`.
    pub fn apply_into(&self, u: &[T], out: &mut [T]) {
        laplacian_into(&self.grid, u, out);
        for (o, &ui) in out.iter_mut().zip(u) {
            *o = self.shift * ui - self.diffusivity * *o;
        }
    }

    /// Solves in place; `x` holds the right-hand side on entry. In 2D the
    /// iteration starts from the scaled right-hand side.
    pub fn solve_in_place(&self, x: &mut [T]) -> Result<()> {
        self.grid.check_len(x)?;
        if let Some(f) = &self.factor {
            f.solve_in_place(x);
            return Ok(());
        }
        let rhs = x.to_vec();
        let inv = T::one() / self.shift;
        x.iter_mut().for_each(|v| *v *= inv);
        conjugate_gradient(
            |u, out| self.apply_into(u, out),
            &rhs,
            x,
            self.grid.weights(),
            self.tolerance,
            self.max_iterations,
        )?;
        Ok(())
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// One-off solve of `(−dΔ_h + σ) u = rhs`.
pub fn helmholtz_solve<T: Real>(grid: &Grid<T>, rhs: &[T], shift: T, diffusivity: T, tolerance: T) -> Result<Vec<T>> {
    HelmholtzSolver::new(grid, shift, diffusivity, tolerance)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn discrete_eigenvalue(k: f64, h: f64) -> f64 {
        2.0 / (h * h) * (1.0 - (k * PI * h).cos())
    }

    #[test]
    fn annihilates_constants() {
        for g in [Grid::<f64>::interval(1.0, 11).unwrap(), Grid::rectangle([1.0, 2.0], [7, 9]).unwrap()] {
            let lap = laplacian_apply(&g, &vec![3.5; g.node_count()]).unwrap();
            assert!(lap.iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn cosine_is_discrete_eigenfunction() {
        let g = Grid::<f64>::interval(1.0, 101).unwrap();
        let h = g.spacing()[0];
        let u = g.sample(|p| (PI * p[0]).cos());
        let lam = discrete_eigenvalue(1.0, h);
        let lap = laplacian_apply(&g, &u).unwrap();
        for (l, x) in lap.iter().zip(&u) {
            assert!((l + lam * x).abs() <= 1e-12 * lam);
        }
    }

    #[test]
    fn linear_field_is_harmonic_in_interior() {
        let g = Grid::<f64>::interval(2.0, 21).unwrap();
        let u = g.sample(|p| 3.0 * p[0] - 1.0);
        let lap = laplacian_apply(&g, &u).unwrap();
        for l in &lap[1..20] {
            assert!(l.abs() < 1e-9);
        }
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        let g = Grid::<f64>::interval(1.0, 11).unwrap();
        assert!(matches!(laplacian_apply(&g, &[0.0; 5]), Err(Error::Shape { .. })));
    }

    #[test]
    fn symmetric_in_quadrature_and_gradient_identity() {
        for g in [Grid::<f64>::interval(1.3, 17).unwrap(), Grid::rectangle([1.0, 0.7], [9, 6]).unwrap()] {
            let a = g.sample(|p| (3.0 * p[0]).sin() + p[1] * p[1]);
            let b = g.sample(|p| (p[0] - 0.2 * p[1]).exp());
            let la = laplacian_apply(&g, &a).unwrap();
            let lb = laplacian_apply(&g, &b).unwrap();
            let s1 = g.inner(&la, &b);
            let s2 = g.inner(&a, &lb);
            assert!((s1 - s2).abs() < 1e-10 * s1.abs().max(1.0));
            let e = -g.inner(&la, &a);
            assert!((e - gradient_norm_sq(&g, &a)).abs() < 1e-10 * e.max(1.0));
        }
    }

    #[test]
    fn helmholtz_constant_rhs() {
        let g = Grid::<f64>::interval(1.0, 33).unwrap();
        let u = helmholtz_solve(&g, &vec![2.5; 33], 1.0, 1.0, 1e-12).unwrap();
        assert!(u.iter().all(|x| (x - 2.5).abs() < 1e-13));
    }

    #[test]
    fn helmholtz_mode_two() {
        let g = Grid::<f64>::interval(1.0, 65).unwrap();
        let h = g.spacing()[0];
        let rhs = g.sample(|p| (2.0 * PI * p[0]).cos());
        let u = helmholtz_solve(&g, &rhs, 1.0, 1.0, 1e-12).unwrap();
        let lam = discrete_eigenvalue(2.0, h);
        for (x, r) in u.iter().zip(&rhs) {
            assert!((x - r / (1.0 + lam)).abs() < 1e-14);
        }
    }

    #[test]
    fn helmholtz_spike_is_positive_everywhere() {
        for g in [Grid::<f64>::interval(1.0, 41).unwrap(), Grid::rectangle([1.0, 1.0], [15, 15]).unwrap()] {
            let mut rhs = vec![0.0; g.node_count()];
            rhs[g.node_count() / 3] = 1.0;
            let u = helmholtz_solve(&g, &rhs, 1.0, 1.0, 1e-12).unwrap();
            assert!(u.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn helmholtz_2d_residual() {
        let g = Grid::<f64>::rectangle([1.0, 2.0], [21, 31]).unwrap();
        let rhs = g.sample(|p| (p[0] * 5.0).sin() * (p[1] * 2.0).cos() + 0.3);
        let s = HelmholtzSolver::new(&g, 1.7, 0.4, 1e-10).unwrap();
        let u = s.solve(&rhs).unwrap();
        let mut r = vec![0.0; g.node_count()];
        s.apply_into(&u, &mut r);
        let err = r.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(err <= 1e-10 * scale);
    }

    #[test]
    fn rejects_non_positive_shift() {
        let g = Grid::<f64>::interval(1.0, 5).unwrap();
        assert!(helmholtz_solve(&g, &[1.0; 5], 0.0, 1.0, 1e-10).is_err());
    }
}
