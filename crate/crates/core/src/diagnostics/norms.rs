use crate::dynamics::operators::gradient_norm_sq;
use crate::error::{Error, Result};
use crate::model::{FieldState, Grid};
use crate::scalar::{max_abs, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    /// Maps `p ∈ {1, 2, ∞}` onto a norm.
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p == 1.0 {
            Ok(Norm::L1)
        } else if p == 2.0 {
            Ok(Norm::L2)
        } else if p == f64::INFINITY {
            Ok(Norm::Linf)
        } else {
            Err(Error::Domain(format!("unsupported norm exponent {p}; expected 1, 2 or infinity")))
        }
    }
}

pub fn norm<T: Real>(field: &[T], grid: &Grid<T>, which: Norm) -> T {
    match which {
        Norm::L1 => grid.weights().iter().zip(field).map(|(&w, &x)| w * x.abs()).sum(),
        Norm::L2 => grid.inner(field, field).sqrt(),
        Norm::Linf => max_abs(field),
    }
}

/// Quadrature-weighted `Lᵖ` norm for `p ∈ {1, 2, ∞}`.
pub fn lp_norm<T: Real>(field: &[T], grid: &Grid<T>, p: f64) -> Result<T> {
    grid.check_len(field)?;
    Ok(norm(field, grid, Norm::from_exponent(p)?))
}

pub fn h1_norm<T: Real>(field: &[T], grid: &Grid<T>) -> T {
    (grid.inner(field, field) + gradient_norm_sq(grid, field)).sqrt()
}

/// `max(‖v‖∞, ‖∂ₜv‖∞, ‖w‖∞ + ‖w‖_{H¹})`.
pub fn phase_norm<T: Real>(state: &FieldState<T>, grid: &Grid<T>) -> Result<T> {
    state.validate(grid)?;
    Ok(max_abs(&state.v)
        .max(max_abs(&state.vt))
        .max(max_abs(&state.w) + h1_norm(&state.w, grid)))
}

pub fn diff<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_one_has_unit_norms() {
        let g = Grid::<f64>::interval(1.0, 51).unwrap();
        let one = vec![1.0; 51];
        for p in [1.0, 2.0, f64::INFINITY] {
            assert!((lp_norm(&one, &g, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_l2_norm() {
        let g = Grid::<f64>::interval(1.0, 1001).unwrap();
        let c = g.sample(|p| (PI * p[0]).cos());
        assert!((lp_norm(&c, &g, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn zero_state_phase_norm() {
        let g = Grid::<f64>::rectangle([1.0, 1.0], [5, 5]).unwrap();
        assert_eq!(phase_norm(&FieldState::zeros(&g), &g).unwrap(), 0.0);
    }

    #[test]
    fn unsupported_exponent() {
        let g = Grid::<f64>::interval(1.0, 5).unwrap();
        assert!(matches!(lp_norm(&[0.0; 5], &g, 3.0), Err(Error::Domain(_))));
    }
}
