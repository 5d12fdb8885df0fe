//! Steady states: roots of the pointwise equation, the monotone elliptic
//! problem, partition and near-homogeneous constructions, and the
//! hyperbolicity margin of the linearization.

pub mod construct;
pub mod inverse;
pub mod margin;
pub mod monotone;
mod newton;
pub mod roots;
pub mod solution;

pub use construct::{near_homogeneous_equilibrium, partition_equilibrium, partition_equilibrium_from};
pub use inverse::{invert_f, MonotoneInverse};
pub use margin::{hyperbolicity_margin, hyperbolicity_margin_monotone, margin_at, Hyperbolicity};
pub use monotone::solve_monotone_equilibrium;
pub use roots::{ode_roots, OdeRoot, OdeRootSet};
pub use solution::{equilibrium_residual, EquilibriumSolution, EquilibriumSource, EquilibriumSummary, Partition};

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumOptions<T> {
    /// Target for `‖f(v) − αKv‖∞`.
    pub residual_tolerance: T,
    /// Target for the monotone elliptic residual `‖G(w)‖∞`.
    pub elliptic_tolerance: T,
    pub solver_tolerance: T,
    pub max_newton: usize,
    /// Largest coupling accepted by the partition constructor.
    pub alpha_max: T,
    /// `|Ω₂|` may not exceed this fraction of `|Ω|`.
    pub delta0_fraction: T,
    pub margin_threshold: T,
}

impl<T: Real> Default for EquilibriumOptions<T> {
    fn default() -> Self {
        Self {
            residual_tolerance: lit(1e-12),
            elliptic_tolerance: lit(1e-11),
            solver_tolerance: lit(1e-13),
            max_newton: 50,
            alpha_max: lit(0.05),
            delta0_fraction: lit(0.05),
            margin_threshold: lit(1e-6),
        }
    }
}

impl<T: Real> EquilibriumOptions<T> {
    pub fn delta0(&self, domain_measure: T) -> T {
        self.delta0_fraction * domain_measure
    }
}
