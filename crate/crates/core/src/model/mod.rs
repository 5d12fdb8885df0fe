//! Grids, nonlinearities, system parameters and the forest reduction.

pub mod forest;
pub mod grid;
pub mod nonlinearity;
pub mod params;
pub mod polynomial;

pub use forest::{forest_reduce, ForestParams, ForestReduction};
pub use grid::Grid;
pub use nonlinearity::{validate_assumptions, AssumptionCheck, AssumptionConstants, NonlinearitySpec, ValidationReport};
pub use params::{FieldState, HeatCoefficients, SystemParams};
pub use polynomial::Polynomial;

/// Builds a grid; see [`Grid::new`].
pub fn make_grid<T: crate::Real>(dim: usize, extents: &[T], nodes_per_axis: &[usize]) -> crate::Result<Grid<T>> {
    Grid::new(dim, extents, nodes_per_axis)
}
