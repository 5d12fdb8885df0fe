use crate::error::{Error, Result};
use crate::model::grid::Grid;
use crate::model::nonlinearity::NonlinearitySpec;
use crate::scalar::{to_f64, Real};

/// Coefficients of the heat equation `∂ₜw − dΔw + σw = κv`.
/// The canonical system uses `d = σ = κ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCoefficients<T> {
    pub diffusivity: T,
    pub decay: T,
    pub source_gain: T,
}

impl<T: Real> HeatCoefficients<T> {
    pub fn canonical() -> Self {
        Self { diffusivity: T::one(), decay: T::one(), source_gain: T::one() }
    }

    pub fn is_canonical(&self) -> bool {
        *self == Self::canonical()
    }
}

impl<T: Real> Default for HeatCoefficients<T> {
    fn default() -> Self {
        Self::canonical()
    }
}

#[derive(Debug, Clone)]
pub struct SystemParams<T> {
    /// Coupling `α` in `∂ₜ²v + φ(v)∂ₜv + f(v) = αw`.
    pub alpha: T,
    pub nonlinearity: NonlinearitySpec<T>,
    pub grid: Grid<T>,
    pub heat: HeatCoefficients<T>,
}

impl<T: Real> SystemParams<T> {
    pub fn new(alpha: T, nonlinearity: NonlinearitySpec<T>, grid: Grid<T>) -> Result<Self> {
        Self::with_heat(alpha, nonlinearity, grid, HeatCoefficients::canonical())
    }

    /// `alpha = 0` is accepted for decoupled experiments.
    pub fn with_heat(
        alpha: T,
        nonlinearity: NonlinearitySpec<T>,
        grid: Grid<T>,
        heat: HeatCoefficients<T>,
    ) -> Result<Self> {
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Domain(format!("coupling alpha must be non-negative, got {alpha}")));
        }
        if !(heat.diffusivity > T::zero() && heat.decay > T::zero() && heat.source_gain > T::zero()) {
            return Err(Error::Domain("heat coefficients must be positive".into()));
        }
        Ok(Self { alpha, nonlinearity, grid, heat })
    }

    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        Self::with_heat(alpha, self.nonlinearity.clone(), self.grid.clone(), self.heat)
    }
}

/// Discrete phase-space point `(v, ∂ₜv, w)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub t: T,
    pub v: Vec<T>,
    pub vt: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Real> FieldState<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        let n = grid.node_count();
        Self { t: T::zero(), v: vec![T::zero(); n], vt: vec![T::zero(); n], w: vec![T::zero(); n] }
    }

    pub fn new(t: T, v: Vec<T>, vt: Vec<T>, w: Vec<T>) -> Self {
        Self { t, v, vt, w }
    }

    pub fn validate(&self, grid: &Grid<T>) -> Result<()> {
        for field in [&self.v, &self.vt, &self.w] {
            grid.check_len(field)?;
        }
        for (k, x) in self.v.iter().chain(&self.vt).chain(&self.w).enumerate() {
            if !x.is_finite() {
                return Err(Error::BlowUp { t: to_f64(self.t), node: k % grid.node_count(), value: to_f64(*x) });
            }
        }
        Ok(())
    }
}
