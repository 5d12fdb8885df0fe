use std::sync::Arc;

use serde::Serialize;

use crate::dynamics::operators::laplacian_into;
use crate::dynamics::stepper::{Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::model::{FieldState, Grid, HeatCoefficients, NonlinearitySpec, SystemParams};
use crate::scalar::{from_usize, max_abs, to_f64, Real};

/// `(t, x) ↦ [u, ∂ₜu, second]` where `second` is `∂ₜ²u` for the `v`
/// component and `Δu` for the `w` component.
pub type ExactField<T> = Arc<dyn Fn(T, [T; 2]) -> [T; 3] + Send + Sync>;

/// Exact solution with the forcing it needs.
#[derive(Clone)]
pub struct ManufacturedSolution<T> {
    pub v: ExactField<T>,
    pub w: ExactField<T>,
}

#[derive(Clone)]
pub struct MmsProblem<T> {
    pub alpha: T,
    pub nonlinearity: NonlinearitySpec<T>,
    pub heat: HeatCoefficients<T>,
    pub exact: ManufacturedSolution<T>,
    pub horizon: T,
}

impl<T: Real> MmsProblem<T> {
    /// `w = e^{−t}cos(πx)` with `v ≡ 0` and no coupling.
    pub fn heat_only() -> Self {
        let pi = T::from_f64(std::f64::consts::PI).expect("π representable");
        Self {
            alpha: T::zero(),
            nonlinearity: NonlinearitySpec::monotone_cubic(),
            heat: HeatCoefficients::canonical(),
            exact: ManufacturedSolution {
                v: Arc::new(|_, _| [T::zero(); 3]),
                w: Arc::new(move |t, x| {
                    let w = (-t).exp() * (pi * x[0]).cos();
                    [w, -w, -pi * pi * w]
                }),
            },
            horizon: T::one(),
        }
    }

    /// Coupled smooth recipe for the monotone cubic at `α = 1/2`:
    /// `v = e^{−t}cos(πx)/2`, `w = cos(t)cos(πx)`.
    pub fn coupled() -> Self {
        let pi = T::from_f64(std::f64::consts::PI).expect("π representable");
        let half = T::from_f64(0.5).expect("representable");
        Self {
            alpha: half,
            nonlinearity: NonlinearitySpec::monotone_cubic(),
            heat: HeatCoefficients::canonical(),
            exact: ManufacturedSolution {
                v: Arc::new(move |t, x| {
                    let v = half * (-t).exp() * (pi * x[0]).cos();
                    [v, -v, v]
                }),
                w: Arc::new(move |t, x| {
                    let c = (pi * x[0]).cos();
                    [t.cos() * c, -t.sin() * c, -pi * pi * t.cos() * c]
                }),
            },
            horizon: T::one(),
        }
    }
}

/// How the heat forcing treats the Laplacian of the exact `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingMode {
    /// Continuum `Δw`: the discrete solution carries spatial error.
    Continuum,
    /// `Δ_h w` on the grid: the exact nodal values solve the semi-discrete
    /// system, isolating the temporal error.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub spacing: f64,
    pub dt: f64,
    /// Max-norm error in `(v, ∂ₜv, w)` at the horizon.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderEstimate {
    pub levels: Vec<ConvergenceLevel>,
    /// Least-squares slope of log-error against log-spacing (spatial) or
    /// log-dt (temporal).
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub spatial: OrderEstimate,
    pub temporal: OrderEstimate,
}

fn sample<T: Real>(grid: &Grid<T>, t: T, field: &ExactField<T>, slot: usize) -> Vec<T> {
    (0..grid.node_count()).map(|k| field(t, grid.coords(k))[slot]).collect()
}

/// Runs one manufactured problem to its horizon and returns the max-norm error.
pub fn manufactured_error<T: Real>(problem: &MmsProblem<T>, grid: &Grid<T>, dt: T, mode: ForcingMode) -> Result<T> {
    let params = SystemParams::with_heat(problem.alpha, problem.nonlinearity.clone(), grid.clone(), problem.heat)?;
    let stepper = Stepper::new(&params, &StepperConfig::new(dt))?;
    let steps = (problem.horizon / dt).round().to_usize().unwrap_or(0).max(1);
    let ex = &problem.exact;
    let nl = &problem.nonlinearity;
    let h = problem.heat;
    let n = grid.node_count();
    let mut state = FieldState::new(T::zero(), sample(grid, T::zero(), &ex.v, 0), sample(grid, T::zero(), &ex.v, 1), sample(grid, T::zero(), &ex.w, 0));
    let mut gv = vec![T::zero(); n];
    let mut gw = vec![T::zero(); n];
    let mut lap = vec![T::zero(); n];
    for step in 0..steps {
        let t0 = from_usize::<T>(step) * dt;
        let t1 = t0 + dt;
        for k in 0..n {
            let x = grid.coords(k);
            let [v, vt, vtt] = (ex.v)(t0, x);
            let w = (ex.w)(t0, x)[0];
            gv[k] = vtt + (nl.phi)(v) * vt + (nl.f)(v) - problem.alpha * w;
        }
        let w1 = sample(grid, t1, &ex.w, 0);
        if mode == ForcingMode::Discrete {
            laplacian_into(grid, &w1, &mut lap);
        }
        for k in 0..n {
            let x = grid.coords(k);
            let [w, wt, lw] = (ex.w)(t1, x);
            let v = (ex.v)(t1, x)[0];
            let lap_w = if mode == ForcingMode::Discrete { lap[k] } else { lw };
            gw[k] = wt - h.diffusivity * lap_w + h.decay * w - h.source_gain * v;
        }
        stepper.advance(&mut state, Some(&gv), Some(&gw))?;
    }
    let t = from_usize::<T>(steps) * dt;
    let pairs = [
        (&state.v, sample(grid, t, &ex.v, 0)),
        (&state.vt, sample(grid, t, &ex.v, 1)),
        (&state.w, sample(grid, t, &ex.w, 0)),
    ];
    let mut err = T::zero();
    for (computed, exact) in pairs {
        let d: Vec<T> = computed.iter().zip(&exact).map(|(&a, &b)| a - b).collect();
        err = err.max(max_abs(&d));
    }
    Ok(err)
}

fn need_three(count: usize, what: &str) -> Result<()> {
    if count < 3 {
        return Err(Error::Config(format!("{what} needs at least 3 refinement levels, got {count}")));
    }
    Ok(())
}

/// Spatial order from a grid family, each paired with its own `dt`
/// (use `dt ∝ Δx²` so the temporal error does not pollute the slope).
pub fn spatial_convergence<T: Real>(problem: &MmsProblem<T>, levels: &[(Grid<T>, T)]) -> Result<OrderEstimate> {
    need_three(levels.len(), "spatial convergence")?;
    let mut out = Vec::new();
    for (grid, dt) in levels {
        let error = manufactured_error(problem, grid, *dt, ForcingMode::Continuum)?;
        out.push(ConvergenceLevel { spacing: to_f64(grid.min_spacing()), dt: to_f64(*dt), error: to_f64(error) });
    }
    let xs: Vec<f64> = out.iter().map(|l| l.spacing).collect();
    let ys: Vec<f64> = out.iter().map(|l| l.error).collect();
    let order = log_log_slope(&xs, &ys).ok_or_else(|| Error::Config("spatial levels must have distinct spacings and non-zero errors".into()))?;
    Ok(OrderEstimate { levels: out, order })
}

/// Temporal order on a fixed grid with discrete forcing.
pub fn temporal_convergence<T: Real>(problem: &MmsProblem<T>, grid: &Grid<T>, dts: &[T]) -> Result<OrderEstimate> {
    need_three(dts.len(), "temporal convergence")?;
    let mut out = Vec::new();
    for &dt in dts {
        let error = manufactured_error(problem, grid, dt, ForcingMode::Discrete)?;
        out.push(ConvergenceLevel { spacing: to_f64(grid.min_spacing()), dt: to_f64(dt), error: to_f64(error) });
    }
    let xs: Vec<f64> = out.iter().map(|l| l.dt).collect();
    let ys: Vec<f64> = out.iter().map(|l| l.error).collect();
    let order = log_log_slope(&xs, &ys).ok_or_else(|| Error::Config("temporal levels must have distinct steps and non-zero errors".into()))?;
    Ok(OrderEstimate { levels: out, order })
}

/// Both studies: `spatial` on the grid family with the heat-only recipe
/// semantics of `spatial_problem`, `temporal` on `temporal_grid`.
pub fn manufactured_convergence<T: Real>(
    spatial_problem: &MmsProblem<T>,
    levels: &[(Grid<T>, T)],
    temporal_problem: &MmsProblem<T>,
    temporal_grid: &Grid<T>,
    dts: &[T],
) -> Result<ConvergenceReport> {
    Ok(ConvergenceReport {
        spatial: spatial_convergence(spatial_problem, levels)?,
        temporal: temporal_convergence(temporal_problem, temporal_grid, dts)?,
    })
}

/// The default grid family on `[0, 1]`: `nodes ∈ {17, 33, 65}` with `dt = Δx²/4`.
pub fn default_spatial_levels<T: Real>() -> Result<Vec<(Grid<T>, T)>> {
    [17usize, 33, 65]
        .iter()
        .map(|&n| {
            let g = Grid::interval(T::one(), n)?;
            let dx = g.spacing()[0];
            Ok((g, dx * dx / from_usize(4)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_levels() {
        let p = MmsProblem::<f64>::heat_only();
        let levels = default_spatial_levels::<f64>().unwrap();
        assert!(matches!(spatial_convergence(&p, &levels[..2]), Err(Error::Config(_))));
        let g = Grid::interval(1.0, 17).unwrap();
        assert!(matches!(temporal_convergence(&p, &g, &[0.1, 0.05]), Err(Error::Config(_))));
    }

    #[test]
    fn heat_only_is_second_order_in_space() {
        let est = spatial_convergence(&MmsProblem::<f64>::heat_only(), &default_spatial_levels().unwrap()).unwrap();
        assert!((est.order - 2.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn coupled_is_first_order_in_time() {
        let g = Grid::interval(1.0, 33).unwrap();
        let est = temporal_convergence(&MmsProblem::<f64>::coupled(), &g, &[0.02, 0.01, 0.005, 0.0025]).unwrap();
        assert!((est.order - 1.0).abs() < 0.15, "{est:?}");
        for w in est.levels.windows(2) {
            let r = w[0].error / w[1].error;
            assert!(r > 1.7 && r < 2.3, "{r}");
        }
    }
}
