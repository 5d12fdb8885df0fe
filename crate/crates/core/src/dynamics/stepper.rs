use crate::dynamics::operators::HelmholtzSolver;
use crate::error::{Error, Result};
use crate::model::{FieldState, SystemParams};
use crate::scalar::{lit, to_f64, Real};

/// Magnitude above which a field is treated as blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig<T> {
    pub dt: T,
    /// Relative residual tolerance of iterative (2D) heat solves.
    pub solver_tolerance: T,
    /// Diagnostics and snapshots are taken every `snapshot_stride` steps.
    pub snapshot_stride: usize,
}

impl<T: Real> StepperConfig<T> {
    pub fn new(dt: T) -> Self {
        Self { dt, solver_tolerance: lit(1e-10), snapshot_stride: 1 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::Config(format!("stepper.dt must be positive, got {}", self.dt)));
        }
        if !(self.solver_tolerance > T::zero() && self.solver_tolerance <= lit(1e-6)) {
            return Err(Error::Config(format!(
                "stepper.solver_tolerance must lie in (0, 1e-6], got {}",
                self.solver_tolerance
            )));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("stepper.snapshot_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Lie-splitting IMEX integrator:
///
/// 1. `vtⁿ⁺¹ = (vtⁿ + dt(αwⁿ − f(vⁿ))) / (1 + dt φ(vⁿ))` node by node,
/// 2. `vⁿ⁺¹ = vⁿ + dt vtⁿ⁺¹`,
/// 3. `(I + dt(−dΔ_h + σ)) wⁿ⁺¹ = wⁿ + dt κ vⁿ⁺¹`.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    params: SystemParams<T>,
    cfg: StepperConfig<T>,
    heat: HelmholtzSolver<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(params: &SystemParams<T>, cfg: &StepperConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let h = params.heat;
        let heat = HelmholtzSolver::new(
            &params.grid,
            T::one() + cfg.dt * h.decay,
            cfg.dt * h.diffusivity,
            cfg.solver_tolerance,
        )?;
        Ok(Self { params: params.clone(), cfg: *cfg, heat })
    }

    pub fn params(&self) -> &SystemParams<T> {
        &self.params
    }

    pub fn config(&self) -> &StepperConfig<T> {
        &self.cfg
    }

    /// Advances `state` by one step. Optional source terms are added to the
    /// velocity equation (evaluated at `tⁿ`) and to the heat equation
    /// (evaluated at `tⁿ⁺¹`).
    pub fn advance(&self, state: &mut FieldState<T>, v_source: Option<&[T]>, w_source: Option<&[T]>) -> Result<()> {
        let dt = self.cfg.dt;
        let alpha = self.params.alpha;
        let nl = &self.params.nonlinearity;
        let gain = self.params.heat.source_gain;

        for k in 0..state.v.len() {
            let v = state.v[k];
            let mut force = alpha * state.w[k] - (nl.f)(v);
            if let Some(g) = v_source {
                force += g[k];
            }
            let vt = (state.vt[k] + dt * force) / (T::one() + dt * (nl.phi)(v));
            state.vt[k] = vt;
            state.v[k] = v + dt * vt;
        }
        for k in 0..state.w.len() {
            let mut src = gain * state.v[k];
            if let Some(g) = w_source {
                src += g[k];
            }
            state.w[k] += dt * src;
        }
        self.heat.solve_in_place(&mut state.w)?;
        state.t += dt;
        check_blow_up(state)
    }

    pub fn step(&self, state: &FieldState<T>) -> Result<FieldState<T>> {
        let mut next = state.clone();
        self.advance(&mut next, None, None)?;
        Ok(next)
    }
}

fn check_blow_up<T: Real>(state: &FieldState<T>) -> Result<()> {
    let limit = lit::<T>(BLOW_UP_THRESHOLD);
    for field in [&state.v, &state.vt, &state.w] {
        if let Some((node, &x)) = field.iter().enumerate().find(|(_, x)| !(x.abs() <= limit)) {
            return Err(Error::BlowUp { t: to_f64(state.t), node, value: to_f64(x) });
        }
    }
    Ok(())
}

/// Single IMEX step; see [`Stepper`].
pub fn step<T: Real>(state: &FieldState<T>, params: &SystemParams<T>, cfg: &StepperConfig<T>) -> Result<FieldState<T>> {
    state.validate(&params.grid)?;
    Stepper::new(params, cfg)?.step(state)
}
