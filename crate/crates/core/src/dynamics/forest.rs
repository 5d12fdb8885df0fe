//! Direct integration of the forest model in its original variables
//! `(u, v, w)` and comparison with the reduced canonical system.

use serde::Serialize;

use crate::dynamics::operators::HelmholtzSolver;
use crate::dynamics::stepper::{Stepper, StepperConfig, BLOW_UP_THRESHOLD};
use crate::error::{Error, Result};
use crate::model::{forest_reduce, FieldState, ForestParams, Grid, SystemParams};
use crate::scalar::{from_usize, lit, max_abs, to_f64, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestState<T> {
    pub t: T,
    /// Young trees.
    pub u: Vec<T>,
    /// Old trees.
    pub v: Vec<T>,
    /// Seeds.
    pub w: Vec<T>,
}

/// Time discretizations of the forest system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForestScheme {
    /// Advances the old-tree flux `q = fu − hv` with
    /// `q⁺(1 + dt(h + γ(v) + f)) = q + dt(fβδw − h(γ(v) + f)v)`, then
    /// `v⁺ = v + dt q⁺` and `u⁺ = (q⁺ + hv⁺)/f`, then the seed solve.
    Flux,
    /// Backward Euler on each equation in turn:
    /// `u⁺ = (u + dtβδw)/(1 + dt(γ(v) + f))`, `v⁺ = (v + dt f u⁺)/(1 + dt h)`,
    /// then the seed solve.
    Sequential,
}

pub struct ForestStepper<T> {
    params: ForestParams<T>,
    dt: T,
    scheme: ForestScheme,
    seeds: HelmholtzSolver<T>,
}

impl<T: Real> ForestStepper<T> {
    pub fn new(params: &ForestParams<T>, grid: &Grid<T>, cfg: &StepperConfig<T>, scheme: ForestScheme) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        let dt = cfg.dt;
        let seeds = HelmholtzSolver::new(grid, T::one() + dt * params.seed_loss, dt * params.diffusivity, cfg.solver_tolerance)?;
        Ok(Self { params: params.clone(), dt, scheme, seeds })
    }

    pub fn advance(&self, s: &mut ForestState<T>) -> Result<()> {
        let p = &self.params;
        let dt = self.dt;
        let (f, h) = (p.maturation, p.old_mortality);
        let germ = p.seed_loss * p.germination;
        for k in 0..s.v.len() {
            let (u, v, w) = (s.u[k], s.v[k], s.w[k]);
            let loss = p.gamma(v) + f;
            match self.scheme {
                ForestScheme::Flux => {
                    let q = f * u - h * v;
                    let q1 = (q + dt * (f * germ * w - h * loss * v)) / (T::one() + dt * (h + loss));
                    let v1 = v + dt * q1;
                    s.v[k] = v1;
                    s.u[k] = (q1 + h * v1) / f;
                }
                ForestScheme::Sequential => {
                    let u1 = (u + dt * germ * w) / (T::one() + dt * loss);
                    s.u[k] = u1;
                    s.v[k] = (v + dt * f * u1) / (T::one() + dt * h);
                }
            }
        }
        for (w, &v) in s.w.iter_mut().zip(&s.v) {
            *w += dt * p.seed_production * v;
        }
        self.seeds.solve_in_place(&mut s.w)?;
        s.t += dt;
        let limit = lit::<T>(BLOW_UP_THRESHOLD);
        for field in [&s.u, &s.v, &s.w] {
            if let Some((node, &x)) = field.iter().enumerate().find(|(_, x)| !(x.abs() <= limit)) {
                return Err(Error::BlowUp { t: to_f64(s.t), node, value: to_f64(x) });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestComparison {
    /// `max_t ‖v_flux − v_canonical‖∞`.
    pub flux_discrepancy: f64,
    /// `max_t ‖v_sequential − v_canonical‖∞`.
    pub sequential_discrepancy: f64,
    /// `max_t ‖u_flux − (∂ₜv + hv)/f‖∞` with `∂ₜv` from the canonical run.
    pub young_discrepancy: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// Running discrepancies at `times`.
    pub flux_series: Vec<f64>,
    pub sequential_series: Vec<f64>,
}

/// Integrates the forest model directly with both schemes and, in
/// lockstep, the reduced canonical system from the corresponding data
/// `(v, ∂ₜv = fu − hv, w)`.
pub fn forest_comparison<T: Real>(
    params: &ForestParams<T>,
    grid: &Grid<T>,
    initial: &ForestState<T>,
    cfg: &StepperConfig<T>,
    horizon: T,
) -> Result<ForestComparison> {
    for field in [&initial.u, &initial.v, &initial.w] {
        grid.check_len(field)?;
    }
    let red = forest_reduce(params)?;
    let canon = SystemParams::with_heat(red.coupling, red.nonlinearity.clone(), grid.clone(), red.heat)?;
    let stepper = Stepper::new(&canon, cfg)?;
    let flux = ForestStepper::new(params, grid, cfg, ForestScheme::Flux)?;
    let seq = ForestStepper::new(params, grid, cfg, ForestScheme::Sequential)?;

    let vt0 = initial.u.iter().zip(&initial.v).map(|(&u, &v)| red.velocity(u, v)).collect();
    let mut c = FieldState::new(initial.t, initial.v.clone(), vt0, initial.w.clone());
    let mut a = initial.clone();
    let mut b = initial.clone();
    let steps = (horizon / cfg.dt).round().to_usize().unwrap_or(0).max(1);
    let stride = cfg.snapshot_stride;
    let mut out = ForestComparison {
        flux_discrepancy: 0.0,
        sequential_discrepancy: 0.0,
        young_discrepancy: 0.0,
        steps,
        times: vec![to_f64(initial.t)],
        flux_series: vec![0.0],
        sequential_series: vec![0.0],
    };
    let sup = |x: &[T], y: &[T]| -> f64 {
        let d: Vec<T> = x.iter().zip(y).map(|(&p, &q)| p - q).collect();
        to_f64(max_abs(&d))
    };
    for n in 1..=steps {
        stepper.advance(&mut c, None, None)?;
        flux.advance(&mut a)?;
        seq.advance(&mut b)?;
        let df = sup(&a.v, &c.v);
        let ds = sup(&b.v, &c.v);
        let young: Vec<T> = c.v.iter().zip(&c.vt).map(|(&v, &vt)| red.young_density(v, vt)).collect();
        out.flux_discrepancy = out.flux_discrepancy.max(df);
        out.sequential_discrepancy = out.sequential_discrepancy.max(ds);
        out.young_discrepancy = out.young_discrepancy.max(sup(&a.u, &young));
        if n % stride == 0 || n == steps {
            out.times.push(to_f64(initial.t + from_usize::<T>(n) * cfg.dt));
            out.flux_series.push(out.flux_discrepancy);
            out.sequential_series.push(out.sequential_discrepancy);
        }
    }
    Ok(out)
}
