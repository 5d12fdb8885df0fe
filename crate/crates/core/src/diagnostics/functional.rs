use crate::diagnostics::norms::{h1_norm, norm, Norm};
use crate::diagnostics::seminorm::lip_seminorm;
use crate::dynamics::operators::gradient_norm_sq;
use crate::error::Result;
use crate::model::{FieldState, SystemParams};
use crate::scalar::{lit, Real};

/// Lyapunov functional
///
/// `L = ‖∂ₜv‖² + 2∫F(v) − 2α(v, w) + (α/κ)(d‖∇_h w‖² + σ‖w‖²)`,
///
/// which for the canonical heat coefficients reduces to
/// `‖∂ₜv‖² + 2∫F(v) − 2α(v, w) + α‖∇_h w‖² + α‖w‖²`.
pub fn lyapunov<T: Real>(state: &FieldState<T>, params: &SystemParams<T>) -> Result<T> {
    let grid = &params.grid;
    state.validate(grid)?;
    Ok(lyapunov_unchecked(state, params))
}

pub(crate) fn lyapunov_unchecked<T: Real>(state: &FieldState<T>, params: &SystemParams<T>) -> T {
    let grid = &params.grid;
    let a = params.alpha;
    let heat = params.heat;
    let two = lit::<T>(2.0);
    let potential: Vec<T> = state.v.iter().map(|&v| (params.nonlinearity.potential)(v)).collect();
    let kinetic = grid.inner(&state.vt, &state.vt);
    let heat_energy = heat.diffusivity * gradient_norm_sq(grid, &state.w) + heat.decay * grid.inner(&state.w, &state.w);
    kinetic + two * grid.integrate(&potential) - two * a * grid.inner(&state.v, &state.w)
        + a / heat.source_gain * heat_energy
}

/// Instantaneous dissipation rate `2(φ(v)∂ₜv, ∂ₜv) + (2α/κ)‖∂ₜw‖²`, the
/// exact decay rate of [`lyapunov`] along continuous trajectories.
pub fn energy_dissipation_rate<T: Real>(state: &FieldState<T>, wt: &[T], params: &SystemParams<T>) -> T {
    let grid = &params.grid;
    let damped: Vec<T> = state
        .v
        .iter()
        .zip(&state.vt)
        .map(|(&v, &vt)| (params.nonlinearity.phi)(v) * vt * vt)
        .collect();
    let two = lit::<T>(2.0);
    two * grid.integrate(&damped) + two * params.alpha / params.heat.source_gain * grid.inner(wt, wt)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormSample<T> {
    pub h: T,
    pub v: T,
    pub vt: T,
}

/// Norms and functionals of one phase-space point.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSample<T> {
    pub t: T,
    pub lyapunov: T,
    pub l1_v: T,
    pub l2_v: T,
    pub linf_v: T,
    pub l1_vt: T,
    pub l2_vt: T,
    pub linf_vt: T,
    pub l2_w: T,
    pub h1_w: T,
    pub linf_w: T,
    pub l1_wt: T,
    pub l2_wt: T,
    pub linf_wt: T,
    pub l1_vtt: T,
    pub seminorms: Vec<SeminormSample<T>>,
}

/// Evaluates every diagnostic at `state`, given estimates of `∂ₜw` and `∂ₜ²v`.
pub fn diagnose<T: Real>(
    state: &FieldState<T>,
    wt: &[T],
    vtt: &[T],
    params: &SystemParams<T>,
    seminorm_h: &[T],
) -> Result<DiagnosticSample<T>> {
    let g = &params.grid;
    let seminorms = seminorm_h
        .iter()
        .map(|&h| {
            Ok(SeminormSample { h, v: lip_seminorm(&state.v, g, h)?, vt: lip_seminorm(&state.vt, g, h)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticSample {
        t: state.t,
        lyapunov: lyapunov_unchecked(state, params),
        l1_v: norm(&state.v, g, Norm::L1),
        l2_v: norm(&state.v, g, Norm::L2),
        linf_v: norm(&state.v, g, Norm::Linf),
        l1_vt: norm(&state.vt, g, Norm::L1),
        l2_vt: norm(&state.vt, g, Norm::L2),
        linf_vt: norm(&state.vt, g, Norm::Linf),
        l2_w: norm(&state.w, g, Norm::L2),
        h1_w: h1_norm(&state.w, g),
        linf_w: norm(&state.w, g, Norm::Linf),
        l1_wt: norm(wt, g, Norm::L1),
        l2_wt: norm(wt, g, Norm::L2),
        linf_wt: norm(wt, g, Norm::Linf),
        l1_vtt: norm(vtt, g, Norm::L1),
        seminorms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid, NonlinearitySpec};

    fn params(alpha: f64) -> SystemParams<f64> {
        SystemParams::new(alpha, NonlinearitySpec::monotone_cubic(), Grid::interval(1.0, 51).unwrap()).unwrap()
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let p = params(0.3);
        assert_eq!(lyapunov(&FieldState::zeros(&p.grid), &p).unwrap(), 0.0);
    }

    #[test]
    fn constant_fields_by_hand() {
        let p = params(0.1);
        let s = FieldState::new(0.0, vec![1.0; 51], vec![0.0; 51], vec![1.0; 51]);
        assert!((lyapunov(&s, &p).unwrap() - 1.4).abs() < 1e-12);
        let s = FieldState::new(0.0, vec![0.0; 51], vec![0.0; 51], vec![1.0; 51]);
        assert!((lyapunov(&s, &p).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn seminorms_are_antimonotone_in_h() {
        let p = params(0.1);
        let g = &p.grid;
        let s = FieldState::new(0.0, g.sample(|x| (9.0 * x[0]).sin()), vec![0.0; 51], vec![0.0; 51]);
        let d = diagnose(&s, &[0.0; 51], &[0.0; 51], &p, &[0.02, 0.05, 0.1]).unwrap();
        assert!(d.seminorms[0].v >= d.seminorms[1].v && d.seminorms[1].v >= d.seminorms[2].v);
    }
}
