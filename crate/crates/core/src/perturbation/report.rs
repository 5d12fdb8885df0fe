use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::scalar::{lit, to_f64, Real};

use super::ode::{run_perturbed_ode, ForcedOdeProblem, OdeTrajectory};

/// A maximal time interval spent inside one equilibrium neighbourhood
/// (`equilibrium = Some(i)`) or outside all of them (`None`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub equilibrium: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub horizon: f64,
    pub epsilon: f64,
    /// `∫₀ᵀ ‖u′‖ dt`.
    pub int_du: f64,
    /// `∫₀ᵀ ‖h′‖ dt`.
    pub int_dh: f64,
    pub segments: Vec<Segment>,
    /// Total length of the segments outside every neighbourhood.
    pub out_time: f64,
}

fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

/// Splits `[0, T]` at sample times by the neighbourhood `‖u − uᵢ‖ < δ`
/// containing `u`. Sample `k` owns `[t_k, t_{k+1})`.
pub fn segment_trajectory<T: Real>(traj: &OdeTrajectory<T>, equilibria: &[Vec<T>], delta: T, horizon: T) -> Vec<Segment> {
    let label = |u: &[T]| equilibria.iter().position(|e| distance(u, e) < delta);
    let mut segments: Vec<Segment> = Vec::new();
    let end_time = to_f64(horizon);
    for (k, (&t, u)) in traj.times.iter().zip(&traj.u).enumerate() {
        let t = to_f64(t);
        if t >= end_time {
            break;
        }
        let next = traj.times.get(k + 1).map(|&s| to_f64(s)).unwrap_or(end_time).min(end_time);
        let eq = label(u);
        match segments.last_mut() {
            Some(last) if last.equilibrium == eq => last.end = next,
            _ => segments.push(Segment { start: t, end: next, equilibrium: eq }),
        }
    }
    segments
}

/// Runs the problem and reports its integrals and segmentation.
pub fn perturbation_report<T: Real>(p: &ForcedOdeProblem<T>, dt: T, delta: T) -> Result<PerturbationReport> {
    let traj = run_perturbed_ode(p, dt)?;
    Ok(report_from(&traj, p, delta, p.horizon))
}

pub(crate) fn report_from<T: Real>(traj: &OdeTrajectory<T>, p: &ForcedOdeProblem<T>, delta: T, horizon: T) -> PerturbationReport {
    let segments = segment_trajectory(traj, &p.equilibria, delta, horizon);
    let out_time = segments.iter().filter(|s| s.equilibrium.is_none()).map(|s| s.end - s.start).sum();
    PerturbationReport {
        horizon: to_f64(horizon),
        epsilon: to_f64(p.epsilon),
        int_du: to_f64(traj.int_du(horizon)),
        int_dh: to_f64(traj.int_dh(horizon)),
        segments,
        out_time,
    }
}

/// Reports for several horizons from one run to the largest horizon.
pub fn reports_over_horizons<T: Real>(p: &ForcedOdeProblem<T>, horizons: &[T], dt: T, delta: T) -> Result<Vec<PerturbationReport>> {
    let longest = horizons.iter().copied().fold(T::zero(), T::max);
    let traj = run_perturbed_ode(&p.with_horizon(longest), dt)?;
    Ok(horizons.iter().map(|&h| report_from(&traj, p, delta, h)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvCheckConfig {
    /// Points may exceed the fitted line by this fraction.
    pub slack: f64,
    pub c2_max: f64,
    /// Forcing sizes above this are outside the tracking regime.
    pub epsilon_max: f64,
    /// Relative spread allowed in the out-of-neighbourhood time.
    pub out_time_tolerance: f64,
}

impl Default for TvCheckConfig {
    fn default() -> Self {
        Self { slack: 0.1, c2_max: 100.0, epsilon_max: 0.2, out_time_tolerance: 0.05 }
    }
}

/// Affine fit `∫‖u′‖ ≈ C₁ + C₂ ∫‖h′‖` across horizons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvCheck {
    pub horizons: Vec<f64>,
    pub int_du: Vec<f64>,
    pub int_dh: Vec<f64>,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub out_time: Vec<f64>,
    pub pass: bool,
    /// The affine envelope holds with the slope bound.
    pub envelope_ok: bool,
    /// Out-of-neighbourhood time is the same for all horizons.
    pub out_time_uniform: bool,
    /// `ε` exceeded the configured regime; the check is reported, not enforced.
    pub regime_exit: bool,
}

pub fn tv_check(reports: &[PerturbationReport], cfg: &TvCheckConfig) -> Result<TvCheck> {
    if reports.len() < 3 {
        return Err(Error::Config(format!("tv_check needs at least 3 horizons, got {}", reports.len())));
    }
    let horizons: Vec<f64> = reports.iter().map(|r| r.horizon).collect();
    let du: Vec<f64> = reports.iter().map(|r| r.int_du).collect();
    let dh: Vec<f64> = reports.iter().map(|r| r.int_dh).collect();
    let out: Vec<f64> = reports.iter().map(|r| r.out_time).collect();
    // With no forcing all abscissae coincide; the best affine bound is flat.
    let (c1, c2) = fit_line(&dh, &du).unwrap_or_else(|| (du.iter().cloned().fold(0.0, f64::max), 0.0));
    let envelope_ok = du
        .iter()
        .zip(&dh)
        .all(|(&y, &x)| {
            let fit = c1 + c2 * x;
            y <= fit + cfg.slack * fit.abs() + 1e-12
        })
        && c2 <= cfg.c2_max;
    let out_max = out.iter().cloned().fold(0.0, f64::max);
    let out_min = out.iter().cloned().fold(f64::INFINITY, f64::min);
    let out_time_uniform = out_max == 0.0 || (out_max - out_min) <= cfg.out_time_tolerance * out_max;
    let regime_exit = reports.iter().any(|r| r.epsilon > cfg.epsilon_max);
    Ok(TvCheck {
        horizons,
        int_du: du,
        int_dh: dh,
        c1,
        c2,
        out_time: out,
        pass: envelope_ok && out_time_uniform && !regime_exit,
        envelope_ok,
        out_time_uniform,
        regime_exit,
    })
}

/// Reports the default neighbourhood radius.
pub fn default_delta<T: Real>() -> T {
    lit(0.1)
}
