use serde::Serialize;

use crate::dynamics::trajectory::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::scalar::{to_f64, Real};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeIntegrals {
    pub node: usize,
    pub horizon: f64,
    /// `∫₀ᵀ |∂ₜ²v|`.
    pub int_vtt: f64,
    /// `∫₀ᵀ |∂ₜv|`.
    pub int_vt: f64,
    /// `α ∫₀ᵀ |∂ₜw|`.
    pub alpha_int_wt: f64,
}

impl NodeIntegrals {
    pub fn lhs(&self) -> f64 {
        self.int_vtt + self.int_vt
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeStabilizationReport {
    pub horizons: Vec<f64>,
    /// One row per (horizon, node).
    pub rows: Vec<NodeIntegrals>,
    /// Envelope `lhs ≤ C₁ + C₂ α∫|∂ₜw|` holding at every node and horizon.
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    /// Largest relative growth of a node's left-hand side from the first
    /// to the last horizon.
    pub max_relative_growth: f64,
    /// `∫₀ᵀ (‖∂ₜ²v‖_{L¹} + ‖∂ₜv‖_{L¹} + ‖∂ₜw‖_{L¹})` at each horizon.
    pub l1_integrals: Vec<f64>,
    pub pass: bool,
}

/// Per-node dissipation integrals at each horizon (nearest sample) and
/// the affine envelope fitted across nodes. Passes when every node's
/// integrals grow by at most `growth_tolerance` (relative) between the
/// first and last horizon.
pub fn node_stabilization_report<T: Real>(
    traj: &TrajectoryRecord<T>,
    nodes: &[usize],
    horizons: &[T],
    growth_tolerance: f64,
) -> Result<NodeStabilizationReport> {
    if horizons.is_empty() {
        return Err(Error::Config("node stabilization report needs at least one horizon".into()));
    }
    let recorded: Vec<usize> = traj.samples[0].nodes.iter().map(|n| n.node).collect();
    let slots = nodes
        .iter()
        .map(|k| recorded.iter().position(|r| r == k).ok_or_else(|| Error::Config(format!("node {k} was not recorded"))))
        .collect::<Result<Vec<_>>>()?;
    let alpha = to_f64(traj.alpha);
    let mut rows = Vec::new();
    let mut l1 = Vec::new();
    for &h in horizons {
        let s = &traj.samples[traj.sample_index_at(h)];
        l1.push(to_f64(s.diss_l1));
        for (&k, &slot) in nodes.iter().zip(&slots) {
            let ns = &s.nodes[slot];
            rows.push(NodeIntegrals {
                node: k,
                horizon: to_f64(s.t()),
                int_vtt: to_f64(ns.int_abs_vtt),
                int_vt: to_f64(ns.int_abs_vt),
                alpha_int_wt: alpha * to_f64(ns.int_abs_wt),
            });
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.alpha_int_wt).collect();
    let ys: Vec<f64> = rows.iter().map(NodeIntegrals::lhs).collect();
    let c2 = fit_line(&xs, &ys).map(|(_, s)| s.max(0.0)).unwrap_or(0.0);
    let c1 = xs.iter().zip(&ys).map(|(x, y)| y - c2 * x).fold(0.0, f64::max);

    let m = nodes.len();
    let first = &rows[..m];
    let last = &rows[rows.len() - m..];
    let max_relative_growth = first
        .iter()
        .zip(last)
        .map(|(a, b)| {
            let scale = b.lhs().max(b.alpha_int_wt).max(1e-300);
            ((b.lhs() - a.lhs()).max(b.alpha_int_wt - a.alpha_int_wt)) / scale
        })
        .fold(0.0, f64::max);
    Ok(NodeStabilizationReport {
        horizons: horizons.iter().map(|&h| to_f64(h)).collect(),
        rows,
        c1,
        c2,
        max_relative_growth,
        l1_integrals: l1,
        pass: max_relative_growth <= growth_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, Probes, StepperConfig};
    use crate::model::{FieldState, Grid, NonlinearitySpec, SystemParams};
    use crate::perturbation::ode::{run_perturbed_ode, ForcedOdeProblem};

    #[test]
    fn decoupled_node_matches_scalar_path_length() {
        let g = Grid::<f64>::interval(1.0, 9).unwrap();
        let p = SystemParams::new(0.0, NonlinearitySpec::bistable_cubic(), g.clone()).unwrap();
        let v0 = g.sample(|x| 0.2 + x[0]);
        let s0 = FieldState::new(0.0, v0.clone(), vec![0.0; 9], vec![0.0; 9]);
        let probes = Probes { nodes: vec![3], ..Probes::default() };
        let rec = simulate(&s0, &p, &StepperConfig::new(1e-3).with_stride(100), 30.0, &probes).unwrap();
        let rep = node_stabilization_report(&rec, &[3], &[30.0], 0.05).unwrap();
        let ode = ForcedOdeProblem::damped_double_well(1.0, [v0[3], 0.0], 30.0);
        let tr = run_perturbed_ode(&ode, 1e-3).unwrap();
        let path: f64 = tr.u.windows(2).map(|w| (w[1][0] - w[0][0]).abs()).sum();
        assert!((rep.rows[0].int_vt - path).abs() < 2e-2 * path, "{} vs {path}", rep.rows[0].int_vt);
        assert_eq!(rep.rows[0].alpha_int_wt, 0.0);
    }

    #[test]
    fn unrecorded_node_is_config_error() {
        let g = Grid::<f64>::interval(1.0, 9).unwrap();
        let p = SystemParams::new(0.1, NonlinearitySpec::bistable_cubic(), g.clone()).unwrap();
        let rec = simulate(&FieldState::zeros(&g), &p, &StepperConfig::new(0.1), 1.0, &Probes::default()).unwrap();
        assert!(matches!(node_stabilization_report(&rec, &[2], &[1.0], 0.05), Err(Error::Config(_))));
    }

    #[test]
    fn equilibrium_data_has_no_variation() {
        let g = Grid::<f64>::interval(1.0, 9).unwrap();
        let p = SystemParams::new(0.0, NonlinearitySpec::bistable_cubic(), g.clone()).unwrap();
        let s0 = FieldState::new(0.0, vec![1.0; 9], vec![0.0; 9], vec![0.0; 9]);
        let probes = Probes { nodes: vec![0, 4], ..Probes::default() };
        let rec = simulate(&s0, &p, &StepperConfig::new(0.01), 5.0, &probes).unwrap();
        let rep = node_stabilization_report(&rec, &[0, 4], &[2.5, 5.0], 0.05).unwrap();
        assert!(rep.rows.iter().all(|r| r.lhs() == 0.0));
        assert!(rep.pass);
    }
}
