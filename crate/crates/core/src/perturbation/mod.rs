//! Forced ODEs near hyperbolic equilibria and per-node dissipation
//! integrals of the coupled system.

pub mod nodes;
pub mod ode;
pub mod report;

pub use nodes::{node_stabilization_report, NodeIntegrals, NodeStabilizationReport};
pub use ode::{rk4_step, run_perturbed_ode, ForcedOdeProblem, OdeTrajectory};
pub use report::{
    perturbation_report, reports_over_horizons, segment_trajectory, tv_check, PerturbationReport, Segment, TvCheck,
    TvCheckConfig,
};
