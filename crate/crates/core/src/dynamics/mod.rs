//! Discrete operators, the IMEX stepper and trajectory recording.

pub mod forest;
pub mod mms;
pub mod operators;
pub mod stepper;
pub mod trajectory;

pub use operators::{gradient_norm_sq, helmholtz_solve, laplacian_apply, HelmholtzSolver};
pub use stepper::{step, Stepper, StepperConfig, BLOW_UP_THRESHOLD};
pub use trajectory::{instantaneous_rates, simulate, NodeSample, Probes, TrajectoryRecord, TrajectorySample};

pub use mms::{manufactured_convergence, ConvergenceReport, ForcingMode, ManufacturedSolution, MmsProblem, OrderEstimate};
