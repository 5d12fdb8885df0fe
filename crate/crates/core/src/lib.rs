//! Simulation and steady-state analysis for a damped second-order ODE
//! coupled pointwise to a Neumann heat equation:
//!
//! ```text
//! ∂ₜ²v + φ(v)∂ₜv + f(v) = αw,    ∂ₜw − dΔw + σw = κv.
//! ```
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! fix the usual double-precision instantiation.

pub mod diagnostics;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod scalar;

pub use error::{Error, Result};

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Real;

pub type Grid64 = model::Grid<f64>;
pub type NonlinearitySpec64 = model::NonlinearitySpec<f64>;
pub type SystemParams64 = model::SystemParams<f64>;
pub type FieldState64 = model::FieldState<f64>;
pub type ForestParams64 = model::ForestParams<f64>;
pub type StepperConfig64 = dynamics::StepperConfig<f64>;
pub type TrajectoryRecord64 = dynamics::TrajectoryRecord<f64>;

pub type Grid32 = model::Grid<f32>;
pub type SystemParams32 = model::SystemParams<f32>;
pub type FieldState32 = model::FieldState<f32>;
