//! End-to-end experiments composed from the simulation and equilibrium
//! layers, plus their CSV writers.

pub mod basin;
pub mod contrast;
pub mod data;
pub mod output;
pub mod stabilize;

pub use basin::{basin_label, basin_partition, BasinOptions};
pub use contrast::{lipschitz_contrast, ContrastOutcome, ContrastRun, ContrastSetup};
pub use data::{random_smooth_field, random_smooth_state, tanh_profile};
pub use output::{write_diagnostics_csv, write_node_csv, write_seminorm_csv, write_state_csv};
pub use stabilize::{stabilize, StabilizeOutcome, StabilizeSetup};
