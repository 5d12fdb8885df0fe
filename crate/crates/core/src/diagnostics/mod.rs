pub mod functional;
pub mod norms;
pub mod seminorm;

pub use functional::{diagnose, energy_dissipation_rate, lyapunov, DiagnosticSample, SeminormSample};
pub use norms::{h1_norm, lp_norm, norm, phase_norm, Norm};
pub use seminorm::{lip_seminorm, mollify};
pub mod identity;

pub use identity::{energy_identity_residual, kato_check, worst_lyapunov_growth, KatoReport};
