use crate::dynamics::trajectory::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `|L(t₂) − L(t₁) + ∫_{t₁}^{t₂} (2(φ(v)∂ₜv, ∂ₜv) + (2α/κ)‖∂ₜw‖²) dt|` between
/// the samples nearest to `t1` and `t2`. The integral is the trapezoidal sum
/// accumulated at every step of the run.
pub fn energy_identity_residual<T: Real>(traj: &TrajectoryRecord<T>, t1: T, t2: T) -> Result<T> {
    if !(t2 > t1) {
        return Err(Error::Config(format!("energy segment [{t1}, {t2}] is empty")));
    }
    let a = traj.sample_index_at(t1);
    let b = traj.sample_index_at(t2);
    if b <= a {
        return Err(Error::Config("energy segment contains fewer than two samples".into()));
    }
    if traj.samples[a..=b].iter().any(|s| s.energy_rate.is_none()) {
        return Err(Error::Config("trajectory lacks the energy-rate series".into()));
    }
    let (sa, sb) = (&traj.samples[a], &traj.samples[b]);
    Ok((sb.diagnostics.lyapunov - sa.diagnostics.lyapunov + sb.energy_dissipated - sa.energy_dissipated).abs())
}

/// Largest normalized one-sample increase `(L(tₙ₊₁) − L(tₙ)) / ((tₙ₊₁ − tₙ)(1 + |L(tₙ)|))`.
/// Non-positive when the functional never grows.
pub fn worst_lyapunov_growth<T: Real>(traj: &TrajectoryRecord<T>) -> T {
    traj.samples
        .windows(2)
        .map(|w| {
            let (l0, l1) = (w[0].diagnostics.lyapunov, w[1].diagnostics.lyapunov);
            (l1 - l0) / ((w[1].t() - w[0].t()) * (T::one() + l0.abs()))
        })
        .fold(T::neg_infinity(), T::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatoReport<T> {
    /// `max_t (‖∂ₜw(t)‖_{L¹} − bound(t))`; non-positive when the inequality holds.
    pub worst_violation: T,
    /// Largest value of the right-hand side along the run.
    pub scale: T,
    pub worst_time: T,
}

impl<T: Real> KatoReport<T> {
    pub fn relative_violation(&self) -> T {
        if self.scale > T::zero() {
            self.worst_violation / self.scale
        } else {
            self.worst_violation
        }
    }
}

/// Checks `‖∂ₜw(t)‖_{L¹} ≤ e^{−σt}‖∂ₜw(0)‖_{L¹} + κ∫₀ᵗ e^{−σ(t−s)}‖∂ₜv(s)‖_{L¹} ds`
/// at every sample.
pub fn kato_check<T: Real>(traj: &TrajectoryRecord<T>) -> KatoReport<T> {
    let mut report = KatoReport { worst_violation: T::neg_infinity(), scale: T::zero(), worst_time: T::zero() };
    for s in &traj.samples {
        let gap = s.diagnostics.l1_wt - s.kato_bound;
        if gap > report.worst_violation {
            report.worst_violation = gap;
            report.worst_time = s.t();
        }
        report.scale = report.scale.max(s.kato_bound);
    }
    report
}
