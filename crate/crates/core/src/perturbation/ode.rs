use std::sync::Arc;

use crate::dynamics::stepper::BLOW_UP_THRESHOLD;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Vector field on ℝⁿ.
pub type VectorField<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
/// Time-dependent forcing on ℝⁿ.
pub type Forcing<T> = Arc<dyn Fn(T) -> Vec<T> + Send + Sync>;

/// Classical fourth-order Runge–Kutta step of `y′ = rhs(t, y)`.
pub fn rk4_step<T: Real>(rhs: &impl Fn(T, &[T]) -> Vec<T>, t: T, y: &[T], dt: T) -> Vec<T> {
    let half = dt * lit(0.5);
    let axpy = |a: T, x: &[T]| -> Vec<T> { y.iter().zip(x).map(|(&yi, &xi)| yi + a * xi).collect() };
    let k1 = rhs(t, y);
    let k2 = rhs(t + half, &axpy(half, &k1));
    let k3 = rhs(t + half, &axpy(half, &k2));
    let k4 = rhs(t + dt, &axpy(dt, &k3));
    let sixth = dt / lit(6.0);
    (0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + lit::<T>(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect()
}

/// `u′ = F(u) + h(t)` with its equilibria and declared forcing size.
#[derive(Clone)]
pub struct ForcedOdeProblem<T> {
    pub field: VectorField<T>,
    pub equilibria: Vec<Vec<T>>,
    pub forcing: Forcing<T>,
    pub forcing_derivative: Forcing<T>,
    /// Declared bound on `sup_t max(‖h(t)‖, ‖h′(t)‖)`.
    pub epsilon: T,
    pub initial: Vec<T>,
    pub horizon: T,
}

impl<T: Real> std::fmt::Debug for ForcedOdeProblem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForcedOdeProblem")
            .field("equilibria", &self.equilibria)
            .field("epsilon", &self.epsilon)
            .field("initial", &self.initial)
            .field("horizon", &self.horizon)
            .finish_non_exhaustive()
    }
}

fn euclid<T: Real>(x: &[T]) -> T {
    x.iter().map(|&a| a * a).sum::<T>().sqrt()
}

impl<T: Real> ForcedOdeProblem<T> {
    /// `u′ = u − u³ + ε sin(ωt)` on ℝ; `ε` is declared as `amplitude·max(1, ω)`.
    pub fn double_well(amplitude: T, omega: T, initial: T, horizon: T) -> Self {
        Self {
            field: Arc::new(|u: &[T]| vec![u[0] - u[0] * u[0] * u[0]]),
            equilibria: vec![vec![-T::one()], vec![T::zero()], vec![T::one()]],
            forcing: Arc::new(move |t: T| vec![amplitude * (omega * t).sin()]),
            forcing_derivative: Arc::new(move |t: T| vec![amplitude * omega * (omega * t).cos()]),
            epsilon: amplitude.abs() * omega.abs().max(T::one()),
            initial: vec![initial],
            horizon,
        }
    }

    /// `y″ + φ y′ + y³ − y = 0` written as a first-order system in `(y, y′)`.
    pub fn damped_double_well(damping: T, initial: [T; 2], horizon: T) -> Self {
        Self {
            field: Arc::new(move |u: &[T]| vec![u[1], -damping * u[1] - (u[0] * u[0] * u[0] - u[0])]),
            equilibria: vec![vec![-T::one(), T::zero()], vec![T::zero(), T::zero()], vec![T::one(), T::zero()]],
            forcing: Arc::new(|_| vec![T::zero(); 2]),
            forcing_derivative: Arc::new(|_| vec![T::zero(); 2]),
            epsilon: T::zero(),
            initial: initial.to_vec(),
            horizon,
        }
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    /// Same problem with the forcing scaled by `factor`.
    pub fn scaled_forcing(&self, factor: T) -> Self {
        let h = self.forcing.clone();
        let dh = self.forcing_derivative.clone();
        Self {
            forcing: Arc::new(move |t| h(t).into_iter().map(|x| x * factor).collect()),
            forcing_derivative: Arc::new(move |t| dh(t).into_iter().map(|x| x * factor).collect()),
            epsilon: self.epsilon * factor.abs(),
            ..self.clone()
        }
    }

    pub fn with_horizon(&self, horizon: T) -> Self {
        Self { horizon, ..self.clone() }
    }

    /// Checks dimensions and that the declared `ε` is within 5% of the
    /// sampled `sup_t max(‖h‖, ‖h′‖)`.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if n == 0 || n > 3 {
            return Err(Error::Config(format!("forced ODE dimension must be 1..=3, got {n}")));
        }
        if self.equilibria.iter().any(|e| e.len() != n) {
            return Err(Error::Shape { expected: n, found: self.equilibria.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0) });
        }
        if !(self.horizon > T::zero()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        let samples = 20_000usize;
        let span = self.horizon.min(lit(1000.0));
        let mut sup = T::zero();
        for i in 0..=samples {
            let t = span * from_usize::<T>(i) / from_usize::<T>(samples);
            sup = sup.max(euclid(&(self.forcing)(t))).max(euclid(&(self.forcing_derivative)(t)));
        }
        let tol = lit::<T>(0.05) * self.epsilon.max(sup);
        if (sup - self.epsilon).abs() > tol {
            return Err(Error::Config(format!(
                "declared epsilon {} does not match the sampled forcing size {sup}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Samples of `u` and `u′ = F(u) + h(t)` at every step.
#[derive(Debug, Clone)]
pub struct OdeTrajectory<T> {
    pub times: Vec<T>,
    pub u: Vec<Vec<T>>,
    pub du: Vec<Vec<T>>,
    /// `h′(t)` at the same times.
    pub dh: Vec<Vec<T>>,
}

impl<T: Real> OdeTrajectory<T> {
    fn trapezoid(&self, series: &[Vec<T>], horizon: T) -> T {
        let mut acc = T::zero();
        for i in 1..self.times.len() {
            if self.times[i] > horizon + lit::<T>(1e-9) * (T::one() + horizon) {
                break;
            }
            let dt = self.times[i] - self.times[i - 1];
            acc += dt * lit(0.5) * (euclid(&series[i - 1]) + euclid(&series[i]));
        }
        acc
    }

    /// `∫₀ᵀ ‖u′‖ dt` by the trapezoidal rule on the step grid.
    pub fn int_du(&self, horizon: T) -> T {
        self.trapezoid(&self.du, horizon)
    }

    /// `∫₀ᵀ ‖h′‖ dt`.
    pub fn int_dh(&self, horizon: T) -> T {
        self.trapezoid(&self.dh, horizon)
    }
}

/// Integrates the problem with RK4 at step `dt` up to its horizon.
pub fn run_perturbed_ode<T: Real>(p: &ForcedOdeProblem<T>, dt: T) -> Result<OdeTrajectory<T>> {
    p.validate()?;
    if !(dt > T::zero()) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let rhs = |t: T, u: &[T]| -> Vec<T> {
        let f = (p.field)(u);
        let h = (p.forcing)(t);
        f.iter().zip(&h).map(|(&a, &b)| a + b).collect()
    };
    let steps = (p.horizon / dt).round().to_usize().unwrap_or(0).max(1);
    let mut traj = OdeTrajectory {
        times: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        du: Vec::with_capacity(steps + 1),
        dh: Vec::with_capacity(steps + 1),
    };
    let mut u = p.initial.clone();
    let limit = lit::<T>(BLOW_UP_THRESHOLD);
    for n in 0..=steps {
        let t = from_usize::<T>(n) * dt;
        if n > 0 {
            u = rk4_step(&rhs, t - dt, &u, dt);
            if let Some((i, &x)) = u.iter().enumerate().find(|(_, x)| !(x.abs() <= limit)) {
                return Err(Error::BlowUp { t: to_f64(t), node: i, value: to_f64(x) });
            }
        }
        traj.du.push(rhs(t, &u));
        traj.dh.push((p.forcing_derivative)(t));
        traj.times.push(t);
        traj.u.push(u.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order() {
        let rhs = |_t: f64, y: &[f64]| vec![-y[0]];
        let err = |dt: f64| {
            let mut y = vec![1.0];
            let n = (1.0 / dt).round() as usize;
            for k in 0..n {
                y = rk4_step(&rhs, k as f64 * dt, &y, dt);
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn equilibrium_start_is_constant() {
        let p = ForcedOdeProblem::double_well(0.0, 1.0, 1.0, 10.0);
        let tr = run_perturbed_ode(&p, 0.01).unwrap();
        assert!(tr.u.iter().all(|u| u[0] == 1.0));
        assert_eq!(tr.int_du(10.0), 0.0);
    }

    #[test]
    fn path_length_equals_displacement() {
        let p = ForcedOdeProblem::<f64>::double_well(0.0, 1.0, 0.1, 40.0);
        let tr = run_perturbed_ode(&p, 0.01).unwrap();
        assert!((tr.int_du(40.0) - 0.9).abs() < 1e-3);
    }

    #[test]
    fn second_order_limit_settles() {
        let p = ForcedOdeProblem::<f64>::damped_double_well(1.0, [0.3, 0.0], 60.0);
        let tr = run_perturbed_ode(&p, 0.01).unwrap();
        let last = tr.u.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-6 && last[1].abs() < 1e-6);
    }

    #[test]
    fn declared_epsilon_checked() {
        let mut p = ForcedOdeProblem::double_well(0.05, 2.0, 0.1, 10.0);
        assert!(p.validate().is_ok());
        p.epsilon = 0.05;
        assert!(matches!(p.validate(), Err(Error::Config(_))));
    }
}
