//! Forest-ecosystem model (young trees `u`, old trees `v`, seeds `w`):
//!
//! ```text
//! ∂ₜu = βδ·w − γ(v)·u − f·u
//! ∂ₜv = f·u − h·v
//! ∂ₜw − dΔw + βw = αv
//! ```
//!
//! Eliminating `u = (∂ₜv + hv)/f` turns the first two equations into a
//! damped second-order equation for `v` of the canonical form.

use crate::error::{Error, Result};
use crate::model::nonlinearity::{AssumptionConstants, NonlinearitySpec};
use crate::model::params::HeatCoefficients;
use crate::model::polynomial::Polynomial;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams<T> {
    /// Seed production rate of old trees (α).
    pub seed_production: T,
    /// Seed loss rate (β); also scales germination.
    pub seed_loss: T,
    /// Germination efficiency (δ).
    pub germination: T,
    /// Seed diffusivity (d).
    pub diffusivity: T,
    /// Maturation rate of young trees (f).
    pub maturation: T,
    /// Mortality of old trees (h).
    pub old_mortality: T,
    /// Mortality of young trees as a function of old-tree density (γ).
    pub young_mortality: Polynomial<T>,
}

impl<T: Real> ForestParams<T> {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("seed_production", self.seed_production),
            ("seed_loss", self.seed_loss),
            ("germination", self.germination),
            ("diffusivity", self.diffusivity),
            ("maturation", self.maturation),
            ("old_mortality", self.old_mortality),
        ];
        for (name, value) in named {
            if !(value > T::zero()) || !value.is_finite() {
                return Err(Error::Domain(format!("forest parameter {name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    pub fn gamma(&self, v: T) -> T {
        self.young_mortality.eval(v)
    }

    pub fn gamma_prime(&self, v: T) -> T {
        self.young_mortality.derivative().eval(v)
    }

    /// Right-hand side `∂ₜu` of the young-tree equation.
    pub fn young_rate(&self, u: T, v: T, w: T) -> T {
        self.seed_production_to_young() * w - (self.gamma(v) + self.maturation) * u
    }

    /// Right-hand side `∂ₜv` of the old-tree equation.
    pub fn old_rate(&self, u: T, v: T) -> T {
        self.maturation * u - self.old_mortality * v
    }

    fn seed_production_to_young(&self) -> T {
        self.seed_loss * self.germination
    }

    /// `∂ₜ²v` obtained by differentiating the old-tree equation and
    /// substituting the young-tree equation, with `u` eliminated.
    pub fn eliminated_acceleration(&self, v: T, vt: T, w: T) -> T {
        let u = (vt + self.old_mortality * v) / self.maturation;
        self.maturation * self.young_rate(u, v, w) - self.old_mortality * vt
    }
}

/// Canonical-form data produced by eliminating the young-tree density.
#[derive(Debug, Clone)]
pub struct ForestReduction<T> {
    pub nonlinearity: NonlinearitySpec<T>,
    /// Coupling `α̃ = βδf` in front of `w` in the velocity equation.
    pub coupling: T,
    /// `(d, β, α)` of the seed equation.
    pub heat: HeatCoefficients<T>,
    pub maturation: T,
    pub old_mortality: T,
}

impl<T: Real> ForestReduction<T> {
    /// Recovers the young-tree density from `(v, ∂ₜv)`.
    pub fn young_density(&self, v: T, vt: T) -> T {
        (vt + self.old_mortality * v) / self.maturation
    }

    /// Velocity `∂ₜv` implied by the forest state `(u, v)`.
    pub fn velocity(&self, u: T, v: T) -> T {
        self.maturation * u - self.old_mortality * v
    }

    /// Canonical right-hand side `α̃w − f̃(v) − φ̃(v)∂ₜv`.
    pub fn canonical_acceleration(&self, v: T, vt: T, w: T) -> T {
        self.coupling * w - (self.nonlinearity.f)(v) - (self.nonlinearity.phi)(v) * vt
    }
}

/// Eliminates `u`: `φ̃ = h + γ + f`, `f̃ = h(γ + f)v`, `α̃ = βδf`.
pub fn forest_reduce<T: Real>(p: &ForestParams<T>) -> Result<ForestReduction<T>> {
    p.validate()?;
    let h = p.old_mortality;
    let f = p.maturation;
    let loss = p.young_mortality.add(&Polynomial::constant(f));
    let phi = loss.add(&Polynomial::constant(h));
    let reaction = loss.shift_up().scale(h);

    // γ is a mortality and expected non-negative near the origin; the
    // declared floors are evaluated there and are metadata only.
    let gamma0 = p.gamma(T::zero()).max(T::zero());
    let constants = AssumptionConstants {
        damping_floor: h + f + gamma0,
        slope_floor: T::zero(),
        growth_coefficient: h * (f + gamma0),
        growth_excess: lit::<T>(p.young_mortality.degree() as f64),
        dissipation_offset: T::zero(),
    };
    Ok(ForestReduction {
        nonlinearity: NonlinearitySpec::polynomial("forest-reduced", reaction, phi, constants),
        coupling: p.seed_loss * p.germination * f,
        heat: HeatCoefficients { diffusivity: p.diffusivity, decay: p.seed_loss, source_gain: p.seed_production },
        maturation: f,
        old_mortality: h,
    })
}
