use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::polynomial::Polynomial;
use crate::scalar::{from_usize, lit, to_f64, Real};

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Declared structural constants of a nonlinearity pair:
/// `φ ≥ β₀`, `f·v ≥ −C + γ₀|v|^{2+δ}`, `f′ ≥ −K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionConstants<T> {
    pub damping_floor: T,
    pub slope_floor: T,
    pub growth_coefficient: T,
    pub growth_excess: T,
    pub dissipation_offset: T,
}

/// Reaction term `f` and damping `φ` of the velocity equation, with their
/// derivatives and the antiderivatives used by the Lyapunov functional.
#[derive(Clone)]
pub struct NonlinearitySpec<T> {
    pub label: String,
    pub f: ScalarFn<T>,
    pub df: ScalarFn<T>,
    /// `F(v) = ∫₀ᵛ f`.
    pub potential: ScalarFn<T>,
    pub phi: ScalarFn<T>,
    pub dphi: ScalarFn<T>,
    /// `R(y) = ∫₀ʸ φ(s) s ds`.
    pub damping_moment: ScalarFn<T>,
    pub constants: AssumptionConstants<T>,
}

impl<T> fmt::Debug for NonlinearitySpec<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearitySpec")
            .field("label", &self.label)
            .field("constants", &self.constants)
            .finish_non_exhaustive()
    }
}

impl<T: Real> NonlinearitySpec<T> {
    /// Builds the pair from polynomial `f` and `φ`; every derived map is exact.
    pub fn polynomial(
        label: impl Into<String>,
        f: Polynomial<T>,
        phi: Polynomial<T>,
        constants: AssumptionConstants<T>,
    ) -> Self {
        let df = f.derivative();
        let potential = f.antiderivative();
        let dphi = phi.derivative();
        let moment = phi.shift_up().antiderivative();
        let wrap = |p: Polynomial<T>| -> ScalarFn<T> { Arc::new(move |x| p.eval(x)) };
        Self {
            label: label.into(),
            f: wrap(f),
            df: wrap(df),
            potential: wrap(potential),
            phi: wrap(phi),
            dphi: wrap(dphi),
            damping_moment: wrap(moment),
            constants,
        }
    }

    /// `f(v) = v + v³`, `φ ≡ 1`: strictly monotone with `κ₀ = 1`.
    pub fn monotone_cubic() -> Self {
        Self::polynomial(
            "monotone-cubic",
            Polynomial::new(vec![T::zero(), T::one(), T::zero(), T::one()]),
            Polynomial::constant(T::one()),
            AssumptionConstants {
                damping_floor: T::one(),
                slope_floor: T::zero(),
                growth_coefficient: T::one(),
                growth_excess: lit(2.0),
                dissipation_offset: T::zero(),
            },
        )
    }

    /// `f(v) = v³ − v`, `φ ≡ 1`: double well with stable roots `±1`.
    pub fn bistable_cubic() -> Self {
        Self::polynomial(
            "bistable-cubic",
            Polynomial::new(vec![T::zero(), -T::one(), T::zero(), T::one()]),
            Polynomial::constant(T::one()),
            AssumptionConstants {
                damping_floor: T::one(),
                slope_floor: T::one(),
                growth_coefficient: lit(0.5),
                growth_excess: lit(2.0),
                dissipation_offset: lit(0.5),
            },
        )
    }
}

/// Outcome of one sampled assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck<T> {
    pub name: &'static str,
    pub passed: bool,
    /// Sample point with the smallest margin.
    pub worst_point: T,
    /// Smallest observed margin (negative when violated).
    pub worst_margin: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub damping: AssumptionCheck<T>,
    pub dissipativity: AssumptionCheck<T>,
    pub slope: AssumptionCheck<T>,
    /// Consistency of the supplied antiderivatives with `f` and `φ`.
    pub antiderivatives: AssumptionCheck<T>,
    pub min_slope: T,
    /// `Some(κ₀)` when `f′ ≥ κ₀ > 0` on the whole range.
    pub monotone: Option<T>,
}

impl<T: Real> ValidationReport<T> {
    pub fn all_passed(&self) -> bool {
        self.damping.passed && self.dissipativity.passed && self.slope.passed && self.antiderivatives.passed
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone.is_some()
    }
}

const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

pub(crate) fn gauss5<T: Real>(g: impl Fn(T) -> T, a: T, b: T) -> T {
    let mid = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    GAUSS5_NODES
        .iter()
        .zip(GAUSS5_WEIGHTS)
        .map(|(&x, w)| lit::<T>(w) * g(mid + half * lit(x)))
        .sum::<T>()
        * half
}

struct Worst<T> {
    point: T,
    margin: T,
}

impl<T: Real> Worst<T> {
    fn new() -> Self {
        Self { point: T::nan(), margin: T::infinity() }
    }

    fn update(&mut self, point: T, margin: T) {
        if margin < self.margin {
            self.margin = margin;
            self.point = point;
        }
    }

    fn finish(self, name: &'static str, slack: T) -> AssumptionCheck<T> {
        AssumptionCheck { name, passed: self.margin >= -slack, worst_point: self.point, worst_margin: self.margin }
    }
}

fn finite<T: Real>(value: T, what: &'static str, at: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation { what, at: to_f64(at) })
    }
}

/// Checks the structural assumptions on `[lo, hi]` by dense sampling.
pub fn validate_assumptions<T: Real>(
    spec: &NonlinearitySpec<T>,
    range: (T, T),
    samples: usize,
) -> Result<ValidationReport<T>> {
    let (lo, hi) = range;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("degenerate sampling range [{lo}, {hi}]")));
    }
    if samples < 100 {
        return Err(Error::Domain(format!("need at least 100 samples, got {samples}")));
    }

    let c = &spec.constants;
    let eps = T::epsilon() * lit(64.0);
    let mut damping = Worst::new();
    let mut dissipativity = Worst::new();
    let mut slope = Worst::new();
    let mut anti = Worst::new();
    let mut scale = T::one();

    let point = |k: usize| lo + (hi - lo) * from_usize::<T>(k) / from_usize::<T>(samples - 1);
    let mut prev: Option<T> = None;
    for k in 0..samples {
        let v = point(k);
        let fv = finite((spec.f)(v), "f", v)?;
        let dfv = finite((spec.df)(v), "f'", v)?;
        let phiv = finite((spec.phi)(v), "phi", v)?;

        damping.update(v, phiv - c.damping_floor);
        let growth = c.growth_coefficient * v.abs().powf(lit::<T>(2.0) + c.growth_excess);
        let margin = fv * v + c.dissipation_offset - growth;
        scale = scale.max((fv * v).abs()).max(growth);
        dissipativity.update(v, margin);
        slope.update(v, dfv + c.slope_floor);

        if let Some(a) = prev {
            let df_int = gauss5(|s| (spec.f)(s), a, v);
            let dr_int = gauss5(|s| (spec.phi)(s) * s, a, v);
            let e1 = ((spec.potential)(v) - (spec.potential)(a) - df_int).abs();
            let e2 = ((spec.damping_moment)(v) - (spec.damping_moment)(a) - dr_int).abs();
            let rel = lit::<T>(1e-9) * (T::one() + df_int.abs() + dr_int.abs() + (spec.potential)(v).abs());
            anti.update(v, rel - e1.max(e2));
        }
        prev = Some(v);
    }

    let min_slope = slope.margin - c.slope_floor;
    let monotone = if min_slope > T::zero() { Some(min_slope) } else { None };
    Ok(ValidationReport {
        damping: damping.finish("damping floor", eps),
        dissipativity: dissipativity.finish("dissipativity", eps * scale),
        slope: slope.finish("slope floor", eps),
        antiderivatives: anti.finish("antiderivative consistency", T::zero()),
        min_slope,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_cubic_passes_with_unit_kappa() {
        let spec = NonlinearitySpec::<f64>::monotone_cubic();
        let r = validate_assumptions(&spec, (-10.0, 10.0), 1001).unwrap();
        assert!(r.all_passed());
        assert!((r.monotone.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bistable_cubic_passes_but_is_not_monotone() {
        let spec = NonlinearitySpec::<f64>::bistable_cubic();
        let r = validate_assumptions(&spec, (-10.0, 10.0), 1001).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert!(r.monotone.is_none());
        assert!((r.min_slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_linear_violates_dissipativity() {
        let spec = NonlinearitySpec::polynomial(
            "neg",
            Polynomial::new(vec![0.0, -1.0]),
            Polynomial::constant(1.0),
            AssumptionConstants {
                damping_floor: 1.0,
                slope_floor: 1.0,
                growth_coefficient: 1.0,
                growth_excess: 2.0,
                dissipation_offset: 0.0,
            },
        );
        let r = validate_assumptions(&spec, (-1.0, 1.0), 200).unwrap();
        assert!(!r.dissipativity.passed);
        assert!(r.dissipativity.worst_margin < 0.0);
        assert!(r.slope.passed && r.damping.passed);
    }

    #[test]
    fn non_finite_evaluation_names_point() {
        let mut spec = NonlinearitySpec::<f64>::monotone_cubic();
        spec.f = Arc::new(|v| if v > 0.5 { f64::NAN } else { v });
        match validate_assumptions(&spec, (0.0, 1.0), 101) {
            Err(Error::Evaluation { what, at }) => {
                assert_eq!(what, "f");
                assert!(at > 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_potential_detected() {
        let mut spec = NonlinearitySpec::<f64>::monotone_cubic();
        spec.potential = Arc::new(|v| v * v);
        let r = validate_assumptions(&spec, (-2.0, 2.0), 100).unwrap();
        assert!(!r.antiderivatives.passed);
    }

    #[test]
    fn precondition_errors() {
        let spec = NonlinearitySpec::<f64>::monotone_cubic();
        assert!(validate_assumptions(&spec, (1.0, 1.0), 1000).is_err());
        assert!(validate_assumptions(&spec, (0.0, 1.0), 99).is_err());
    }
}
