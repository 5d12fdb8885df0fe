use crate::error::{Error, Result};
use crate::model::{validate_assumptions, NonlinearitySpec};
use crate::scalar::{lit, to_f64, Real};

/// Inverse of a strictly increasing `f`, checked on a working range.
#[derive(Debug, Clone)]
pub struct MonotoneInverse<T> {
    spec: NonlinearitySpec<T>,
    /// Lower bound of `f′` observed on the working range.
    pub min_slope: T,
}

impl<T: Real> MonotoneInverse<T> {
    /// Validates monotonicity on `range` with 1000 samples.
    pub fn new(spec: &NonlinearitySpec<T>, range: (T, T)) -> Result<Self> {
        let report = validate_assumptions(spec, range, 1000)?;
        match report.monotone {
            Some(k) => Ok(Self { spec: spec.clone(), min_slope: k }),
            None => Err(Error::Domain(format!(
                "{} is not monotone on [{}, {}] (min f' = {})",
                spec.label, range.0, range.1, report.min_slope
            ))),
        }
    }

    /// Uses the default validation range `[−20, 20]`.
    pub fn with_default_range(spec: &NonlinearitySpec<T>) -> Result<Self> {
        Self::new(spec, (lit(-20.0), lit(20.0)))
    }

    pub fn spec(&self) -> &NonlinearitySpec<T> {
        &self.spec
    }

    /// `v` with `f(v) = y`, to `|f(v) − y| ≤ 1e−13 (1 + |y|)`.
    pub fn invert(&self, y: T) -> Result<T> {
        let f = &self.spec.f;
        let df = &self.spec.df;
        let tol = lit::<T>(1e-13) * (T::one() + y.abs());
        let mut lo = -T::one();
        let mut hi = T::one();
        let mut expansions = 0;
        while f(lo) > y {
            lo = lo * lit(2.0);
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Domain(format!("no preimage of {y} found below")));
            }
        }
        while f(hi) < y {
            hi = hi * lit(2.0);
            expansions += 1;
            if expansions > 200 {
                return Err(Error::Domain(format!("no preimage of {y} found above")));
            }
        }
        let mut x = (lo + hi) * lit(0.5);
        for _ in 0..200 {
            let r = f(x) - y;
            if !r.is_finite() {
                return Err(Error::Evaluation { what: "f", at: to_f64(x) });
            }
            if r.abs() <= tol {
                return Ok(x);
            }
            if r > T::zero() {
                hi = x;
            } else {
                lo = x;
            }
            let d = df(x);
            let newton = x - r / d;
            x = if d > T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) * lit(0.5) };
            if hi - lo <= T::epsilon() * (T::one() + x.abs()) {
                return Ok(x);
            }
        }
        Err(Error::Convergence { what: "monotone inversion", iterations: 200, residual: to_f64(f(x) - y), history: vec![] })
    }

    /// `(f⁻¹)′(y) = 1 / f′(f⁻¹(y))`.
    pub fn derivative(&self, y: T) -> Result<T> {
        Ok(T::one() / (self.spec.df)(self.invert(y)?))
    }
}

/// One-off inversion; fails with a domain error if `f` is not monotone on `[−20, 20]`.
pub fn invert_f<T: Real>(spec: &NonlinearitySpec<T>, y: T) -> Result<T> {
    MonotoneInverse::with_default_range(spec)?.invert(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_values() {
        let spec = NonlinearitySpec::<f64>::monotone_cubic();
        assert_eq!(invert_f(&spec, 0.0).unwrap(), 0.0);
        assert!((invert_f(&spec, 2.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((invert_f(&spec, 10.0).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bistable_refused() {
        assert!(matches!(invert_f(&NonlinearitySpec::<f64>::bistable_cubic(), 0.5), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn inversion_residual(y in -1e4f64..1e4) {
            let spec = NonlinearitySpec::<f64>::monotone_cubic();
            let inv = MonotoneInverse::with_default_range(&spec).unwrap();
            let v = inv.invert(y).unwrap();
            prop_assert!(((spec.f)(v) - y).abs() <= 1e-13 * (1.0 + y.abs()));
        }
    }
}
