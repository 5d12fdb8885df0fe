use crate::error::{Error, Result};
use crate::model::NonlinearitySpec;
use crate::scalar::{from_usize, lit, Real};

/// Roots with `|f′| < NON_HYPERBOLIC_SLOPE` are flagged non-hyperbolic.
pub const NON_HYPERBOLIC_SLOPE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeRoot<T> {
    pub value: T,
    pub slope: T,
    pub hyperbolic: bool,
}

/// Zeros of `f` on a scan range, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeRootSet<T> {
    pub roots: Vec<OdeRoot<T>>,
    /// Magnitude against which root residuals are judged.
    pub scale: T,
}

impl<T: Real> OdeRootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn values(&self) -> Vec<T> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn all_hyperbolic(&self) -> bool {
        self.roots.iter().all(|r| r.hyperbolic)
    }

    /// Index of the root closest to `v`.
    pub fn nearest(&self, v: T) -> Option<usize> {
        (0..self.roots.len()).min_by(|&a, &b| {
            let da = (self.roots[a].value - v).abs();
            let db = (self.roots[b].value - v).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        })
    }

    /// Smallest distance between adjacent roots; infinite for fewer than two roots.
    pub fn min_gap(&self) -> T {
        self.roots
            .windows(2)
            .map(|w| w[1].value - w[0].value)
            .fold(T::infinity(), T::min)
    }

    pub fn index_of(&self, value: T) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| (r.value - value).abs() <= lit::<T>(1e-9) * (T::one() + value.abs()))
    }

    /// Scans `spec.f`; see [`ode_roots`].
    pub fn of_spec(spec: &NonlinearitySpec<T>, range: (T, T), scan_points: usize) -> Result<Self> {
        ode_roots(|v| (spec.f)(v), |v| (spec.df)(v), range, scan_points)
    }
}

fn polish<T: Real>(f: &impl Fn(T) -> T, df: &impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if hi - lo <= lit::<T>(1e-14) * (T::one() + mid.abs()) || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm < T::zero()) == (flo < T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = (lo + hi) * lit(0.5);
    for _ in 0..3 {
        let d = df(x);
        if d == T::zero() {
            break;
        }
        let next = x - f(x) / d;
        if next < lo || next > hi || !next.is_finite() {
            break;
        }
        x = next;
    }
    x
}

/// Newton from a local minimum of `|f|` without a sign change (even-order
/// zeros). Returns `None` unless the iteration reaches a zero.
fn touch_root<T: Real>(f: &impl Fn(T) -> T, df: &impl Fn(T) -> T, x0: T, lo: T, hi: T, tol: T) -> Option<T> {
    let mut x = x0;
    for _ in 0..200 {
        let fx = f(x);
        if fx == T::zero() {
            return Some(x);
        }
        let d = df(x);
        if d == T::zero() {
            break;
        }
        let next = x - fx / d;
        if !(next >= lo && next <= hi) {
            return None;
        }
        let small = (next - x).abs() <= lit::<T>(1e-15) * (T::one() + x.abs());
        x = next;
        if small {
            break;
        }
    }
    (f(x).abs() <= tol).then_some(x)
}

/// Roots of `f` on `range` by sign-change bracketing on `scan_points`
/// uniform samples, bisection and a guarded Newton polish. Zeros without
/// a sign change are found from local minima of `|f|`.
pub fn ode_roots<T: Real>(
    f: impl Fn(T) -> T,
    df: impl Fn(T) -> T,
    range: (T, T),
    scan_points: usize,
) -> Result<OdeRootSet<T>> {
    let (a, b) = range;
    if scan_points < 100 {
        return Err(Error::Config(format!("root scan needs at least 100 points, got {scan_points}")));
    }
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("degenerate scan range [{a}, {b}]")));
    }
    let step = (b - a) / from_usize(scan_points - 1);
    let xs: Vec<T> = (0..scan_points).map(|i| if i + 1 == scan_points { b } else { a + from_usize::<T>(i) * step }).collect();
    let mut fs = Vec::with_capacity(scan_points);
    for &x in &xs {
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Evaluation { what: "f", at: crate::scalar::to_f64(x) });
        }
        fs.push(y);
    }
    let scale = T::one().max(fs.iter().fold(T::zero(), |m, y| m.max(y.abs())));
    let tol = lit::<T>(1e-12) * scale;

    let mut found: Vec<T> = Vec::new();
    for i in 0..scan_points {
        if fs[i] == T::zero() {
            found.push(xs[i]);
            continue;
        }
        if i + 1 < scan_points && fs[i + 1] != T::zero() && (fs[i] < T::zero()) != (fs[i + 1] < T::zero()) {
            found.push(polish(&f, &df, xs[i], xs[i + 1]));
            continue;
        }
        if i > 0 && i + 1 < scan_points {
            let m = fs[i].abs();
            let same_sign = (fs[i - 1] < T::zero()) == (fs[i] < T::zero()) && (fs[i + 1] < T::zero()) == (fs[i] < T::zero());
            if same_sign && m <= fs[i - 1].abs() && m <= fs[i + 1].abs() {
                if let Some(x) = touch_root(&f, &df, xs[i], xs[i - 1], xs[i + 1], tol) {
                    found.push(x);
                }
            }
        }
    }
    found.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut roots: Vec<OdeRoot<T>> = Vec::new();
    for x in found {
        if let Some(last) = roots.last() {
            if (x - last.value).abs() <= lit::<T>(1e-10) * (T::one() + x.abs()) {
                continue;
            }
        }
        let slope = df(x);
        roots.push(OdeRoot { value: x, slope, hyperbolic: slope.abs() >= lit(NON_HYPERBOLIC_SLOPE) });
    }
    Ok(OdeRootSet { roots, scale })
}
