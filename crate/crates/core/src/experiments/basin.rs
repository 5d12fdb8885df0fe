use crate::equilibria::{OdeRootSet, Partition};
use crate::error::{Error, Result};
use crate::model::{FieldState, NonlinearitySpec};
use crate::perturbation::rk4_step;
use crate::scalar::{lit, Real};

/// Integration controls for the uncoupled node equation `y″ + φ(y)y′ + f(y) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasinOptions<T> {
    pub dt: T,
    pub max_time: T,
    /// Settled once `|y′|` and `|f(y)|` are both below this.
    pub settle_tolerance: T,
}

impl<T: Real> Default for BasinOptions<T> {
    fn default() -> Self {
        Self { dt: lit(0.01), max_time: lit(500.0), settle_tolerance: lit(1e-10) }
    }
}

/// Index of the root the node pair `(v, v_t)` settles to under the
/// uncoupled equation. Fails if the node has not settled by `max_time`.
pub fn basin_label<T: Real>(spec: &NonlinearitySpec<T>, roots: &OdeRootSet<T>, v: T, vt: T, opts: &BasinOptions<T>) -> Result<usize> {
    let rhs = |_t: T, y: &[T]| vec![y[1], -(spec.phi)(y[0]) * y[1] - (spec.f)(y[0])];
    let mut y = vec![v, vt];
    let mut t = T::zero();
    loop {
        if y[1].abs() <= opts.settle_tolerance && (spec.f)(y[0]).abs() <= opts.settle_tolerance {
            break;
        }
        if t >= opts.max_time {
            return Err(Error::Convergence {
                what: "basin labelling",
                iterations: (opts.max_time / opts.dt).to_usize().unwrap_or(0),
                residual: crate::scalar::to_f64(y[1].abs().max((spec.f)(y[0]).abs())),
                history: vec![],
            });
        }
        y = rk4_step(&rhs, t, &y, opts.dt);
        t += opts.dt;
    }
    roots.nearest(y[0]).ok_or_else(|| Error::Domain("no roots to label against".into()))
}

/// Labels every node of `state` by its basin.
pub fn basin_partition<T: Real>(
    spec: &NonlinearitySpec<T>,
    roots: &OdeRootSet<T>,
    state: &FieldState<T>,
    opts: &BasinOptions<T>,
) -> Result<Partition> {
    let labels = state
        .v
        .iter()
        .zip(&state.vt)
        .map(|(&v, &vt)| basin_label(spec, roots, v, vt, opts))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(labels, roots.len())
}
