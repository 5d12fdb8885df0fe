use crate::diagnostics::seminorm::lip_seminorm;
use crate::dynamics::{simulate, Probes, StepperConfig, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::experiments::data::tanh_profile;
use crate::model::{FieldState, Grid, NonlinearitySpec, SystemParams};
use crate::scalar::{lit, Real};

/// Paired runs from `amplitude·tanh((x − center)/width)` with widths chosen
/// so the profiles have slopes `slopes[0]` and `slopes[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastSetup<T> {
    pub extent: T,
    pub nodes: usize,
    pub alpha: T,
    pub amplitude: T,
    pub center: T,
    pub slopes: [T; 2],
    pub dt: T,
    pub horizon: T,
    /// Coarse separation compared between monotone runs.
    pub h: T,
    pub stride: usize,
}

impl<T: Real> Default for ContrastSetup<T> {
    fn default() -> Self {
        Self {
            extent: lit(10.0),
            nodes: 2001,
            alpha: lit(0.9),
            amplitude: T::one(),
            center: lit(5.0),
            slopes: [lit(10.0), lit(100.0)],
            dt: lit(1e-2),
            horizon: lit(50.0),
            h: lit(0.05),
            stride: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContrastRun<T> {
    pub catalog: String,
    pub slope: T,
    /// Seminorms of the initial `v` at `h` and at `2Δx`.
    pub initial_h: T,
    pub initial_fine: T,
    pub final_h: T,
    pub final_fine: T,
    pub record: TrajectoryRecord<T>,
}

#[derive(Debug, Clone)]
pub struct ContrastOutcome<T> {
    pub monotone: [ContrastRun<T>; 2],
    pub bistable: [ContrastRun<T>; 2],
}

impl<T: Real> ContrastOutcome<T> {
    /// `|a − b| / max(a, b)` of the final seminorms at `h` in the monotone pair.
    pub fn monotone_relative_gap(&self) -> T {
        let [a, b] = [self.monotone[0].final_h, self.monotone[1].final_h];
        (a - b).abs() / a.max(b)
    }

    /// Larger over smaller final `2Δx` seminorm in the bistable pair.
    pub fn bistable_ratio(&self) -> T {
        let [a, b] = [self.bistable[0].final_fine, self.bistable[1].final_fine];
        a.max(b) / a.min(b)
    }
}

fn run<T: Real>(setup: &ContrastSetup<T>, spec: NonlinearitySpec<T>, slope: T) -> Result<ContrastRun<T>> {
    let grid = Grid::interval(setup.extent, setup.nodes)?;
    let fine = lit::<T>(2.0) * grid.min_spacing();
    let width = setup.amplitude / slope;
    let v = tanh_profile(&grid, setup.amplitude, setup.center, width);
    let n = grid.node_count();
    let initial = FieldState::new(T::zero(), v, vec![T::zero(); n], vec![T::zero(); n]);
    let catalog = spec.label.clone();
    let params = SystemParams::new(setup.alpha, spec, grid)?;
    let probes = Probes { seminorm_h: vec![setup.h, fine], ..Probes::default() };
    let cfg = StepperConfig::new(setup.dt).with_stride(setup.stride);
    let record = simulate(&initial, &params, &cfg, setup.horizon, &probes)?.into_complete()?;
    let last = &record.last().diagnostics.seminorms;
    Ok(ContrastRun {
        catalog,
        slope,
        initial_h: lip_seminorm(&initial.v, &params.grid, setup.h)?,
        initial_fine: lip_seminorm(&initial.v, &params.grid, fine)?,
        final_h: last[0].v,
        final_fine: last[1].v,
        record,
    })
}

/// Runs both slopes under the monotone and the bistable cubic.
pub fn lipschitz_contrast<T: Real>(setup: &ContrastSetup<T>) -> Result<ContrastOutcome<T>> {
    if !(setup.slopes[0] > T::zero() && setup.slopes[1] > T::zero()) {
        return Err(Error::Config("experiment.slopes must be positive".into()));
    }
    if !(setup.amplitude > T::zero()) {
        return Err(Error::Config("experiment.amplitude must be positive".into()));
    }
    let pair = |spec: fn() -> NonlinearitySpec<T>| -> Result<[ContrastRun<T>; 2]> {
        Ok([run(setup, spec(), setup.slopes[0])?, run(setup, spec(), setup.slopes[1])?])
    };
    Ok(ContrastOutcome { monotone: pair(NonlinearitySpec::monotone_cubic)?, bistable: pair(NonlinearitySpec::bistable_cubic)? })
}
