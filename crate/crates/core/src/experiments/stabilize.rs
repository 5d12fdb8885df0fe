use crate::diagnostics::norms::{diff, norm, Norm};
use crate::diagnostics::seminorm::lip_seminorm;
use crate::diagnostics::{kato_check, KatoReport};
use crate::dynamics::{simulate, Probes, StepperConfig, TrajectoryRecord};
use crate::equilibria::{partition_equilibrium, EquilibriumOptions, EquilibriumSolution, OdeRootSet, Partition};
use crate::error::Result;
use crate::experiments::basin::{basin_partition, BasinOptions};
use crate::experiments::data::tanh_profile;
use crate::model::{FieldState, Grid, NonlinearitySpec, SystemParams};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct StabilizeSetup<T> {
    pub params: SystemParams<T>,
    pub initial: FieldState<T>,
    pub stepper: StepperConfig<T>,
    pub horizon: T,
    /// Interval scanned for roots of `f`.
    pub root_range: (T, T),
    pub basin: BasinOptions<T>,
    pub equilibrium: EquilibriumOptions<T>,
    pub probes: Probes<T>,
}

impl<T: Real> StabilizeSetup<T> {
    /// Bistable cubic on `[0, 1]` with `v = tanh((x − 0.5)/width)`, `∂ₜv = w = 0`.
    pub fn tanh_front(nodes: usize, alpha: T, width: T, dt: T, horizon: T) -> Result<Self> {
        let grid = Grid::interval(T::one(), nodes)?;
        let v = tanh_profile(&grid, T::one(), lit(0.5), width);
        let initial = FieldState::new(T::zero(), v, vec![T::zero(); nodes], vec![T::zero(); nodes]);
        let params = SystemParams::new(alpha, NonlinearitySpec::bistable_cubic(), grid)?;
        Ok(Self {
            params,
            initial,
            stepper: StepperConfig::new(dt).with_stride(100),
            horizon,
            root_range: (lit(-5.0), lit(5.0)),
            basin: BasinOptions::default(),
            equilibrium: EquilibriumOptions::default(),
            probes: Probes::default(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct StabilizeOutcome<T> {
    pub record: TrajectoryRecord<T>,
    pub roots: OdeRootSet<T>,
    pub partition: Partition,
    pub equilibrium: EquilibriumSolution<T>,
    pub distance_l1: T,
    pub distance_l2: T,
    pub distance_linf: T,
    /// Lipschitz seminorm of `v` at separation `2Δx`, initially and finally.
    pub lipschitz_initial: T,
    pub lipschitz_final: T,
    pub kato: KatoReport<T>,
}

/// Simulates, labels every node by the basin of its initial pair, builds
/// the partition equilibrium for those labels and measures how far the
/// final state is from it.
pub fn stabilize<T: Real>(setup: &StabilizeSetup<T>) -> Result<StabilizeOutcome<T>> {
    let params = &setup.params;
    let grid = &params.grid;
    setup.initial.validate(grid)?;
    let spec = &params.nonlinearity;
    let roots = OdeRootSet::of_spec(spec, setup.root_range, 2000)?;
    let partition = basin_partition(spec, &roots, &setup.initial, &setup.basin)?;
    let equilibrium = partition_equilibrium(&partition, &roots, params, &setup.equilibrium)?;

    let record = simulate(&setup.initial, params, &setup.stepper, setup.horizon, &setup.probes)?.into_complete()?;
    let gap = diff(&record.final_state.v, &equilibrium.v0);
    let h = lit::<T>(2.0) * grid.min_spacing();
    Ok(StabilizeOutcome {
        distance_l1: norm(&gap, grid, Norm::L1),
        distance_l2: norm(&gap, grid, Norm::L2),
        distance_linf: norm(&gap, grid, Norm::Linf),
        lipschitz_initial: lip_seminorm(&setup.initial.v, grid, h)?,
        lipschitz_final: lip_seminorm(&record.final_state.v, grid, h)?,
        kato: kato_check(&record),
        record,
        roots,
        partition,
        equilibrium,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_run_labels_and_steepens() {
        let setup = StabilizeSetup::<f64>::tanh_front(65, 0.01, 0.1, 1e-2, 30.0).unwrap();
        let out = stabilize(&setup).unwrap();
        let labels = out.partition.labels();
        assert_eq!(labels[0], 0);
        assert_eq!(labels[32], 1);
        assert_eq!(labels[64], 2);
        assert!(out.distance_l1 < 1e-3, "{}", out.distance_l1);
        assert!(out.lipschitz_final > out.lipschitz_initial);
    }
}
