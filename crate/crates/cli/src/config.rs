//! TOML run configuration. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use ecotone::model::{
    AssumptionConstants, Grid, HeatCoefficients, NonlinearitySpec, Polynomial, SystemParams,
};
use serde::Deserialize;

use crate::fail::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub stepper: StepperSection,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub forest: Option<ForestConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// `monotone-cubic` or `bistable-cubic`; ignored when `f` is given.
    pub nonlinearity: String,
    /// Ascending coefficients of a polynomial `f`.
    pub f: Option<Vec<f64>>,
    /// Ascending coefficients of `φ`; defaults to `φ ≡ 1`.
    pub phi: Option<Vec<f64>>,
    pub alpha: f64,
    pub diffusivity: f64,
    pub decay: f64,
    pub source_gain: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            nonlinearity: "monotone-cubic".into(),
            f: None,
            phi: None,
            alpha: 0.5,
            diffusivity: 1.0,
            decay: 1.0,
            source_gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub extents: Vec<f64>,
    pub nodes: Vec<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { extents: vec![1.0], nodes: vec![129] }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSection {
    pub dt: f64,
    pub horizon: f64,
    pub stride: usize,
    pub solver_tolerance: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        Self { dt: 1e-3, horizon: 1.0, stride: 100, solver_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    Zero,
    Constant,
    Random,
    Tanh,
    File,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: InitialKind,
    /// `constant`: value of `v`; `w` and `∂ₜv` are zero.
    pub value: f64,
    /// `random` and `tanh` amplitude.
    pub amplitude: f64,
    pub modes: usize,
    /// `tanh`: front position and width along the first axis.
    pub center: Option<f64>,
    pub width: f64,
    /// `file`: CSV with header `x[,y],v,vt,w`.
    pub path: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self { kind: InitialKind::Zero, value: 0.0, amplitude: 1.0, modes: 4, center: None, width: 0.1, path: None }
    }
}

/// Axis-aligned box `lower ≤ x ≤ upper` (componentwise) tagged with a root value.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    #[serde(default)]
    pub root: Option<f64>,
}

impl Region {
    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.lower.iter().zip(&self.upper).enumerate().all(|(d, (&lo, &hi))| x[d] >= lo && x[d] <= hi)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    /// Root for nodes outside every region.
    pub default_root: Option<f64>,
    #[serde(default)]
    pub regions: Vec<Region>,
    /// Whitespace-separated root indices (ascending root order), one per node.
    pub label_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Pass threshold used by `stabilize` (L¹ distance).
    pub tolerance: f64,
    pub h_list: Vec<f64>,
    pub horizons: Vec<f64>,
    pub nodes: Vec<usize>,
    pub root_range: [f64; 2],
    /// Initial guess for `w` in `equilibrium`.
    pub guess: f64,
    pub partition: Option<PartitionConfig>,
    /// `near-homog-eq`: base level, companion level and the `Ω₂` regions.
    pub base: Option<f64>,
    pub companion: Option<f64>,
    #[serde(default)]
    pub omega2: Vec<Region>,
    /// `lipschitz-contrast`.
    pub slopes: [f64; 2],
    pub h: f64,
    /// `perturb-lab`.
    pub forcing_amplitude: f64,
    pub forcing_frequency: f64,
    pub start: f64,
    pub delta: f64,
    pub ode_dt: f64,
    /// `convergence`.
    pub spatial_nodes: Vec<usize>,
    pub temporal_nodes: usize,
    pub temporal_dts: Vec<f64>,
    /// Relative growth allowed between the first and last horizon in node reports.
    pub growth_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            h_list: vec![],
            horizons: vec![],
            nodes: vec![],
            root_range: [-10.0, 10.0],
            guess: 0.0,
            partition: None,
            base: None,
            companion: None,
            omega2: vec![],
            slopes: [10.0, 100.0],
            h: 0.05,
            forcing_amplitude: 0.05,
            forcing_frequency: 1.0,
            start: 0.1,
            delta: 0.1,
            ode_dt: 1e-2,
            spatial_nodes: vec![17, 33, 65],
            temporal_nodes: 65,
            temporal_dts: vec![4e-2, 2e-2, 1e-2, 5e-3],
            growth_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestConfig {
    pub seed_production: f64,
    pub seed_loss: f64,
    pub germination: f64,
    pub diffusivity: f64,
    pub maturation: f64,
    pub old_mortality: f64,
    /// Ascending coefficients of `γ(v)`.
    pub young_mortality: Vec<f64>,
    /// Means of the initial `(u, v, w)`; random smooth fluctuations of
    /// size `initial.amplitude` are added.
    pub mean: [f64; 3],
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

fn invalid(key: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Validation(format!("{key}: {msg}"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Failure::Validation(format!("invalid config {}: {e}", path.display())))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.initial.path);
        if let Some(part) = &mut self.experiment.partition {
            fix(&mut part.label_file);
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let s = &self.stepper;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return Err(invalid("stepper.dt", format!("must be positive, got {}", s.dt)));
        }
        if !(s.horizon > 0.0 && s.horizon.is_finite()) {
            return Err(invalid("stepper.horizon", format!("must be positive, got {}", s.horizon)));
        }
        if s.stride == 0 {
            return Err(invalid("stepper.stride", "must be at least 1"));
        }
        if !(s.solver_tolerance > 0.0 && s.solver_tolerance <= 1e-6) {
            return Err(invalid("stepper.solver_tolerance", "must lie in (0, 1e-6]"));
        }
        let g = &self.grid;
        if g.extents.is_empty() || g.extents.len() > 2 || g.extents.len() != g.nodes.len() {
            return Err(invalid("grid", "extents and nodes must both have 1 or 2 entries"));
        }
        if g.extents.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(invalid("grid.extents", "must be positive"));
        }
        if g.nodes.iter().any(|&n| n < 3) {
            return Err(invalid("grid.nodes", "need at least 3 nodes per axis"));
        }
        let m = &self.model;
        if !(m.alpha >= 0.0 && m.alpha.is_finite()) {
            return Err(invalid("model.alpha", format!("must be non-negative, got {}", m.alpha)));
        }
        for (key, x) in [("model.diffusivity", m.diffusivity), ("model.decay", m.decay), ("model.source_gain", m.source_gain)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {x}")));
            }
        }
        if m.f.is_none() && !["monotone-cubic", "bistable-cubic"].contains(&m.nonlinearity.as_str()) {
            return Err(invalid(
                "model.nonlinearity",
                format!("unknown catalog entry `{}` (expected monotone-cubic or bistable-cubic)", m.nonlinearity),
            ));
        }
        if matches!(&m.f, Some(c) if c.len() < 2) {
            return Err(invalid("model.f", "needs at least two coefficients"));
        }
        if matches!(&m.phi, Some(c) if c.is_empty()) {
            return Err(invalid("model.phi", "needs at least one coefficient"));
        }
        let i = &self.initial;
        if i.kind == InitialKind::File {
            let path = i.path.as_ref().ok_or_else(|| invalid("initial.path", "required for kind = \"file\""))?;
            if !path.is_file() {
                return Err(invalid("initial.path", format!("{} does not exist", path.display())));
            }
        }
        if i.kind == InitialKind::Tanh && !(i.width > 0.0) {
            return Err(invalid("initial.width", "must be positive"));
        }
        if i.kind == InitialKind::Random && i.modes == 0 {
            return Err(invalid("initial.modes", "must be at least 1"));
        }
        let e = &self.experiment;
        if e.h_list.iter().any(|&h| !(h > 0.0)) {
            return Err(invalid("experiment.h_list", "separations must be positive"));
        }
        if e.horizons.iter().any(|&h| !(h > 0.0)) {
            return Err(invalid("experiment.horizons", "must be positive"));
        }
        let count: usize = g.nodes.iter().product();
        if let Some(&k) = e.nodes.iter().find(|&&k| k >= count) {
            return Err(invalid("experiment.nodes", format!("node {k} outside a grid of {count} nodes")));
        }
        if !(e.root_range[0] < e.root_range[1]) {
            return Err(invalid("experiment.root_range", "lower end must be below upper end"));
        }
        if !(e.tolerance > 0.0) {
            return Err(invalid("experiment.tolerance", "must be positive"));
        }
        if let Some(p) = &e.partition {
            if let Some(file) = &p.label_file {
                if !file.is_file() {
                    return Err(invalid("experiment.partition.label_file", format!("{} does not exist", file.display())));
                }
            }
            for r in &p.regions {
                check_region(r, g.extents.len(), "experiment.partition.regions")?;
                if r.root.is_none() {
                    return Err(invalid("experiment.partition.regions.root", "every region needs a root"));
                }
            }
        }
        for r in &e.omega2 {
            check_region(r, g.extents.len(), "experiment.omega2")?;
        }
        if !(e.ode_dt > 0.0) {
            return Err(invalid("experiment.ode_dt", "must be positive"));
        }
        if !(e.delta > 0.0) {
            return Err(invalid("experiment.delta", "must be positive"));
        }
        Ok(())
    }

    pub fn nonlinearity(&self) -> NonlinearitySpec<f64> {
        let m = &self.model;
        match &m.f {
            None if m.nonlinearity == "bistable-cubic" => NonlinearitySpec::bistable_cubic(),
            None => NonlinearitySpec::monotone_cubic(),
            Some(coeffs) => {
                let phi = m.phi.clone().unwrap_or_else(|| vec![1.0]);
                let floor = phi.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
                NonlinearitySpec::polynomial(
                    "polynomial",
                    Polynomial::new(coeffs.clone()),
                    Polynomial::new(phi),
                    AssumptionConstants {
                        damping_floor: floor,
                        slope_floor: 0.0,
                        growth_coefficient: 0.0,
                        growth_excess: 0.0,
                        dissipation_offset: 0.0,
                    },
                )
            }
        }
    }

    pub fn grid(&self) -> Result<Grid<f64>, Failure> {
        Ok(Grid::new(self.grid.extents.len(), &self.grid.extents, &self.grid.nodes)?)
    }

    pub fn params(&self) -> Result<SystemParams<f64>, Failure> {
        let m = &self.model;
        let heat = HeatCoefficients { diffusivity: m.diffusivity, decay: m.decay, source_gain: m.source_gain };
        Ok(SystemParams::with_heat(m.alpha, self.nonlinearity(), self.grid()?, heat)?)
    }
}

fn check_region(r: &Region, dim: usize, key: &str) -> Result<(), Failure> {
    if r.lower.len() != dim || r.upper.len() != dim {
        return Err(invalid(key, format!("lower and upper need {dim} coordinates")));
    }
    Ok(())
}
