use std::io::Write;

use serde::Serialize;

use crate::dynamics::operators::HelmholtzSolver;
use crate::error::{Error, Result};
use crate::model::{FieldState, Grid, SystemParams};
use crate::scalar::{lit, max_abs, to_f64, Real};

use super::roots::OdeRootSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumSource {
    MonotoneElliptic,
    Partition,
    NearHomogeneous,
}

impl EquilibriumSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MonotoneElliptic => "monotone-elliptic",
            Self::Partition => "partition",
            Self::NearHomogeneous => "near-homogeneous",
        }
    }
}

/// Node labelling by indices into an [`OdeRootSet`] (zero-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<usize>, root_count: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= root_count) {
            return Err(Error::Domain(format!("partition label {bad} refers to one of only {root_count} roots")));
        }
        Ok(Self { labels })
    }

    /// Labels each node by `rule(coords)`.
    pub fn from_fn<T: Real>(grid: &Grid<T>, root_count: usize, rule: impl Fn([T; 2]) -> usize) -> Result<Self> {
        Self::new((0..grid.node_count()).map(|k| rule(grid.coords(k))).collect(), root_count)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Quadrature measure of each part.
    pub fn measures<T: Real>(&self, grid: &Grid<T>, root_count: usize) -> Vec<T> {
        let mut m = vec![T::zero(); root_count];
        for (&l, &w) in self.labels.iter().zip(grid.weights()) {
            m[l] += w;
        }
        m
    }

    /// The piecewise-constant profile `Σ uᵢ χ_{Ωᵢ}`.
    pub fn profile<T: Real>(&self, roots: &OdeRootSet<T>) -> Vec<T> {
        self.labels.iter().map(|&l| roots.roots[l].value).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumSolution<T> {
    pub v0: Vec<T>,
    pub w0: Vec<T>,
    /// `‖f(v₀) − αw₀‖∞`.
    pub residual: T,
    /// `‖v₀ − ṽ₀‖∞` against the seed profile, when there is one.
    pub correction_norm: Option<T>,
    /// Smallest singular value of the linearization.
    pub margin: Option<T>,
    pub source: EquilibriumSource,
    pub alpha: T,
    pub partition: Option<Partition>,
    pub newton_iterations: usize,
}

impl<T: Real> EquilibriumSolution<T> {
    pub fn to_state(&self) -> FieldState<T> {
        let n = self.v0.len();
        FieldState::new(T::zero(), self.v0.clone(), vec![T::zero(); n], self.w0.clone())
    }

    pub fn is_hyperbolic(&self, threshold: T) -> bool {
        self.margin.is_some_and(|m| m > threshold)
    }

    pub fn summary(&self) -> EquilibriumSummary {
        EquilibriumSummary {
            residual: to_f64(self.residual),
            correction_norm: self.correction_norm.map(to_f64),
            margin: self.margin.map(to_f64),
            source: self.source.as_str().to_string(),
            alpha: to_f64(self.alpha),
        }
    }

    /// CSV with columns `x[,y],v0,w0`.
    pub fn write_csv(&self, grid: &Grid<T>, mut out: impl Write) -> std::io::Result<()> {
        if grid.dim() == 1 {
            writeln!(out, "x,v0,w0")?;
        } else {
            writeln!(out, "x,y,v0,w0")?;
        }
        for k in 0..self.v0.len() {
            let c = grid.coords(k);
            if grid.dim() == 1 {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", to_f64(c[0]), to_f64(self.v0[k]), to_f64(self.w0[k]))?;
            } else {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    to_f64(c[0]),
                    to_f64(c[1]),
                    to_f64(self.v0[k]),
                    to_f64(self.w0[k])
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSummary {
    pub residual: f64,
    pub correction_norm: Option<f64>,
    pub margin: Option<f64>,
    pub source: String,
    pub alpha: f64,
}

/// Steady-state heat operator `K = κ(−dΔ_h + σ)⁻¹`.
#[derive(Debug, Clone)]
pub(crate) struct HeatInverse<T> {
    solver: HelmholtzSolver<T>,
    gain: T,
}

impl<T: Real> HeatInverse<T> {
    pub(crate) fn new(params: &SystemParams<T>, tolerance: T) -> Result<Self> {
        let h = params.heat;
        Ok(Self { solver: HelmholtzSolver::new(&params.grid, h.decay, h.diffusivity, tolerance)?, gain: h.source_gain })
    }

    pub(crate) fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let mut w = self.solver.solve(v)?;
        w.iter_mut().for_each(|x| *x *= self.gain);
        Ok(w)
    }

    pub(crate) fn solver(&self) -> &HelmholtzSolver<T> {
        &self.solver
    }
}

/// `F(v) = f(v) − αKv` nodewise, together with `w = Kv`.
pub(crate) fn residual_field<T: Real>(v: &[T], params: &SystemParams<T>, heat: &HeatInverse<T>) -> Result<(Vec<T>, Vec<T>)> {
    let w = heat.apply(v)?;
    let r = v.iter().zip(&w).map(|(&vi, &wi)| (params.nonlinearity.f)(vi) - params.alpha * wi).collect();
    Ok((r, w))
}

/// `‖f(v) − α(−dΔ_h + σ)⁻¹κ v‖∞`.
pub fn equilibrium_residual<T: Real>(v: &[T], params: &SystemParams<T>) -> Result<T> {
    params.grid.check_len(v)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("equilibrium candidate has non-finite entries".into()));
    }
    let heat = HeatInverse::new(params, lit(1e-13))?;
    Ok(max_abs(&residual_field(v, params, &heat)?.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NonlinearitySpec;

    #[test]
    fn constant_root_residual() {
        let g = Grid::<f64>::interval(1.0, 41).unwrap();
        let p = SystemParams::new(0.3, NonlinearitySpec::bistable_cubic(), g).unwrap();
        let r = equilibrium_residual(&[1.0; 41], &p).unwrap();
        assert!((r - 0.3).abs() < 1e-14);
    }

    #[test]
    fn partition_measures_and_profile() {
        let g = Grid::<f64>::interval(1.0, 11).unwrap();
        let roots = crate::equilibria::ode_roots(|v: f64| v * v * v - v, |v| 3.0 * v * v - 1.0, (-2.0, 2.0), 200).unwrap();
        let part = Partition::from_fn(&g, 3, |x| if x[0] < 0.5 { 0 } else { 2 }).unwrap();
        let m = part.measures(&g, 3);
        assert!((m[0] - 0.45).abs() < 1e-14 && m[1] == 0.0 && (m[2] - 0.55).abs() < 1e-14);
        let prof = part.profile(&roots);
        assert_eq!(prof[0], -1.0);
        assert_eq!(prof[10], 1.0);
        assert!(Partition::new(vec![3], 3).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let g = Grid::<f64>::rectangle([1.0, 1.0], [3, 3]).unwrap();
        let sol = EquilibriumSolution {
            v0: vec![0.0; 9],
            w0: vec![0.0; 9],
            residual: 0.0,
            correction_norm: None,
            margin: Some(1.0),
            source: EquilibriumSource::Partition,
            alpha: 0.01,
            partition: None,
            newton_iterations: 0,
        };
        let mut buf = Vec::new();
        sol.write_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,v0,w0\n"));
        assert_eq!(text.lines().count(), 10);
        let json = serde_json::to_value(sol.summary()).unwrap();
        assert_eq!(json["source"], "partition");
    }
}
