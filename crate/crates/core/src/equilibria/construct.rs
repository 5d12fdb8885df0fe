use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::{lit, max_abs, Real};

use super::margin::margin_at;
use super::newton::newton_equilibrium;
use super::roots::OdeRootSet;
use super::solution::{residual_field, EquilibriumSolution, EquilibriumSource, HeatInverse, Partition};
use super::EquilibriumOptions;

fn finish<T: Real>(
    params: &SystemParams<T>,
    heat: &HeatInverse<T>,
    v0: Vec<T>,
    seed: &[T],
    iterations: usize,
    source: EquilibriumSource,
    partition: Option<Partition>,
) -> Result<EquilibriumSolution<T>> {
    let (r, w0) = residual_field(&v0, params, heat)?;
    let correction: Vec<T> = v0.iter().zip(seed).map(|(&a, &b)| a - b).collect();
    let margin = margin_at(&v0, params)?;
    Ok(EquilibriumSolution {
        residual: max_abs(&r),
        correction_norm: Some(max_abs(&correction)),
        margin: Some(margin.sigma_min),
        v0,
        w0,
        source,
        alpha: params.alpha,
        partition,
        newton_iterations: iterations,
    })
}

/// Equilibrium near `Σ uᵢ χ_{Ωᵢ}` for weak coupling, by Newton from that
/// profile. Fails when a referenced root is not hyperbolic, when `α`
/// exceeds `opts.alpha_max`, or when the correction exceeds a quarter of
/// the smallest gap between roots.
pub fn partition_equilibrium<T: Real>(
    partition: &Partition,
    roots: &OdeRootSet<T>,
    params: &SystemParams<T>,
    opts: &EquilibriumOptions<T>,
) -> Result<EquilibriumSolution<T>> {
    let seed = partition.profile(roots);
    partition_equilibrium_from(partition, roots, params, opts, &seed)
}

/// As [`partition_equilibrium`], with Newton started from `start` instead of
/// the piecewise-constant profile. The correction is still measured against
/// the profile.
pub fn partition_equilibrium_from<T: Real>(
    partition: &Partition,
    roots: &OdeRootSet<T>,
    params: &SystemParams<T>,
    opts: &EquilibriumOptions<T>,
    start: &[T],
) -> Result<EquilibriumSolution<T>> {
    params.grid.check_len(start)?;
    if partition.labels().len() != params.grid.node_count() {
        return Err(Error::Shape { expected: params.grid.node_count(), found: partition.labels().len() });
    }
    for &l in partition.labels() {
        let root = roots
            .roots
            .get(l)
            .ok_or_else(|| Error::Domain(format!("partition label {l} has no matching root")))?;
        if !root.hyperbolic {
            return Err(Error::Domain(format!("root {} is not hyperbolic (f' = {})", root.value, root.slope)));
        }
    }
    if params.alpha > opts.alpha_max {
        return Err(Error::Domain(format!(
            "alpha = {} exceeds the perturbative bound alpha_max = {}",
            params.alpha, opts.alpha_max
        )));
    }
    let profile = partition.profile(roots);
    let heat = HeatInverse::new(params, opts.solver_tolerance)?;
    let out = newton_equilibrium(params, &heat, start, opts.residual_tolerance, opts.max_newton).map_err(|e| {
        Error::Perturbative(format!("{e}; retry with a smaller alpha than {}", params.alpha))
    })?;
    let theta = out.v.iter().zip(&profile).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    let limit = roots.min_gap() * lit(0.25);
    if theta > limit {
        return Err(Error::Perturbative(format!(
            "correction {theta} exceeds a quarter of the root gap ({limit}); retry with a smaller alpha than {}",
            params.alpha
        )));
    }
    finish(params, &heat, out.v, &profile, out.iterations, EquilibriumSource::Partition, Some(partition.clone()))
}

/// Equilibrium near `v̄χ_{Ω₁} + ṽχ_{Ω₂}`, where `v̄` is a constant
/// equilibrium level and `f(ṽ) = f(v̄)`. `omega2` marks the nodes of the
/// small set `Ω₂`, whose quadrature measure may not exceed `opts.delta0()`.
pub fn near_homogeneous_equilibrium<T: Real>(
    vbar: T,
    vtilde: T,
    omega2: &[bool],
    params: &SystemParams<T>,
    opts: &EquilibriumOptions<T>,
) -> Result<EquilibriumSolution<T>> {
    let grid = &params.grid;
    if omega2.len() != grid.node_count() {
        return Err(Error::Shape { expected: grid.node_count(), found: omega2.len() });
    }
    let nl = &params.nonlinearity;
    let h = params.heat;
    let level = (nl.f)(vbar);
    let scale = T::one() + level.abs() + vbar.abs();
    let homogeneous_defect = level - params.alpha * h.source_gain / h.decay * vbar;
    if homogeneous_defect.abs() > lit::<T>(1e-10) * scale {
        return Err(Error::Domain(format!(
            "v̄ = {vbar} is not a constant equilibrium: f(v̄) − ακ/σ v̄ = {homogeneous_defect}"
        )));
    }
    if ((nl.f)(vtilde) - level).abs() > lit::<T>(1e-10) * scale {
        return Err(Error::Domain(format!("f(ṽ) = {} differs from f(v̄) = {level}", (nl.f)(vtilde))));
    }
    if (nl.df)(vtilde).abs() < lit(1e-8) {
        return Err(Error::Domain(format!("companion level {vtilde} is a critical point of f")));
    }
    let measure = grid.masked_measure(omega2);
    let delta0 = opts.delta0(grid.measure());
    if measure > delta0 {
        return Err(Error::Domain(format!("|Ω₂| = {measure} exceeds delta0 = {delta0}")));
    }
    let homogeneous = vec![vbar; grid.node_count()];
    let base = margin_at(&homogeneous, params)?;
    if !base.is_hyperbolic(opts.margin_threshold) {
        return Err(Error::Domain(format!(
            "homogeneous linearization is singular (margin {})",
            base.sigma_min
        )));
    }
    let seed: Vec<T> = omega2.iter().map(|&m| if m { vtilde } else { vbar }).collect();
    let heat = HeatInverse::new(params, opts.solver_tolerance)?;
    let out = newton_equilibrium(params, &heat, &seed, opts.residual_tolerance, opts.max_newton)
        .map_err(|e| Error::Perturbative(format!("{e}; retry with a smaller set Ω₂")))?;
    finish(params, &heat, out.v, &seed, out.iterations, EquilibriumSource::NearHomogeneous, None)
}
