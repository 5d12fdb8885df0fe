use std::io::Write;

use ecotone::diagnostics::{energy_identity_residual, kato_check, worst_lyapunov_growth, KatoReport};
use ecotone::dynamics::forest::{forest_comparison, ForestState};
use ecotone::dynamics::mms::MmsProblem;
use ecotone::dynamics::{manufactured_convergence, simulate, Probes, StepperConfig, TrajectoryRecord};
use ecotone::equilibria::{
    near_homogeneous_equilibrium, partition_equilibrium, solve_monotone_equilibrium, EquilibriumOptions,
    EquilibriumSolution, OdeRootSet, Partition,
};
use ecotone::experiments::{
    lipschitz_contrast, random_smooth_field, random_smooth_state, stabilize, tanh_profile, write_diagnostics_csv,
    write_node_csv, write_seminorm_csv, write_state_csv, BasinOptions, ContrastSetup, StabilizeSetup,
};
use ecotone::model::{FieldState, ForestParams, Grid, Polynomial, SystemParams};
use ecotone::perturbation::{node_stabilization_report, reports_over_horizons, tv_check, ForcedOdeProblem, TvCheckConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{InitialKind, RunConfig};
use crate::fail::Failure;
use crate::output::Output;

/// What a command reports besides the files it wrote.
pub struct Outcome {
    pub summary: String,
    /// Set when the run completed but missed its configured check.
    pub check_failed: Option<String>,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Self { summary, check_failed: None }
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub seed: u64,
    pub out: &'a mut Output,
}

fn stepper(cfg: &RunConfig) -> StepperConfig<f64> {
    let mut s = StepperConfig::new(cfg.stepper.dt).with_stride(cfg.stepper.stride);
    s.solver_tolerance = cfg.stepper.solver_tolerance;
    s
}

fn initial_state(cfg: &RunConfig, grid: &Grid<f64>, seed: u64) -> Result<FieldState<f64>, Failure> {
    let i = &cfg.initial;
    let n = grid.node_count();
    Ok(match i.kind {
        InitialKind::Zero => FieldState::zeros(grid),
        InitialKind::Constant => FieldState::new(0.0, vec![i.value; n], vec![0.0; n], vec![0.0; n]),
        InitialKind::Random => random_smooth_state(grid, seed, i.modes, i.amplitude),
        InitialKind::Tanh => {
            let center = i.center.unwrap_or(grid.extents()[0] / 2.0);
            FieldState::new(0.0, tanh_profile(grid, i.amplitude, center, i.width), vec![0.0; n], vec![0.0; n])
        }
        InitialKind::File => read_state(i.path.as_deref().expect("validated"), grid)?,
    })
}

/// Reads a `x[,y],v,vt,w` CSV written by `simulate`; only the last three
/// columns are used.
fn read_state(path: &std::path::Path, grid: &Grid<f64>) -> Result<FieldState<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("initial.path: {e}")))?;
    let mut v = Vec::new();
    let mut vt = Vec::new();
    let mut w = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()) {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Validation(format!("initial.path line {}: {e}", line_no + 1)))?;
        if cells.len() < 3 {
            return Err(Failure::Validation(format!("initial.path line {}: expected v,vt,w columns", line_no + 1)));
        }
        let k = cells.len();
        v.push(cells[k - 3]);
        vt.push(cells[k - 2]);
        w.push(cells[k - 1]);
    }
    if v.len() != grid.node_count() {
        return Err(Failure::Validation(format!(
            "initial.path: {} rows for a grid of {} nodes",
            v.len(),
            grid.node_count()
        )));
    }
    Ok(FieldState::new(0.0, v, vt, w))
}

fn kato_json(k: &KatoReport<f64>) -> Value {
    json!({
        "worst_violation": k.worst_violation,
        "scale": k.scale,
        "relative_violation": k.relative_violation(),
        "worst_time": k.worst_time,
    })
}

fn write_record(ctx: &mut Context, rec: &TrajectoryRecord<f64>, grid: &Grid<f64>) -> Result<(), Failure> {
    ctx.out.write_with("diagnostics.csv", |w| write_diagnostics_csv(rec, w))?;
    ctx.out.write_with("final_state.csv", |w| write_state_csv(grid, &rec.final_state, w))?;
    if !ctx.cfg.experiment.h_list.is_empty() {
        ctx.out.write_with("seminorms.csv", |w| write_seminorm_csv(rec, w))?;
    }
    if !ctx.cfg.experiment.nodes.is_empty() {
        ctx.out.write_with("nodes.csv", |w| write_node_csv(rec, w))?;
        if !ctx.cfg.experiment.horizons.is_empty() {
            let report = node_stabilization_report(
                rec,
                &ctx.cfg.experiment.nodes,
                &ctx.cfg.experiment.horizons,
                ctx.cfg.experiment.growth_tolerance,
            )?;
            ctx.out.write_json("node_report.json", &report)?;
        }
    }
    Ok(())
}

fn probes(cfg: &RunConfig) -> Probes<f64> {
    Probes { seminorm_h: cfg.experiment.h_list.clone(), nodes: cfg.experiment.nodes.clone(), keep_snapshots: false }
}

pub fn simulate_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let params = ctx.cfg.params()?;
    let s0 = initial_state(ctx.cfg, &params.grid, ctx.seed)?;
    let rec = simulate(&s0, &params, &stepper(ctx.cfg), ctx.cfg.stepper.horizon, &probes(ctx.cfg))?;
    write_record(ctx, &rec, &params.grid)?;
    let t_end = rec.last().t();
    let summary = json!({
        "t_final": t_end,
        "samples": rec.samples.len(),
        "lyapunov_initial": rec.samples[0].diagnostics.lyapunov,
        "lyapunov_final": rec.last().diagnostics.lyapunov,
        "energy_identity_residual": energy_identity_residual(&rec, 0.0, t_end).ok(),
        "worst_lyapunov_growth": worst_lyapunov_growth(&rec),
        "kato": kato_json(&kato_check(&rec)),
        "failure": rec.failure.as_ref().map(|e| e.to_string()),
    });
    ctx.out.write_json("summary.json", &summary)?;
    if let Some(e) = rec.failure {
        return Err(e.into());
    }
    Ok(Outcome::ok(format!("simulated to t = {t_end}, {} samples", rec.samples.len())))
}

fn write_equilibrium(ctx: &mut Context, eq: &EquilibriumSolution<f64>, grid: &Grid<f64>) -> Result<Outcome, Failure> {
    ctx.out.write_with("equilibrium.csv", |w| eq.write_csv(grid, w))?;
    ctx.out.write_json("equilibrium.json", &eq.summary())?;
    Ok(Outcome::ok(format!(
        "{} equilibrium: residual {:.3e}, margin {}",
        eq.source.as_str(),
        eq.residual,
        eq.margin.map_or("n/a".to_string(), |m| format!("{m:.4e}"))
    )))
}

pub fn equilibrium_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let params = ctx.cfg.params()?;
    let guess = vec![ctx.cfg.experiment.guess; params.grid.node_count()];
    let eq = solve_monotone_equilibrium(&params, &guess, &EquilibriumOptions::default())?;
    write_equilibrium(ctx, &eq, &params.grid)
}

fn roots(cfg: &RunConfig, params: &SystemParams<f64>) -> Result<OdeRootSet<f64>, Failure> {
    let [lo, hi] = cfg.experiment.root_range;
    Ok(OdeRootSet::of_spec(&params.nonlinearity, (lo, hi), 2000)?)
}

fn root_index(roots: &OdeRootSet<f64>, value: f64, key: &str) -> Result<usize, Failure> {
    roots.roots.iter().position(|r| (r.value - value).abs() <= 1e-6 * (1.0 + value.abs())).ok_or_else(|| {
        Failure::Validation(format!("{key}: {value} is not a root of f (roots: {:?})", roots.values()))
    })
}

fn build_partition(cfg: &RunConfig, params: &SystemParams<f64>, roots: &OdeRootSet<f64>) -> Result<Partition, Failure> {
    let spec = cfg
        .experiment
        .partition
        .as_ref()
        .ok_or_else(|| Failure::Validation("experiment.partition: section required".into()))?;
    let grid = &params.grid;
    if let Some(file) = &spec.label_file {
        let text = std::fs::read_to_string(file).map_err(|e| Failure::Validation(format!("label_file: {e}")))?;
        let labels = text
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Validation(format!("experiment.partition.label_file: {e}")))?;
        if labels.len() != grid.node_count() {
            return Err(Failure::Validation(format!(
                "experiment.partition.label_file: {} labels for {} nodes",
                labels.len(),
                grid.node_count()
            )));
        }
        return Ok(Partition::new(labels, roots.len())?);
    }
    let default = match spec.default_root {
        Some(v) => Some(root_index(roots, v, "experiment.partition.default_root")?),
        None => None,
    };
    let regions = spec
        .regions
        .iter()
        .map(|r| Ok((r, root_index(roots, r.root.expect("validated"), "experiment.partition.regions.root")?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut labels = Vec::with_capacity(grid.node_count());
    for k in 0..grid.node_count() {
        let x = grid.coords(k);
        let label = regions.iter().rev().find(|(r, _)| r.contains(x)).map(|&(_, l)| l).or(default);
        labels.push(label.ok_or_else(|| {
            Failure::Validation(format!("experiment.partition: node {k} lies in no region and there is no default_root"))
        })?);
    }
    Ok(Partition::new(labels, roots.len())?)
}

pub fn partition_eq_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let params = ctx.cfg.params()?;
    let roots = roots(ctx.cfg, &params)?;
    let partition = build_partition(ctx.cfg, &params, &roots)?;
    let eq = partition_equilibrium(&partition, &roots, &params, &EquilibriumOptions::default())?;
    write_equilibrium(ctx, &eq, &params.grid)
}

pub fn near_homog_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let params = ctx.cfg.params()?;
    let e = &ctx.cfg.experiment;
    let base = e.base.ok_or_else(|| Failure::Validation("experiment.base: required".into()))?;
    let companion = e.companion.ok_or_else(|| Failure::Validation("experiment.companion: required".into()))?;
    let grid = &params.grid;
    let mask: Vec<bool> = (0..grid.node_count()).map(|k| e.omega2.iter().any(|r| r.contains(grid.coords(k)))).collect();
    let eq = near_homogeneous_equilibrium(base, companion, &mask, &params, &EquilibriumOptions::default())?;
    write_equilibrium(ctx, &eq, grid)
}

pub fn stabilize_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let cfg = ctx.cfg;
    let params = cfg.params()?;
    let initial = initial_state(cfg, &params.grid, ctx.seed)?;
    let [lo, hi] = cfg.experiment.root_range;
    let setup = StabilizeSetup {
        params: params.clone(),
        initial,
        stepper: stepper(cfg),
        horizon: cfg.stepper.horizon,
        root_range: (lo, hi),
        basin: BasinOptions::default(),
        equilibrium: EquilibriumOptions::default(),
        probes: probes(cfg),
    };
    let out = stabilize(&setup)?;
    let grid = &params.grid;
    write_record(ctx, &out.record, grid)?;
    ctx.out.write_with("equilibrium.csv", |w| out.equilibrium.write_csv(grid, w))?;
    ctx.out.write_with("labels.csv", |w| {
        writeln!(w, "node,label,root")?;
        for (k, &l) in out.partition.labels().iter().enumerate() {
            writeln!(w, "{k},{l},{:.16e}", out.roots.roots[l].value)?;
        }
        Ok(())
    })?;
    let tolerance = cfg.experiment.tolerance;
    let pass = out.distance_l1 <= tolerance;
    ctx.out.write_json(
        "stabilize.json",
        &json!({
            "distance_l1": out.distance_l1,
            "distance_l2": out.distance_l2,
            "distance_linf": out.distance_linf,
            "lipschitz_initial": out.lipschitz_initial,
            "lipschitz_final": out.lipschitz_final,
            "kato": kato_json(&out.kato),
            "equilibrium": out.equilibrium.summary(),
            "tolerance": tolerance,
            "pass": pass,
        }),
    )?;
    let summary = format!(
        "L1 distance to partition equilibrium {:.3e} (tolerance {tolerance:.1e}); Lipschitz {:.3} -> {:.3}",
        out.distance_l1, out.lipschitz_initial, out.lipschitz_final
    );
    Ok(Outcome {
        check_failed: (!pass).then(|| format!("L1 distance {:.3e} exceeds tolerance {tolerance:.1e}", out.distance_l1)),
        summary,
    })
}

pub fn contrast_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let cfg = ctx.cfg;
    if cfg.grid.extents.len() != 1 {
        return Err(Failure::Validation("grid: lipschitz-contrast runs on a 1D grid".into()));
    }
    let extent = cfg.grid.extents[0];
    let setup = ContrastSetup {
        extent,
        nodes: cfg.grid.nodes[0],
        alpha: cfg.model.alpha,
        amplitude: cfg.initial.amplitude,
        center: cfg.initial.center.unwrap_or(extent / 2.0),
        slopes: cfg.experiment.slopes,
        dt: cfg.stepper.dt,
        horizon: cfg.stepper.horizon,
        h: cfg.experiment.h,
        stride: cfg.stepper.stride,
    };
    let out = lipschitz_contrast(&setup)?;
    let mut runs = Vec::new();
    for run in out.monotone.iter().chain(&out.bistable) {
        let name = format!("seminorms_{}_slope{}.csv", run.catalog, run.slope);
        ctx.out.write_with(&name, |w| write_seminorm_csv(&run.record, w))?;
        runs.push(json!({
            "catalog": run.catalog,
            "slope": run.slope,
            "initial_h": run.initial_h,
            "initial_fine": run.initial_fine,
            "final_h": run.final_h,
            "final_fine": run.final_fine,
        }));
    }
    let gap = out.monotone_relative_gap();
    let ratio = out.bistable_ratio();
    ctx.out.write_json(
        "contrast.json",
        &json!({ "runs": runs, "monotone_relative_gap": gap, "bistable_ratio": ratio }),
    )?;
    Ok(Outcome::ok(format!("monotone relative gap {gap:.3e}, bistable 2dx ratio {ratio:.3}")))
}

pub fn perturb_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let e = &ctx.cfg.experiment;
    let horizons = if e.horizons.is_empty() { vec![100.0, 200.0, 400.0] } else { e.horizons.clone() };
    let longest = horizons.iter().cloned().fold(0.0, f64::max);
    let problem = ForcedOdeProblem::double_well(e.forcing_amplitude, e.forcing_frequency, e.start, longest);
    let reports = reports_over_horizons(&problem, &horizons, e.ode_dt, e.delta)?;
    let check = tv_check(&reports, &TvCheckConfig::default())?;
    ctx.out.write_json("perturbation.json", &check)?;
    ctx.out.write_with("segments.csv", |w| {
        writeln!(w, "horizon,start,end,equilibrium")?;
        for r in &reports {
            for s in &r.segments {
                let label = s.equilibrium.map_or(String::new(), |i| i.to_string());
                writeln!(w, "{},{:.16e},{:.16e},{label}", r.horizon, s.start, s.end)?;
            }
        }
        Ok(())
    })?;
    let summary = format!("C1 {:.4}, C2 {:.4}, out time {:?}", check.c1, check.c2, check.out_time);
    Ok(Outcome {
        check_failed: (!check.pass && !check.regime_exit).then(|| "affine envelope or out-time uniformity failed".into()),
        summary: if check.regime_exit { format!("{summary} (regime exit)") } else { summary },
    })
}

pub fn forest_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let cfg = ctx.cfg;
    let fc = cfg.forest.as_ref().ok_or_else(|| Failure::Validation("forest: section required".into()))?;
    let params = ForestParams {
        seed_production: fc.seed_production,
        seed_loss: fc.seed_loss,
        germination: fc.germination,
        diffusivity: fc.diffusivity,
        maturation: fc.maturation,
        old_mortality: fc.old_mortality,
        young_mortality: Polynomial::new(fc.young_mortality.clone()),
    };
    params.validate()?;
    let grid = cfg.grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let amp = cfg.initial.amplitude;
    let mut field = |mean: f64| -> Vec<f64> {
        random_smooth_field(&grid, &mut rng, cfg.initial.modes.max(1), amp).into_iter().map(|x| mean + x).collect()
    };
    let initial = ForestState { t: 0.0, u: field(fc.mean[0]), v: field(fc.mean[1]), w: field(fc.mean[2]) };
    let cmp = forest_comparison(&params, &grid, &initial, &stepper(cfg), cfg.stepper.horizon)?;
    ctx.out.write_json("forest.json", &cmp)?;
    Ok(Outcome::ok(format!(
        "flux scheme discrepancy {:.3e}, sequential scheme discrepancy {:.3e}",
        cmp.flux_discrepancy, cmp.sequential_discrepancy
    )))
}

pub fn convergence_cmd(ctx: &mut Context) -> Result<Outcome, Failure> {
    let e = &ctx.cfg.experiment;
    let levels = e
        .spatial_nodes
        .iter()
        .map(|&n| {
            let g = Grid::interval(1.0, n)?;
            let dx = g.spacing()[0];
            Ok((g, dx * dx / 4.0))
        })
        .collect::<ecotone::Result<Vec<_>>>()?;
    let temporal_grid = Grid::interval(1.0, e.temporal_nodes)?;
    let report =
        manufactured_convergence(&MmsProblem::heat_only(), &levels, &MmsProblem::coupled(), &temporal_grid, &e.temporal_dts)?;
    ctx.out.write_json("convergence.json", &report)?;
    Ok(Outcome::ok(format!(
        "spatial order {:.3}, temporal order {:.3}",
        report.spatial.order, report.temporal.order
    )))
}
