use crate::diagnostics::functional::{diagnose, energy_dissipation_rate, DiagnosticSample};
use crate::diagnostics::norms::{norm, Norm};
use crate::dynamics::operators::laplacian_into;
use crate::dynamics::stepper::{Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::model::{FieldState, SystemParams};
use crate::scalar::{from_usize, lit, Real};

/// What to record besides the standard diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Probes<T> {
    /// Separations at which the Lipschitz seminorm of `v` and `∂ₜv` is sampled.
    pub seminorm_h: Vec<T>,
    /// Nodes whose time series and running integrals are recorded.
    pub nodes: Vec<usize>,
    pub keep_snapshots: bool,
}

/// Per-node values at a sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSample<T> {
    pub node: usize,
    pub v: T,
    pub vt: T,
    pub vtt: T,
    pub wt: T,
    /// `∫₀ᵗ |∂ₜ²v|`, `∫₀ᵗ |∂ₜv|`, `∫₀ᵗ |∂ₜw|` at this node.
    pub int_abs_vtt: T,
    pub int_abs_vt: T,
    pub int_abs_wt: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample<T> {
    pub diagnostics: DiagnosticSample<T>,
    /// `∫₀ᵗ ‖∂ₜv‖² + ‖∂ₜw‖²`.
    pub diss_l2: T,
    /// `∫₀ᵗ ‖∂ₜ²v‖_{L¹} + ‖∂ₜv‖_{L¹} + ‖∂ₜw‖_{L¹}`.
    pub diss_l1: T,
    /// Instantaneous decay rate of the Lyapunov functional.
    pub energy_rate: Option<T>,
    /// Running time integral of `energy_rate`.
    pub energy_dissipated: T,
    /// `e^{−σt}‖∂ₜw(0)‖_{L¹} + κ∫₀ᵗ e^{−σ(t−s)}‖∂ₜv(s)‖_{L¹} ds`, the bound
    /// that `‖∂ₜw(t)‖_{L¹}` obeys in the continuum.
    pub kato_bound: T,
    pub nodes: Vec<NodeSample<T>>,
}

impl<T: Real> TrajectorySample<T> {
    pub fn t(&self) -> T {
        self.diagnostics.t
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T> {
    pub dt: T,
    pub alpha: T,
    pub samples: Vec<TrajectorySample<T>>,
    pub snapshots: Vec<FieldState<T>>,
    pub final_state: FieldState<T>,
    /// Set when the run stopped early; samples up to the failure are kept.
    pub failure: Option<Error>,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t()).collect()
    }

    pub fn last(&self) -> &TrajectorySample<T> {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    /// Index of the sample closest to time `t`.
    pub fn sample_index_at(&self, t: T) -> usize {
        let mut best = 0;
        for (k, s) in self.samples.iter().enumerate() {
            if (s.t() - t).abs() < (self.samples[best].t() - t).abs() {
                best = k;
            }
        }
        best
    }

    /// Turns a partial run into an error.
    pub fn into_complete(self) -> Result<Self> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

/// Per-step scalar integrands accumulated by the trapezoidal rule.
#[derive(Clone, Copy)]
struct Integrands<T> {
    l2: T,
    l1: T,
    rate: T,
    l1_vt: T,
}

struct Accumulator<T> {
    nodes: Vec<usize>,
    int_vtt: Vec<T>,
    int_vt: Vec<T>,
    int_wt: Vec<T>,
    prev_node: Vec<[T; 3]>,
    prev: Integrands<T>,
    diss_l2: T,
    diss_l1: T,
    energy: T,
    kato: T,
    /// `(e^{−σ dt}, κ)`.
    kato_coeffs: (T, T),
}

impl<T: Real> Accumulator<T> {
    fn new(
        nodes: &[usize],
        first: Integrands<T>,
        vtt: &[T],
        vt: &[T],
        wt: &[T],
        kato0: T,
        kato_coeffs: (T, T),
    ) -> Self {
        Self {
            nodes: nodes.to_vec(),
            int_vtt: vec![T::zero(); nodes.len()],
            int_vt: vec![T::zero(); nodes.len()],
            int_wt: vec![T::zero(); nodes.len()],
            prev_node: nodes.iter().map(|&k| [vtt[k].abs(), vt[k].abs(), wt[k].abs()]).collect(),
            prev: first,
            diss_l2: T::zero(),
            diss_l1: T::zero(),
            energy: T::zero(),
            kato: kato0,
            kato_coeffs,
        }
    }

    fn push(&mut self, dt: T, next: Integrands<T>, vtt: &[T], vt: &[T], wt: &[T]) {
        let half = dt * lit(0.5);
        self.diss_l2 += half * (self.prev.l2 + next.l2);
        self.diss_l1 += half * (self.prev.l1 + next.l1);
        self.energy += half * (self.prev.rate + next.rate);
        let (decay, gain) = self.kato_coeffs;
        self.kato = decay * self.kato + gain * half * (decay * self.prev.l1_vt + next.l1_vt);
        self.prev = next;
        for (p, &k) in self.nodes.iter().enumerate() {
            let cur = [vtt[k].abs(), vt[k].abs(), wt[k].abs()];
            self.int_vtt[p] += half * (self.prev_node[p][0] + cur[0]);
            self.int_vt[p] += half * (self.prev_node[p][1] + cur[1]);
            self.int_wt[p] += half * (self.prev_node[p][2] + cur[2]);
            self.prev_node[p] = cur;
        }
    }
}

fn integrands<T: Real>(params: &SystemParams<T>, state: &FieldState<T>, vtt: &[T], wt: &[T]) -> Integrands<T> {
    let g = &params.grid;
    let vt = &state.vt;
    let l1_vt = norm(vt, g, Norm::L1);
    Integrands {
        l2: g.inner(vt, vt) + g.inner(wt, wt),
        l1: norm(vtt, g, Norm::L1) + l1_vt + norm(wt, g, Norm::L1),
        rate: energy_dissipation_rate(state, wt, params),
        l1_vt,
    }
}

/// Continuous-time rates `∂ₜ²v` and `∂ₜw` evaluated from the equations.
pub fn instantaneous_rates<T: Real>(state: &FieldState<T>, params: &SystemParams<T>) -> (Vec<T>, Vec<T>) {
    let nl = &params.nonlinearity;
    let vtt = state
        .v
        .iter()
        .zip(&state.vt)
        .zip(&state.w)
        .map(|((&v, &vt), &w)| params.alpha * w - (nl.f)(v) - (nl.phi)(v) * vt)
        .collect();
    let mut lap = vec![T::zero(); state.w.len()];
    laplacian_into(&params.grid, &state.w, &mut lap);
    let h = params.heat;
    let wt = lap
        .iter()
        .zip(&state.w)
        .zip(&state.v)
        .map(|((&l, &w), &v)| h.diffusivity * l - h.decay * w + h.source_gain * v)
        .collect();
    (vtt, wt)
}

/// Integrates from `initial` up to `horizon`, sampling diagnostics every
/// `cfg.snapshot_stride` steps and at the final time. `∂ₜ²v` and `∂ₜw` are
/// the scheme's own increments divided by `dt`; at the initial time they
/// come from the equations.
pub fn simulate<T: Real>(
    initial: &FieldState<T>,
    params: &SystemParams<T>,
    cfg: &StepperConfig<T>,
    horizon: T,
    probes: &Probes<T>,
) -> Result<TrajectoryRecord<T>> {
    if !(horizon > T::zero()) {
        return Err(Error::Config(format!("horizon must be positive, got {horizon}")));
    }
    initial.validate(&params.grid)?;
    if let Some(&bad) = probes.nodes.iter().find(|&&k| k >= params.grid.node_count()) {
        return Err(Error::Config(format!("probe node {bad} outside grid")));
    }
    let stepper = Stepper::new(params, cfg)?;
    let dt = cfg.dt;
    let steps = (horizon / dt).round().to_usize().unwrap_or(0).max(1);
    let t0 = initial.t;

    let (vtt0, wt0) = instantaneous_rates(initial, params);
    let kato_coeffs = ((-params.heat.decay * dt).exp(), params.heat.source_gain);
    let mut acc = Accumulator::new(
        &probes.nodes,
        integrands(params, initial, &vtt0, &wt0),
        &vtt0,
        &initial.vt,
        &wt0,
        norm(&wt0, &params.grid, Norm::L1),
        kato_coeffs,
    );

    let make_sample = |state: &FieldState<T>, vtt: &[T], wt: &[T], acc: &Accumulator<T>| -> Result<TrajectorySample<T>> {
        let diagnostics = diagnose(state, wt, vtt, params, &probes.seminorm_h)?;
        let nodes = acc
            .nodes
            .iter()
            .enumerate()
            .map(|(p, &k)| NodeSample {
                node: k,
                v: state.v[k],
                vt: state.vt[k],
                vtt: vtt[k],
                wt: wt[k],
                int_abs_vtt: acc.int_vtt[p],
                int_abs_vt: acc.int_vt[p],
                int_abs_wt: acc.int_wt[p],
            })
            .collect();
        Ok(TrajectorySample {
            diagnostics,
            diss_l2: acc.diss_l2,
            diss_l1: acc.diss_l1,
            energy_rate: Some(energy_dissipation_rate(state, wt, params)),
            energy_dissipated: acc.energy,
            kato_bound: acc.kato,
            nodes,
        })
    };

    let mut record = TrajectoryRecord {
        dt,
        alpha: params.alpha,
        samples: vec![make_sample(initial, &vtt0, &wt0, &acc)?],
        snapshots: if probes.keep_snapshots { vec![initial.clone()] } else { Vec::new() },
        final_state: initial.clone(),
        failure: None,
    };

    let mut state = initial.clone();
    let mut vtt = vec![T::zero(); state.v.len()];
    let mut wt = vec![T::zero(); state.v.len()];
    let inv_dt = T::one() / dt;
    for n in 1..=steps {
        let prev_vt = state.vt.clone();
        let prev_w = state.w.clone();
        if let Err(e) = stepper.advance(&mut state, None, None) {
            record.failure = Some(e);
            return Ok(record);
        }
        state.t = t0 + from_usize::<T>(n) * dt;
        for k in 0..state.v.len() {
            vtt[k] = (state.vt[k] - prev_vt[k]) * inv_dt;
            wt[k] = (state.w[k] - prev_w[k]) * inv_dt;
        }
        acc.push(dt, integrands(params, &state, &vtt, &wt), &vtt, &state.vt, &wt);
        if n % cfg.snapshot_stride == 0 || n == steps {
            record.samples.push(make_sample(&state, &vtt, &wt, &acc)?);
            if probes.keep_snapshots {
                record.snapshots.push(state.clone());
            }
        }
        record.final_state = state.clone();
    }
    Ok(record)
}
