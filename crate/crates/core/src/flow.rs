//! Time stepping of `d_t gamma = -grad E` with constant-speed resampling
//! after every accepted step, and the `(eps, delta) -> 0` continuation.
//!
//! On a constant-speed curve `d_s = d_x / L`, so the stiff part of the
//! gradient is close to the constant-coefficient operator with symbol
//! `A_k = eps k_s^6 + a k_s^4 + lambda k_s^2`, `k_s = 2 pi k / L`, where
//! `a = (p - 1) max_j (|kappa_j|^2 + delta^2)^((p-2)/2) + 4 eps max_j |kappa_j|^2`
//! bounds the linearized fourth-order coefficient. Each step solves
//! `(I + dt A) dgamma = -dt g` diagonally in Fourier space, with `g` the
//! full nonlinear gradient at the current curve, and is accepted only if the
//! energy drops by at least `||dgamma||^2 / dt`.

use rustfft::num_complex::Complex64;

use crate::curve::DiscreteClosedCurve;
use crate::diagnostics::{besov_norm, uniform_bounds, UniformBounds};
use crate::energy::{energy_from_geometry, EnergyBreakdown, FlowParams};
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::geometry::{build_geometry, GeometryCache, GRADIENT_NORMAL_ORDER};
use crate::gradient::assemble_gradient;
use crate::reparam::reparametrize_constant_speed;
use crate::spectral::{forward, inverse, wavenumber};

/// Relative energy increase tolerated on an accepted step.
pub const TOL_ENERGY_RISE: f64 = 1e-10;

pub const MAX_HALVINGS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlowMode {
    /// Requires `eps > 0` and `delta > 0`.
    #[default]
    Regularized,
    /// Allows `eps = 0` and/or `delta = 0`. Experimental.
    Degenerate,
}

impl FlowMode {
    pub fn check(&self, params: &FlowParams) -> Result<()> {
        params.validate()?;
        if *self == FlowMode::Regularized {
            if params.epsilon == 0.0 {
                return Err(PelasticaError::invalid("epsilon", "zero requires degenerate mode"));
            }
            if params.delta == 0.0 {
                return Err(PelasticaError::invalid("delta", "zero requires degenerate mode"));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self {
            FlowMode::Regularized => "regularized",
            FlowMode::Degenerate => "degenerate (experimental)",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowState {
    pub time: f64,
    pub curve: DiscreteClosedCurve,
    pub energy: EnergyBreakdown,
    /// `||grad E||_{L^2(ds)}`
    pub grad_norm: f64,
    pub dt_last: f64,
    /// `grad E` at `curve`.
    pub residual: VectorField,
}

impl FlowState {
    /// State at time 0 for a curve that is used as given (no resampling).
    pub fn new(curve: DiscreteClosedCurve, params: &FlowParams) -> Result<Self> {
        let geom = build_geometry(&curve, GRADIENT_NORMAL_ORDER)?;
        Self::from_geometry(curve, &geom, params, 0.0, 0.0)
    }

    fn from_geometry(curve: DiscreteClosedCurve, geom: &GeometryCache, params: &FlowParams, time: f64, dt: f64) -> Result<Self> {
        let energy = energy_from_geometry(geom, params)?;
        let grad = assemble_gradient(geom, params)?;
        Ok(Self {
            time,
            grad_norm: grad.l2_norm(geom),
            residual: grad.vectors,
            curve,
            energy,
            dt_last: dt,
        })
    }
}

/// An accepted step.
#[derive(Clone, Debug)]
pub struct StepResult {
    pub state: FlowState,
    /// `dt ||v||^2_{L^2(ds)}` with `v = dgamma / dt` before resampling.
    pub dissipation: f64,
    /// `||dgamma||_{L^2(ds)}` before resampling.
    pub increment_norm: f64,
    pub halvings: usize,
}

/// Weight of `eps max |kappa|^2` in the fourth-order stabilizer; covers the
/// `|kappa|^2 nabla_s^2 kappa` part of `grad F`.
pub const BENDING_STABILIZER: f64 = 4.0;

fn stiff_symbol(params: &FlowParams, geom: &GeometryCache) -> Vec<f64> {
    let n = geom.samples();
    let p = params.p;
    let k2 = geom.curvature.norms_sq();
    let max_k2 = k2.iter().cloned().fold(0.0, f64::max);
    let a = k2
        .into_iter()
        .map(|k2| (k2 + params.delta * params.delta).powf(0.5 * (p - 2.0)))
        .fold(0.0, f64::max)
        * (p - 1.0)
        + BENDING_STABILIZER * params.epsilon * max_k2;
    (0..n)
        .map(|idx| {
            let ks = std::f64::consts::TAU * wavenumber(idx, n) as f64 / geom.length;
            let k2 = ks * ks;
            params.epsilon * k2 * k2 * k2 + a * k2 * k2 + params.lambda * k2
        })
        .collect()
}

/// One linearly implicit step from `state`, halving `dt_request` until the
/// energy drops by at least the step's dissipation `||dgamma||^2 / dt`, up to
/// [`TOL_ENERGY_RISE`] relative. This implies the plain non-increase rule and
/// makes the discrete energy identity hold step by step.
pub fn step(state: &FlowState, params: &FlowParams, dt_request: f64, mode: FlowMode) -> Result<StepResult> {
    mode.check(params)?;
    let geom = build_geometry(&state.curve, GRADIENT_NORMAL_ORDER)?;
    let symbol = stiff_symbol(params, &geom);
    let g_hat: Vec<Vec<Complex64>> = state.residual.components().iter().map(|c| forward(c)).collect();
    let e_old = state.energy.total;
    let slack = TOL_ENERGY_RISE * e_old.abs();
    let mut last_residual = f64::NAN;

    let mut dt = dt_request;
    for halvings in 0..=MAX_HALVINGS {
        if halvings > 0 {
            dt *= 0.5;
        }
        let comps: Vec<Vec<f64>> = g_hat
            .iter()
            .map(|gh| {
                let scaled: Vec<Complex64> = gh
                    .iter()
                    .zip(&symbol)
                    .map(|(c, a)| -dt * c / (1.0 + dt * a))
                    .collect();
                inverse(&scaled)
            })
            .collect();
        let increment = VectorField::from_components(comps)?;
        if !increment.is_finite() {
            continue;
        }
        let Ok(moved) = DiscreteClosedCurve::new(state.curve.points().add(&increment)) else {
            continue;
        };
        let Ok(resampled) = reparametrize_constant_speed(&moved) else {
            continue;
        };
        let Ok(new_geom) = build_geometry(&resampled, GRADIENT_NORMAL_ORDER) else {
            continue;
        };
        let energy = energy_from_geometry(&new_geom, params)?;
        let inc_sq = geom.integrate(&increment.norms_sq());
        last_residual = energy.total - e_old;
        if !(energy.total <= e_old + slack && energy.total + inc_sq / dt <= e_old + slack) {
            continue;
        }
        let new_state = FlowState::from_geometry(resampled, &new_geom, params, state.time + dt, dt)?;
        return Ok(StepResult {
            state: new_state,
            dissipation: inc_sq / dt,
            increment_norm: inc_sq.sqrt(),
            halvings,
        });
    }
    Err(PelasticaError::StepUnderflow {
        time: state.time,
        dt,
        residual: last_residual,
    })
}

#[derive(Clone, Debug)]
pub struct FlowControls {
    pub dt_initial: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    /// Stop once `grad_norm` falls below this.
    pub tol_stationary: f64,
    /// Record every `k`-th accepted step (the initial and final states are always kept).
    pub snapshot_stride: usize,
    /// Keep the curve in each snapshot.
    pub keep_curves: bool,
    /// Evaluate the Besov quantities of the higher-regularity estimate.
    pub track_regularity: bool,
    pub mode: FlowMode,
}

impl Default for FlowControls {
    fn default() -> Self {
        Self {
            dt_initial: 1e-3,
            dt_max: 0.1,
            max_steps: 200_000,
            tol_stationary: 1e-5,
            snapshot_stride: 1,
            keep_curves: true,
            track_regularity: false,
            mode: FlowMode::Regularized,
        }
    }
}

impl FlowControls {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt_initial > 0.0 && self.dt_initial.is_finite()) {
            return Err(PelasticaError::invalid("dt", "must be positive and finite"));
        }
        if !(self.dt_max >= self.dt_initial && self.dt_max.is_finite()) {
            return Err(PelasticaError::invalid("dt_max", "must be finite and >= dt"));
        }
        if !(self.tol_stationary >= 0.0) {
            return Err(PelasticaError::invalid("tol_stationary", "must be >= 0"));
        }
        if self.snapshot_stride == 0 {
            return Err(PelasticaError::invalid("snapshot_stride", "must be >= 1"));
        }
        Ok(())
    }
}

/// Regularity quantities at one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularitySample {
    /// `eps ||d_s^3 gamma||^2_{B^{1/4}_{2,inf}}`
    pub bending_term: f64,
    /// `||kappa||^p_{B^{1/(2p)}_{p,inf}}`
    pub curvature_term: f64,
    /// `(bending_term + curvature_term) / (1 + ||g||_2)`
    pub ratio: f64,
}

fn regularity_sample(geom: &GeometryCache, params: &FlowParams, grad_norm: f64) -> Result<RegularitySample> {
    let b3 = besov_norm(geom.full_deriv(3), 0.25, 2.0, &geom.speed)?;
    let bk = besov_norm(&geom.curvature, 1.0 / (2.0 * params.p), params.p, &geom.speed)?;
    let bending_term = params.epsilon * b3 * b3;
    let curvature_term = bk.powf(params.p);
    Ok(RegularitySample {
        bending_term,
        curvature_term,
        ratio: (bending_term + curvature_term) / (1.0 + grad_norm),
    })
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub time: f64,
    pub dt: f64,
    pub energy: EnergyBreakdown,
    pub grad_norm: f64,
    pub bounds: UniformBounds,
    /// Cumulative dissipation up to `time`.
    pub dissipation: f64,
    pub regularity: Option<RegularitySample>,
    pub curve: Option<DiscreteClosedCurve>,
}

impl Snapshot {
    pub const CSV_HEADER: &'static str =
        "t,dt,bending_reg,p_elastic,length,total,grad_norm,L_lower_bound,L_upper_bound,fenchel_integral";

    pub fn csv_row(&self) -> String {
        use crate::curve::format_float;
        [
            self.time,
            self.dt,
            self.energy.bending_reg,
            self.energy.p_elastic,
            self.energy.length,
            self.energy.total,
            self.grad_norm,
            self.bounds.length_lower,
            self.bounds.length_upper,
            self.bounds.fenchel_integral,
        ]
        .iter()
        .map(|v| format_float(*v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    Horizon,
    Stationary,
    MaxSteps,
    Failed(String),
}

impl Termination {
    pub fn label(&self) -> String {
        match self {
            Termination::Horizon => "horizon".into(),
            Termination::Stationary => "stationary".into(),
            Termination::MaxSteps => "max_steps".into(),
            Termination::Failed(msg) => format!("failed: {msg}"),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::Failed(_))
    }
}

#[derive(Clone, Debug)]
pub struct FlowTrace {
    pub params: FlowParams,
    pub mode: FlowMode,
    pub snapshots: Vec<Snapshot>,
    /// `sum dt ||v||^2_{L^2(ds)}` over accepted steps.
    pub dissipation: f64,
    pub initial_energy: f64,
    pub final_state: FlowState,
    pub termination: Termination,
    pub steps_accepted: usize,
    pub halvings: usize,
    /// Largest `(E_new - E_old) / |E_old|` over accepted steps.
    pub worst_energy_rise: f64,
    /// `int_0^T eps int |d_s^3 gamma|^2 ds dt` (left-point rule over accepted steps).
    pub bending_time_integral: f64,
    /// `int_0^T ||kappa||^p_{B^{1/(2p)}_{p,inf}} dt`, when regularity is tracked.
    pub curvature_besov_integral: Option<f64>,
}

impl FlowTrace {
    pub fn final_time(&self) -> f64 {
        self.final_state.time
    }

    /// `E(gamma_0) - E(gamma_T) - dissipation`, non-negative up to discretization error.
    pub fn dissipation_slack(&self) -> f64 {
        self.initial_energy - self.final_state.energy.total - self.dissipation
    }

    pub fn max_regularity_ratio(&self) -> Option<f64> {
        self.snapshots
            .iter()
            .filter_map(|s| s.regularity.map(|r| r.ratio))
            .reduce(f64::max)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(Snapshot::CSV_HEADER);
        out.push('\n');
        for s in &self.snapshots {
            out.push_str(&s.csv_row());
            out.push('\n');
        }
        out
    }
}

fn snapshot(
    state: &FlowState,
    geom: &GeometryCache,
    params: &FlowParams,
    e0: f64,
    dissipation: f64,
    controls: &FlowControls,
) -> Result<(Snapshot, Option<RegularitySample>)> {
    let regularity = if controls.track_regularity {
        Some(regularity_sample(geom, params, state.grad_norm)?)
    } else {
        None
    };
    Ok((
        Snapshot {
            time: state.time,
            dt: state.dt_last,
            energy: state.energy,
            grad_norm: state.grad_norm,
            bounds: uniform_bounds(geom, params, e0)?,
            dissipation,
            regularity,
            curve: controls.keep_curves.then(|| state.curve.clone()),
        },
        regularity,
    ))
}

/// Runs the flow from `initial` (resampled to constant speed first) until
/// `horizon`, stationarity or `max_steps`. Errors on the initial data are
/// returned as `Err`; a failure during time stepping ends the trace with
/// [`Termination::Failed`].
pub fn run(initial: &DiscreteClosedCurve, params: &FlowParams, horizon: f64, controls: &FlowControls) -> Result<FlowTrace> {
    controls.mode.check(params)?;
    controls.validate()?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(PelasticaError::invalid("horizon", "must be finite and >= 0"));
    }
    let curve = reparametrize_constant_speed(initial)?;
    let mut state = FlowState::new(curve, params)?;
    run_from(&mut state, params, horizon, controls)
}

fn run_from(state: &mut FlowState, params: &FlowParams, horizon: f64, controls: &FlowControls) -> Result<FlowTrace> {
    let e0 = state.energy.total;
    let t0 = state.time;
    let mut geom = build_geometry(&state.curve, GRADIENT_NORMAL_ORDER)?;
    let mut dissipation = 0.0;
    let mut bending_time_integral = 0.0;
    let mut besov_integral = 0.0;
    let (first, mut reg) = snapshot(state, &geom, params, e0, 0.0, controls)?;
    let mut snapshots = vec![first];
    let mut steps = 0usize;
    let mut halvings = 0usize;
    let mut worst_rise = f64::NEG_INFINITY;
    let mut dt = controls.dt_initial;
    let end = t0 + horizon;

    let termination = loop {
        if state.grad_norm < controls.tol_stationary {
            break Termination::Stationary;
        }
        let remaining = end - state.time;
        if remaining <= 1e-12 * end.abs().max(1.0) {
            break Termination::Horizon;
        }
        if steps >= controls.max_steps {
            break Termination::MaxSteps;
        }
        let request = dt.min(remaining);
        let result = match step(state, params, request, controls.mode) {
            Ok(r) => r,
            Err(e) => break Termination::Failed(e.to_string()),
        };
        let taken = result.state.dt_last;
        bending_time_integral += taken * params.epsilon * geom.integrate(&geom.full_deriv(3).norms_sq());
        if let Some(r) = reg {
            besov_integral += taken * r.curvature_term;
        }
        worst_rise = worst_rise.max((result.state.energy.total - state.energy.total) / state.energy.total.abs());
        dissipation += result.dissipation;
        halvings += result.halvings;
        steps += 1;
        *state = result.state;
        geom = build_geometry(&state.curve, GRADIENT_NORMAL_ORDER)?;
        // growth only after a clean step that was not clipped by the horizon
        dt = if result.halvings == 0 && request == dt {
            (2.0 * dt).min(controls.dt_max)
        } else {
            taken
        };

        let done = state.grad_norm < controls.tol_stationary || end - state.time <= 1e-12 * end.abs().max(1.0);
        if steps % controls.snapshot_stride == 0 || done || controls.track_regularity {
            let (snap, r) = snapshot(state, &geom, params, e0, dissipation, controls)?;
            reg = r;
            if steps % controls.snapshot_stride == 0 || done {
                snapshots.push(snap);
            }
        }
    };

    if snapshots.last().map(|s| s.time) != Some(state.time) {
        let (snap, _) = snapshot(state, &geom, params, e0, dissipation, controls)?;
        snapshots.push(snap);
    }

    Ok(FlowTrace {
        params: *params,
        mode: controls.mode,
        snapshots,
        dissipation,
        initial_energy: e0,
        final_state: state.clone(),
        termination,
        steps_accepted: steps,
        halvings,
        worst_energy_rise: worst_rise,
        bending_time_integral,
        curvature_besov_integral: controls.track_regularity.then_some(besov_integral),
    })
}

/// Stages `(eps_k, delta_k)`, non-increasing, each run for `per_stage_time`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationSchedule {
    pub stages: Vec<(f64, f64)>,
    pub per_stage_time: f64,
}

impl ContinuationSchedule {
    /// `eps_k = delta_k = 10^-k`, `k = first..=last`.
    pub fn geometric(first: i32, last: i32, per_stage_time: f64) -> Self {
        Self {
            stages: (first..=last).map(|k| (10f64.powi(-k), 10f64.powi(-k))).collect(),
            per_stage_time,
        }
    }

    pub fn validate(&self, mode: FlowMode) -> Result<()> {
        if self.stages.is_empty() {
            return Err(PelasticaError::invalid("stages", "schedule is empty"));
        }
        if !(self.per_stage_time > 0.0 && self.per_stage_time.is_finite()) {
            return Err(PelasticaError::invalid("stage_time", "must be positive and finite"));
        }
        for (i, &(e, d)) in self.stages.iter().enumerate() {
            if !(e >= 0.0 && d >= 0.0 && e.is_finite() && d.is_finite()) {
                return Err(PelasticaError::invalid("stages", format!("stage {i} has a negative or non-finite entry")));
            }
            if mode == FlowMode::Regularized && (e == 0.0 || d == 0.0) {
                return Err(PelasticaError::invalid("stages", format!("stage {i} is degenerate; enable degenerate mode")));
            }
            if i > 0 {
                let (pe, pd) = self.stages[i - 1];
                if e > pe || d > pd {
                    return Err(PelasticaError::invalid("stages", format!("stage {i} increases epsilon or delta")));
                }
            }
        }
        Ok(())
    }
}

/// Differences between consecutive stage terminal curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageComparison {
    /// `||kappa_k - kappa_{k-1}||_{L^p(dx)}`
    pub kappa_lp: f64,
    /// `max_j |gamma_k - gamma_{k-1}| + max_j |gamma_k' - gamma_{k-1}'|`
    pub gamma_w1inf: f64,
}

/// `eps int int |d_s^3 gamma|^2 ds dt` over a stage against `eps^(1/5) (T + 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastDecay {
    pub epsilon: f64,
    pub bending_integral: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuationResult {
    pub traces: Vec<FlowTrace>,
    /// Entry `k - 1` compares stage `k` with stage `k - 1`.
    pub comparisons: Vec<StageComparison>,
    pub fast_decay: Vec<FastDecay>,
    /// Index and message of the failing stage; later stages are skipped.
    pub failure: Option<(usize, String)>,
}

fn compare(a: &DiscreteClosedCurve, b: &DiscreteClosedCurve, p: f64) -> Result<StageComparison> {
    let ga = build_geometry(a, 0)?;
    let gb = build_geometry(b, 0)?;
    let n = a.samples() as f64;
    let dk = ga.curvature.sub(&gb.curvature);
    let kappa_lp = (dk.norms().iter().map(|v| v.powf(p)).sum::<f64>() / n).powf(1.0 / p);
    let d0 = a.points().sub(b.points()).max_norm();
    let va = crate::curve::differentiate(a, 1)?;
    let vb = crate::curve::differentiate(b, 1)?;
    Ok(StageComparison {
        kappa_lp,
        gamma_w1inf: d0 + va.sub(&vb).max_norm(),
    })
}

/// Runs each stage from the previous stage's terminal curve.
pub fn run_continuation(
    initial: &DiscreteClosedCurve,
    base: &FlowParams,
    schedule: &ContinuationSchedule,
    controls: &FlowControls,
) -> Result<ContinuationResult> {
    schedule.validate(controls.mode)?;
    let mut traces: Vec<FlowTrace> = Vec::new();
    let mut comparisons = Vec::new();
    let mut fast_decay = Vec::new();
    let mut failure = None;
    let mut curve = initial.clone();
    for (k, &(eps, delta)) in schedule.stages.iter().enumerate() {
        let params = base.with_regularization(eps, delta);
        let trace = run(&curve, &params, schedule.per_stage_time, controls)?;
        let terminal = trace.final_state.curve.clone();
        if let Some(prev) = traces.last() {
            comparisons.push(compare(&terminal, &prev.final_state.curve, base.p)?);
        }
        let t = trace.final_time();
        fast_decay.push(FastDecay {
            epsilon: eps,
            bending_integral: trace.bending_time_integral,
            ratio: if eps > 0.0 {
                trace.bending_time_integral / (eps.powf(0.2) * (t + 1.0))
            } else {
                0.0
            },
        });
        let failed = trace.termination.is_failure();
        if let Termination::Failed(msg) = &trace.termination {
            failure = Some((k, msg.clone()));
        }
        traces.push(trace);
        if failed {
            break;
        }
        curve = terminal;
    }
    Ok(ContinuationResult {
        traces,
        comparisons,
        fast_decay,
        failure,
    })
}

/// Mean distance of the samples from their centroid.
pub fn mean_radius(curve: &DiscreteClosedCurve) -> f64 {
    let pts = curve.points();
    let n = pts.len() as f64;
    let centroid: Vec<f64> = pts.components().iter().map(|c| c.iter().sum::<f64>() / n).collect();
    (0..pts.len())
        .map(|j| {
            centroid
                .iter()
                .enumerate()
                .map(|(c, m)| (pts.get(c, j) - m).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .sum::<f64>()
        / n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_rate(r: f64, p: f64, delta: f64, lambda: f64) -> f64 {
        let m = 1.0 / r;
        let w = m * m + delta * delta;
        (w.powf(0.5 * (p - 2.0)) * m * m - w.powf(0.5 * p) / p - lambda) / r
    }

    #[test]
    fn circle_radius_moves_like_scalar_ode() {
        let params = FlowParams::new(2.0, 1e-3, 1e-3, 0.5).unwrap();
        for r0 in [0.7, 1.4] {
            let c = DiscreteClosedCurve::circle(r0, 64, 2).unwrap();
            let state = FlowState::new(c, &params).unwrap();
            let out = step(&state, &params, 1e-3, FlowMode::Regularized).unwrap();
            let dr = mean_radius(&out.state.curve) - r0;
            let rate = circle_rate(r0, 2.0, 1e-3, 0.5);
            assert_eq!(dr.signum(), rate.signum());
            assert!((dr / out.state.dt_last - rate).abs() < 0.05 * rate.abs());
        }
    }

    #[test]
    fn accepted_steps_do_not_raise_energy() {
        let c = DiscreteClosedCurve::ellipse(1.5, 1.0, 64, 2).unwrap();
        let params = FlowParams::new(3.0, 0.1, 0.05, 1.0).unwrap();
        let controls = FlowControls {
            max_steps: 40,
            ..FlowControls::default()
        };
        let trace = run(&c, &params, 10.0, &controls).unwrap();
        assert!(!trace.termination.is_failure());
        assert!(trace.worst_energy_rise <= TOL_ENERGY_RISE);
        for w in trace.snapshots.windows(2) {
            assert!(w[1].energy.total <= w[0].energy.total * (1.0 + TOL_ENERGY_RISE));
        }
        assert!(trace.dissipation_slack() >= -1e-8);
    }

    #[test]
    fn regularized_mode_rejects_zero_epsilon() {
        let c = DiscreteClosedCurve::circle(1.0, 32, 2).unwrap();
        let params = FlowParams::new(2.0, 0.1, 0.0, 1.0).unwrap();
        let err = run(&c, &params, 1.0, &FlowControls::default()).unwrap_err();
        assert!(err.to_string().contains("`epsilon`"));
        let controls = FlowControls {
            mode: FlowMode::Degenerate,
            max_steps: 2,
            ..FlowControls::default()
        };
        assert!(run(&c, &params, 1.0, &controls).is_ok());
    }

    #[test]
    fn schedule_validation() {
        let s = ContinuationSchedule {
            stages: vec![(0.1, 0.1), (0.2, 0.05)],
            per_stage_time: 1.0,
        };
        assert!(s.validate(FlowMode::Regularized).is_err());
        let s = ContinuationSchedule {
            stages: vec![(0.1, 0.1), (0.0, 0.0)],
            per_stage_time: 1.0,
        };
        assert!(s.validate(FlowMode::Regularized).is_err());
        assert!(s.validate(FlowMode::Degenerate).is_ok());
        assert_eq!(ContinuationSchedule::geometric(1, 3, 2.0).stages.len(), 3);
    }

    #[test]
    fn single_stage_continuation_equals_run() {
        let c = DiscreteClosedCurve::ellipse(1.3, 1.0, 32, 2).unwrap();
        let params = FlowParams::new(2.0, 0.1, 0.1, 1.0).unwrap();
        let controls = FlowControls {
            max_steps: 10,
            ..FlowControls::default()
        };
        let schedule = ContinuationSchedule {
            stages: vec![(0.1, 0.1)],
            per_stage_time: 1.0,
        };
        let cont = run_continuation(&c, &params, &schedule, &controls).unwrap();
        let direct = run(&c, &params, 1.0, &controls).unwrap();
        assert_eq!(cont.traces.len(), 1);
        assert_eq!(cont.traces[0].final_state.curve, direct.final_state.curve);
        assert!(cont.comparisons.is_empty());
    }
}
