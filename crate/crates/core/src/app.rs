//! Command dispatch behind the `pelastica` binary.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::curve::{format_float, write_curve, DiscreteClosedCurve};
use crate::diagnostics::{
    fd_gradient_oracle, higher_regularity_check, interpolation_check, monotonicity_property_test, richardson_step,
    CheckRow,
    DiagnosticsReport,
};
use crate::energy::{evaluate_energy, FlowParams};
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::flow::{mean_radius, run, run_continuation, FlowTrace};
use crate::generate::{fourier_curve, generate_initial, random_smooth_field};
use crate::geometry::build_geometry;
use crate::gradient::assemble_gradient;
use crate::output::{metadata_block, OutputDir};
use crate::variation::{delta_ep_from, delta_f_from, delta_length_from, VariationField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    CheckFailure = 1,
    SolverFailure = 2,
    ConfigError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Relative error bound of the gradient check suite.
pub const GRADCHECK_TOL: f64 = 1e-4;

/// Cap on the interpolation ratio in the check suite.
pub const INTERPOLATION_CAP: f64 = 2.0;

/// Triples `(i, k, q)` of the interpolation suite.
pub const INTERPOLATION_TRIPLES: [(usize, usize, f64); 4] = [(1, 2, 2.0), (1, 3, 2.0), (2, 3, 2.0), (1, 2, 4.0)];

struct Printer<'a> {
    out: &'a mut dyn Write,
    quiet: bool,
}

impl Printer<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        if !self.quiet {
            let _ = writeln!(self.out, "{}", s.as_ref());
        }
    }

    /// Printed even in quiet mode.
    fn result(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }
}

/// Runs one command; stdout-style text goes to `out`. Errors in setting up
/// the initial curve map to [`ExitStatus::ConfigError`], later errors to
/// [`ExitStatus::SolverFailure`].
pub fn execute(cfg: &RunConfig, out: &mut dyn Write, quiet: bool) -> (ExitStatus, Option<PelasticaError>) {
    let mut pr = Printer { out, quiet };
    let needs_curve = !matches!(cfg.command, Command::Gradcheck);
    let initial = if needs_curve {
        match generate_initial(&cfg.initial, cfg.samples, cfg.dim) {
            Ok(c) => Some(c),
            Err(e) => return (ExitStatus::ConfigError, Some(e)),
        }
    } else {
        None
    };
    let outdir = match cfg.output_dir.as_ref().map(OutputDir::create).transpose() {
        Ok(d) => d,
        Err(e) => return (ExitStatus::ConfigError, Some(e)),
    };
    let result = match cfg.command {
        Command::Energy => cmd_energy(cfg, initial.as_ref().expect("curve"), outdir.as_ref(), &mut pr),
        Command::Flow => cmd_flow(cfg, initial.as_ref().expect("curve"), outdir.as_ref(), &mut pr),
        Command::Continuation => cmd_continuation(cfg, initial.as_ref().expect("curve"), outdir.as_ref(), &mut pr),
        Command::Gradcheck => cmd_gradcheck(cfg, outdir.as_ref(), &mut pr),
        Command::Check => cmd_check(cfg, initial.as_ref().expect("curve"), outdir.as_ref(), &mut pr),
    };
    match result {
        Ok(status) => (status, None),
        Err(e) => (ExitStatus::SolverFailure, Some(e)),
    }
}

fn cmd_energy(cfg: &RunConfig, curve: &DiscreteClosedCurve, outdir: Option<&OutputDir>, pr: &mut Printer) -> Result<ExitStatus> {
    let e = evaluate_energy(curve, &cfg.params)?;
    pr.result(format!("bending_reg = {}", format_float(e.bending_reg)));
    pr.result(format!("p_elastic   = {}", format_float(e.p_elastic)));
    pr.result(format!("length      = {}", format_float(e.length)));
    pr.result(format!("total       = {}", format_float(e.total)));
    if let Some(dir) = outdir {
        let csv = format!("{}\n{}\n", crate::energy::EnergyBreakdown::CSV_HEADER, e.csv_row(0.0));
        dir.write("energy.csv", &csv)?;
        dir.write("metadata.txt", &metadata_block(&cfg.metadata()))?;
    }
    Ok(ExitStatus::Success)
}

/// Per-snapshot bound rows plus energy-decay and dissipation rows.
pub fn trace_report(trace: &FlowTrace, regularity_cap: Option<f64>) -> DiagnosticsReport {
    let p = &trace.params;
    let mut report = DiagnosticsReport::new()
        .with_context("p", p.p)
        .with_context("delta", p.delta)
        .with_context("epsilon", p.epsilon)
        .with_context("lambda", p.lambda)
        .with_context("mode", trace.mode.label())
        .with_context("final_time", trace.final_time());
    for s in &trace.snapshots {
        for mut row in s.bounds.rows() {
            row.name = format!("{}@t={}", row.name, format_float(s.time));
            report.push(row);
        }
        if let (Some(cap), Some(r)) = (regularity_cap, s.regularity) {
            report.push(CheckRow::new(format!("higher_regularity_ratio@t={}", format_float(s.time)), r.ratio, cap, 0.0));
        }
    }
    report.push(CheckRow::new(
        "energy_rise",
        trace.worst_energy_rise.max(0.0),
        crate::flow::TOL_ENERGY_RISE,
        0.0,
    ));
    report.push(CheckRow::new(
        "dissipation",
        trace.dissipation,
        trace.initial_energy - trace.final_state.energy.total,
        1e-8,
    ));
    report
}

fn trace_metadata(cfg: &RunConfig, trace: &FlowTrace) -> Vec<(String, String)> {
    let mut meta = cfg.metadata();
    meta.push(("termination".into(), trace.termination.label()));
    meta.push(("final_time".into(), format_float(trace.final_time())));
    meta.push(("steps_accepted".into(), trace.steps_accepted.to_string()));
    meta.push(("halvings".into(), trace.halvings.to_string()));
    meta.push(("initial_energy".into(), format_float(trace.initial_energy)));
    meta.push(("final_energy".into(), format_float(trace.final_state.energy.total)));
    meta.push(("final_grad_norm".into(), format_float(trace.final_state.grad_norm)));
    meta.push(("dissipation".into(), format_float(trace.dissipation)));
    meta.push(("bending_time_integral".into(), format_float(trace.bending_time_integral)));
    if let Some(v) = trace.curvature_besov_integral {
        meta.push(("curvature_besov_integral".into(), format_float(v)));
    }
    meta
}

fn write_trace(dir: &OutputDir, prefix: &str, trace: &FlowTrace, report: &DiagnosticsReport) -> Result<()> {
    dir.write(&format!("{prefix}trace.csv"), &trace.csv())?;
    dir.write(&format!("{prefix}diagnostics.csv"), &report.to_csv())?;
    for (i, s) in trace.snapshots.iter().enumerate() {
        if let Some(c) = &s.curve {
            dir.write(&format!("{prefix}snapshots/curve_{i:05}.txt"), &write_curve(c))?;
        }
    }
    Ok(())
}

fn status_of(trace: &FlowTrace, report: &DiagnosticsReport) -> ExitStatus {
    if trace.termination.is_failure() {
        ExitStatus::SolverFailure
    } else if !report.all_pass() {
        ExitStatus::CheckFailure
    } else {
        ExitStatus::Success
    }
}

fn cmd_flow(cfg: &RunConfig, curve: &DiscreteClosedCurve, outdir: Option<&OutputDir>, pr: &mut Printer) -> Result<ExitStatus> {
    pr.line(format!("flow: {} ({}), horizon {}", cfg.initial, cfg.mode().label(), cfg.horizon));
    let trace = run(curve, &cfg.params, cfg.horizon, &cfg.controls())?;
    let report = trace_report(&trace, cfg.track_regularity.then_some(cfg.regularity_cap));
    if let Some(dir) = outdir {
        write_trace(dir, "", &trace, &report)?;
        dir.write("metadata.txt", &metadata_block(&trace_metadata(cfg, &trace)))?;
    }
    pr.result(format!(
        "termination={} t={} steps={} E={} grad_norm={} radius={}",
        trace.termination.label(),
        format_float(trace.final_time()),
        trace.steps_accepted,
        format_float(trace.final_state.energy.total),
        format_float(trace.final_state.grad_norm),
        format_float(mean_radius(&trace.final_state.curve)),
    ));
    for row in report.failures() {
        pr.result(format!("FAIL {} lhs={} rhs={}", row.name, format_float(row.lhs), format_float(row.rhs)));
    }
    Ok(status_of(&trace, &report))
}

fn cmd_continuation(cfg: &RunConfig, curve: &DiscreteClosedCurve, outdir: Option<&OutputDir>, pr: &mut Printer) -> Result<ExitStatus> {
    let res = run_continuation(curve, &cfg.params, &cfg.schedule(), &cfg.controls())?;
    let mut status = ExitStatus::Success;
    let mut summary = String::from(
        "stage,epsilon,delta,termination,final_time,total,grad_norm,radius,kappa_lp_change,gamma_w1inf_change,bending_integral,fast_decay_ratio\n",
    );
    for (k, trace) in res.traces.iter().enumerate() {
        let report = trace_report(trace, cfg.track_regularity.then_some(cfg.regularity_cap));
        let s = status_of(trace, &report);
        if s != ExitStatus::Success && status != ExitStatus::SolverFailure {
            status = s;
        }
        let (dk, dg) = match k.checked_sub(1).map(|i| res.comparisons[i]) {
            Some(c) => (format_float(c.kappa_lp), format_float(c.gamma_w1inf)),
            None => (String::new(), String::new()),
        };
        let fd = res.fast_decay[k];
        summary.push_str(&format!(
            "{k},{},{},{},{},{},{},{},{dk},{dg},{},{}\n",
            trace.params.epsilon,
            trace.params.delta,
            trace.termination.label(),
            format_float(trace.final_time()),
            format_float(trace.final_state.energy.total),
            format_float(trace.final_state.grad_norm),
            format_float(mean_radius(&trace.final_state.curve)),
            format_float(fd.bending_integral),
            format_float(fd.ratio),
        ));
        pr.line(format!(
            "stage {k}: eps={} delta={} {} grad_norm={} radius={}",
            trace.params.epsilon,
            trace.params.delta,
            trace.termination.label(),
            format_float(trace.final_state.grad_norm),
            format_float(mean_radius(&trace.final_state.curve)),
        ));
        if let Some(dir) = outdir {
            write_trace(dir, &format!("stage{k:02}_"), trace, &report)?;
        }
    }
    if let Some(dir) = outdir {
        dir.write("continuation.csv", &summary)?;
        let mut meta = cfg.metadata();
        meta.push(("stages_run".into(), res.traces.len().to_string()));
        if let Some((k, msg)) = &res.failure {
            meta.push(("failure".into(), format!("stage {k}: {msg}")));
        }
        dir.write("metadata.txt", &metadata_block(&meta))?;
    }
    if let Some(last) = res.traces.last() {
        pr.result(format!(
            "stages={} final radius={} grad_norm={}",
            res.traces.len(),
            format_float(mean_radius(&last.final_state.curve)),
            format_float(last.final_state.grad_norm)
        ));
    }
    Ok(status)
}

/// One line of the gradient check table.
#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckRow {
    pub curve: usize,
    pub dim: usize,
    pub params: FlowParams,
    /// `gradient` (normal V, pairing with the assembled gradient) or `variation`
    /// (arbitrary V, summed first variations).
    pub kind: &'static str,
    pub value: f64,
    pub fd: f64,
    pub rel_err: f64,
}

/// Seeded Fourier curves, `p in {2,3,4}`, `delta in {0.1,1}`, `eps in {0,0.1}`,
/// `fields` random fields per combination and kind.
pub fn gradient_check_suite(seed: u64, curves: usize, fields: usize, samples: usize, lambda: f64) -> Result<Vec<GradcheckRow>> {
    let jobs: Vec<(usize, f64, f64, f64)> = (0..curves)
        .flat_map(|c| {
            [2.0, 3.0, 4.0].into_iter().flat_map(move |p| {
                [0.1, 1.0]
                    .into_iter()
                    .flat_map(move |d| [0.0, 0.1].into_iter().map(move |e| (c, p, d, e)))
            })
        })
        .collect();
    let per_job: Vec<Result<Vec<GradcheckRow>>> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(c, p, delta, eps))| {
            let dim = 2 + c % 2;
            let curve = fourier_curve(seed.wrapping_add(c as u64), 4, 0.2, samples, dim)?;
            let params = FlowParams::new(p, delta, eps, lambda)?;
            let geom = build_geometry(&curve, 4)?;
            let grad = assemble_gradient(&geom, &params)?;
            let step = richardson_step(&curve);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            rng.set_stream(j as u64);
            let mut rows = Vec::new();
            for _ in 0..fields {
                let raw = random_smooth_field(&mut rng, dim, samples, 4);
                let normal = VariationField::new(raw.normal_part(&geom.tangent));
                let value = geom.l2_inner(&grad.vectors, &normal.vectors);
                let fd = fd_gradient_oracle(&curve, &params, &normal, Some(step), true)?;
                rows.push(GradcheckRow {
                    curve: c,
                    dim,
                    params,
                    kind: "gradient",
                    value,
                    fd,
                    rel_err: (value - fd).abs() / (1.0 + fd.abs()),
                });
                let v = VariationField::new(raw);
                let value = params.epsilon * delta_f_from(&geom, &v)?
                    + delta_ep_from(&geom, &v, p, delta)?
                    + lambda * delta_length_from(&geom, &v)?;
                let fd = fd_gradient_oracle(&curve, &params, &v, Some(step), true)?;
                rows.push(GradcheckRow {
                    curve: c,
                    dim,
                    params,
                    kind: "variation",
                    value,
                    fd,
                    rel_err: (value - fd).abs() / (1.0 + fd.abs()),
                });
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }
    Ok(rows)
}

fn cmd_gradcheck(cfg: &RunConfig, outdir: Option<&OutputDir>, pr: &mut Printer) -> Result<ExitStatus> {
    let rows = gradient_check_suite(cfg.seed, 3, 2, cfg.samples, cfg.params.lambda)?;
    let mut csv = String::from("curve,n,p,delta,epsilon,kind,value,fd,rel_err\n");
    pr.line(format!("{:>5} {:>2} {:>4} {:>5} {:>5} {:>9} {:>12}", "curve", "n", "p", "delta", "eps", "kind", "rel_err"));
    for r in &rows {
        pr.line(format!(
            "{:>5} {:>2} {:>4} {:>5} {:>5} {:>9} {:>12.3e}",
            r.curve, r.dim, r.params.p, r.params.delta, r.params.epsilon, r.kind, r.rel_err
        ));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.curve,
            r.dim,
            r.params.p,
            r.params.delta,
            r.params.epsilon,
            r.kind,
            format_float(r.value),
            format_float(r.fd),
            format_float(r.rel_err)
        ));
    }
    let worst = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let pass = worst <= GRADCHECK_TOL;
    pr.result(format!(
        "gradcheck: {} rows, worst relative error {worst:.3e} (bound {GRADCHECK_TOL:e}) {}",
        rows.len(),
        if pass { "PASS" } else { "FAIL" }
    ));
    if let Some(dir) = outdir {
        dir.write("gradcheck.csv", &csv)?;
        dir.write("metadata.txt", &metadata_block(&cfg.metadata()))?;
    }
    Ok(if pass { ExitStatus::Success } else { ExitStatus::CheckFailure })
}

/// Monotonicity, interpolation, bound and regularity rows for `curve`.
/// Suites run in parallel; rows come back in a fixed order.
pub fn check_suite(cfg: &RunConfig, curve: &DiscreteClosedCurve) -> Result<DiagnosticsReport> {
    let params = cfg.params;
    let seed = cfg.seed;
    let trials = cfg.trials;
    let (samples, dim, cap) = (cfg.samples, cfg.dim, cfg.regularity_cap);

    let suites: Vec<Box<dyn Fn() -> Result<Vec<CheckRow>> + Sync>> = vec![
        Box::new(move || {
            let combos: Vec<(f64, f64, usize)> = [2.0, 2.5, 3.0, 4.0]
                .into_iter()
                .flat_map(|p| [0.0, 0.1, 1.0].into_iter().flat_map(move |d| [2, 3, 5].into_iter().map(move |n| (p, d, n))))
                .collect();
            combos
                .iter()
                .enumerate()
                .map(|(i, &(p, d, n))| Ok(monotonicity_property_test(p, d, n, trials, seed.wrapping_add(i as u64))?.row()))
                .collect()
        }),
        Box::new(move || {
            let mut rows = Vec::new();
            for c in 0..10u64 {
                let curve = fourier_curve(seed.wrapping_add(1000 + c), 4, 0.3, samples, dim)?;
                for &(i, k, q) in &INTERPOLATION_TRIPLES {
                    let r = interpolation_check(&curve, i, k, q)?;
                    let mut row = r.row(INTERPOLATION_CAP);
                    row.name = format!("{}@curve{c}", row.name);
                    rows.push(row);
                    for sigma in [0.1, 10.0] {
                        let s = interpolation_check(&curve.scaled(sigma)?, i, k, q)?;
                        rows.push(CheckRow::new(
                            format!("interpolation_scale_i{i}_k{k}_q{q}_s{sigma}@curve{c}"),
                            (s.ratio - r.ratio).abs() / r.ratio.max(f64::MIN_POSITIVE),
                            0.0,
                            1e-6,
                        ));
                    }
                }
            }
            Ok(rows)
        }),
        Box::new(move || {
            let e0 = evaluate_energy(curve, &params)?.total;
            let geom = build_geometry(curve, 4)?;
            let mut rows = crate::diagnostics::uniform_bounds(&geom, &params, e0)?.rows();
            let g = assemble_gradient(&geom, &params).map(|g| g.vectors).unwrap_or_else(|_| VectorField::zeros(dim, samples));
            rows.push(higher_regularity_check(curve, &params, &g)?.row(cap));
            Ok(rows)
        }),
    ];
    let results: Vec<Result<Vec<CheckRow>>> = suites.par_iter().map(|f| f()).collect();
    let mut report = DiagnosticsReport::new()
        .with_context("p", params.p)
        .with_context("delta", params.delta)
        .with_context("epsilon", params.epsilon)
        .with_context("lambda", params.lambda)
        .with_context("curve", &cfg.initial)
        .with_context("seed", seed)
        .with_context("interpolation_cap", INTERPOLATION_CAP)
        .with_context("regularity_cap", cap);
    for r in results {
        report.extend(r?);
    }
    Ok(report)
}

fn cmd_check(cfg: &RunConfig, curve: &DiscreteClosedCurve, outdir: Option<&OutputDir>, pr: &mut Printer) -> Result<ExitStatus> {
    let report = check_suite(cfg, curve)?;
    if let Some(dir) = outdir {
        dir.write("diagnostics.csv", &report.to_csv())?;
        dir.write("metadata.txt", &metadata_block(&cfg.metadata()))?;
    }
    for row in &report.checks {
        if !row.pass {
            pr.result(format!("FAIL {} lhs={} rhs={}", row.name, format_float(row.lhs), format_float(row.rhs)));
        }
    }
    let failed = report.failures().count();
    pr.result(format!("check: {} rows, {failed} failed", report.checks.len()));
    Ok(if failed == 0 { ExitStatus::Success } else { ExitStatus::CheckFailure })
}

