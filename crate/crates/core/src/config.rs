//! Flat `key=value` run configuration. Later sources win: defaults, then the
//! config file, then `--set` overrides.

use std::path::PathBuf;

use crate::energy::FlowParams;
use crate::error::{PelasticaError, Result};
use crate::flow::{ContinuationSchedule, FlowControls, FlowMode};
use crate::generate::InitialSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Flow,
    Continuation,
    Gradcheck,
    Check,
    Energy,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Flow => "flow",
            Command::Continuation => "continuation",
            Command::Gradcheck => "gradcheck",
            Command::Check => "check",
            Command::Energy => "energy",
        }
    }
}

pub const KEYS: &[&str] = &[
    "p",
    "delta",
    "epsilon",
    "lambda",
    "N",
    "n",
    "initial",
    "horizon",
    "dt",
    "dt_max",
    "max_steps",
    "tol_stationary",
    "snapshot_stride",
    "degenerate",
    "stages",
    "stage_time",
    "track_regularity",
    "regularity_cap",
    "trials",
    "seed",
    "output_dir",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: FlowParams,
    pub samples: usize,
    pub dim: usize,
    pub initial: InitialSpec,
    pub horizon: f64,
    pub dt: f64,
    pub dt_max: f64,
    pub max_steps: usize,
    pub tol_stationary: f64,
    pub snapshot_stride: usize,
    pub degenerate: bool,
    /// `(epsilon, delta)` per continuation stage.
    pub stages: Vec<(f64, f64)>,
    pub stage_time: f64,
    pub track_regularity: bool,
    pub regularity_cap: f64,
    /// Trials per combination in the monotonicity suite.
    pub trials: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

/// Raw `(key, value)` entries in application order.
#[derive(Clone, Debug, Default)]
pub struct ConfigSource {
    entries: Vec<(String, String)>,
}

impl ConfigSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// Lines of `key = value`; blank lines and `#` comments are skipped.
    pub fn add_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PelasticaError::Parse(format!("config line {}: expected key=value", i + 1)))?;
            self.set(k.trim(), v.trim());
        }
        Ok(())
    }

    /// One `key=value` override.
    pub fn add_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| PelasticaError::Parse(format!("override `{kv}`: expected key=value")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

fn parse<T: std::str::FromStr>(src: &ConfigSource, key: &str, default: T) -> Result<T> {
    match src.get(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| PelasticaError::invalid(key, format!("cannot parse `{v}`"))),
    }
}

fn parse_bool(src: &ConfigSource, key: &str) -> Result<bool> {
    match src.get(key) {
        None => Ok(false),
        Some("true" | "1" | "yes") => Ok(true),
        Some("false" | "0" | "no") => Ok(false),
        Some(v) => Err(PelasticaError::invalid(key, format!("expected a boolean, got `{v}`"))),
    }
}

/// `eps:delta,eps:delta,...`
fn parse_stages(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (e, d) = pair
                .split_once(':')
                .ok_or_else(|| PelasticaError::invalid("stages", format!("expected eps:delta, got `{pair}`")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| PelasticaError::invalid("stages", format!("cannot parse `{s}`")))
            };
            Ok((num(e)?, num(d)?))
        })
        .collect()
}

impl RunConfig {
    /// Validates every key before anything runs; errors name the offending key.
    pub fn resolve(command: Command, src: &ConfigSource) -> Result<Self> {
        if let Some((k, _)) = src.entries.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(PelasticaError::invalid(k.clone(), "unknown key"));
        }
        let lambda = match src.get("lambda") {
            None => return Err(PelasticaError::invalid("lambda", "required (length weight > 0)")),
            Some(_) => parse(src, "lambda", 0.0)?,
        };
        let params = FlowParams::new(
            parse(src, "p", 2.0)?,
            parse(src, "delta", 0.01)?,
            parse(src, "epsilon", 0.01)?,
            lambda,
        )?;
        let samples: usize = parse(src, "N", 256)?;
        if samples < crate::spectral::MIN_SAMPLES {
            return Err(PelasticaError::invalid("N", format!("must be >= {}", crate::spectral::MIN_SAMPLES)));
        }
        let dim: usize = parse(src, "n", 2)?;
        if dim < 2 {
            return Err(PelasticaError::invalid("n", "must be >= 2"));
        }
        let initial: InitialSpec = match src.get("initial") {
            None => InitialSpec::Circle { radius: 1.0 },
            Some(s) => s.parse()?,
        };
        let horizon: f64 = parse(src, "horizon", 10.0)?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(PelasticaError::invalid("horizon", "must be positive and finite"));
        }
        let stages = match src.get("stages") {
            None => vec![(params.epsilon, params.delta)],
            Some(s) => parse_stages(s)?,
        };
        let regularity_cap: f64 = parse(src, "regularity_cap", 1e4)?;
        if !(regularity_cap > 0.0) {
            return Err(PelasticaError::invalid("regularity_cap", "must be positive"));
        }
        let cfg = RunConfig {
            command,
            params,
            samples,
            dim,
            initial,
            horizon,
            dt: parse(src, "dt", 1e-3)?,
            dt_max: parse(src, "dt_max", 0.1)?,
            max_steps: parse(src, "max_steps", 200_000)?,
            tol_stationary: parse(src, "tol_stationary", 1e-5)?,
            snapshot_stride: parse(src, "snapshot_stride", 10)?,
            degenerate: parse_bool(src, "degenerate")?,
            stages,
            stage_time: parse(src, "stage_time", horizon)?,
            track_regularity: parse_bool(src, "track_regularity")?,
            regularity_cap,
            trials: parse(src, "trials", 100_000)?,
            seed: parse(src, "seed", 0)?,
            output_dir: src.get("output_dir").map(PathBuf::from),
        };
        cfg.controls().validate()?;
        // evaluation commands accept eps = 0 and delta = 0 without degenerate mode
        match command {
            Command::Flow => cfg.mode().check(&cfg.params)?,
            Command::Continuation => cfg.schedule().validate(cfg.mode())?,
            _ => {}
        }
        Ok(cfg)
    }

    pub fn mode(&self) -> FlowMode {
        if self.degenerate {
            FlowMode::Degenerate
        } else {
            FlowMode::Regularized
        }
    }

    pub fn controls(&self) -> FlowControls {
        FlowControls {
            dt_initial: self.dt,
            dt_max: self.dt_max,
            max_steps: self.max_steps,
            tol_stationary: self.tol_stationary,
            snapshot_stride: self.snapshot_stride,
            keep_curves: true,
            track_regularity: self.track_regularity,
            mode: self.mode(),
        }
    }

    pub fn schedule(&self) -> ContinuationSchedule {
        ContinuationSchedule {
            stages: self.stages.clone(),
            per_stage_time: self.stage_time,
        }
    }

    /// Flat `key=value` block describing the run.
    pub fn metadata(&self) -> Vec<(String, String)> {
        let stages: Vec<String> = self.stages.iter().map(|(e, d)| format!("{e}:{d}")).collect();
        vec![
            ("command".into(), self.command.name().into()),
            ("p".into(), self.params.p.to_string()),
            ("delta".into(), self.params.delta.to_string()),
            ("epsilon".into(), self.params.epsilon.to_string()),
            ("lambda".into(), self.params.lambda.to_string()),
            ("N".into(), self.samples.to_string()),
            ("n".into(), self.dim.to_string()),
            ("initial".into(), self.initial.to_string()),
            ("horizon".into(), self.horizon.to_string()),
            ("dt".into(), self.dt.to_string()),
            ("dt_max".into(), self.dt_max.to_string()),
            ("tol_stationary".into(), self.tol_stationary.to_string()),
            ("mode".into(), self.mode().label().into()),
            ("stages".into(), stages.join(",")),
            ("stage_time".into(), self.stage_time.to_string()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}
