//! Initial curves: analytic circles and ellipses, seeded random Fourier
//! curves, or a snapshot file.
//!
//! Fourier curves use ChaCha8 seeded with `seed` via `seed_from_u64`, so a
//! given spec yields the same samples on every platform.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::{read_curve, DiscreteClosedCurve};
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;

/// Fourier draws are rejected when the smallest sample spacing falls below
/// this fraction of the mean spacing.
pub const MIN_SPACING_RATIO: f64 = 0.1;

const MAX_DRAWS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialSpec {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Fourier { seed: u64, modes: usize, amp: f64 },
    File(PathBuf),
}

impl fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialSpec::Circle { radius } => write!(f, "circle {radius}"),
            InitialSpec::Ellipse { a, b } => write!(f, "ellipse {a} {b}"),
            InitialSpec::Fourier { seed, modes, amp } => write!(f, "fourier seed={seed} modes={modes} amp={amp}"),
            InitialSpec::File(p) => write!(f, "file {}", p.display()),
        }
    }
}

fn bad(reason: impl Into<String>) -> PelasticaError {
    PelasticaError::invalid("initial", reason)
}

fn positive(token: Option<&str>, what: &str) -> Result<f64> {
    let v: f64 = token
        .ok_or_else(|| bad(format!("missing {what}")))?
        .parse()
        .map_err(|_| bad(format!("{what} is not a number")))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(bad(format!("{what} must be positive")));
    }
    Ok(v)
}

impl FromStr for InitialSpec {
    type Err = PelasticaError;

    /// `circle R`, `ellipse a b`, `fourier seed=S modes=M amp=A`, `file PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| bad("empty generator spec"))?;
        let spec = match kind {
            "circle" => InitialSpec::Circle {
                radius: positive(parts.next(), "radius")?,
            },
            "ellipse" => InitialSpec::Ellipse {
                a: positive(parts.next(), "semi-axis a")?,
                b: positive(parts.next(), "semi-axis b")?,
            },
            "fourier" => {
                let (mut seed, mut modes, mut amp) = (0u64, 3usize, 0.2f64);
                for kv in parts.by_ref() {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
                    match k {
                        "seed" => seed = v.parse().map_err(|_| bad("seed must be a u64"))?,
                        "modes" => modes = v.parse().map_err(|_| bad("modes must be an integer"))?,
                        "amp" => amp = v.parse().map_err(|_| bad("amp must be a number"))?,
                        _ => return Err(bad(format!("unknown fourier key `{k}`"))),
                    }
                }
                if modes == 0 {
                    return Err(bad("modes must be >= 1"));
                }
                if !(amp >= 0.0 && amp.is_finite()) {
                    return Err(bad("amp must be >= 0"));
                }
                InitialSpec::Fourier { seed, modes, amp }
            }
            "file" => {
                let path = parts.next().ok_or_else(|| bad("missing file path"))?;
                InitialSpec::File(PathBuf::from(path))
            }
            other => return Err(bad(format!("unknown generator `{other}`"))),
        };
        if let Some(extra) = parts.next() {
            return Err(bad(format!("unexpected token `{extra}`")));
        }
        Ok(spec)
    }
}

/// Builds the curve on `samples` points in `R^dim`. A file snapshot keeps
/// its own grid and is rejected if it disagrees with `samples` or `dim`.
pub fn generate_initial(spec: &InitialSpec, samples: usize, dim: usize) -> Result<DiscreteClosedCurve> {
    match spec {
        InitialSpec::Circle { radius } => DiscreteClosedCurve::circle(*radius, samples, dim),
        InitialSpec::Ellipse { a, b } => DiscreteClosedCurve::ellipse(*a, *b, samples, dim),
        InitialSpec::Fourier { seed, modes, amp } => fourier_curve(*seed, *modes, *amp, samples, dim),
        InitialSpec::File(path) => {
            let curve = read_curve(&std::fs::read_to_string(path)?)?;
            if curve.samples() != samples || curve.ambient_dim() != dim {
                return Err(PelasticaError::GridMismatch {
                    expected_dim: dim,
                    expected_len: samples,
                    dim: curve.ambient_dim(),
                    len: curve.samples(),
                });
            }
            Ok(curve)
        }
    }
}

/// Unit circle in the first coordinate plane plus `sum_{m=1..modes} (a_m cos + b_m sin)(2 pi m x)`
/// in every coordinate, with `a_m, b_m` uniform in `[-amp, amp] / m^2`.
pub fn fourier_curve(seed: u64, modes: usize, amp: f64, samples: usize, dim: usize) -> Result<DiscreteClosedCurve> {
    if dim < 2 {
        return Err(PelasticaError::BadDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let coeffs: Vec<Vec<(f64, f64)>> = (0..dim)
            .map(|_| {
                (1..=modes)
                    .map(|m| {
                        let s = amp / (m * m) as f64;
                        (s * rng.gen_range(-1.0..=1.0), s * rng.gen_range(-1.0..=1.0))
                    })
                    .collect()
            })
            .collect();
        let points = VectorField::from_fn(dim, samples, |x| {
            let t = std::f64::consts::TAU * x;
            (0..dim)
                .map(|c| {
                    let base = match c {
                        0 => t.cos(),
                        1 => t.sin(),
                        _ => 0.0,
                    };
                    base + coeffs[c]
                        .iter()
                        .enumerate()
                        .map(|(i, (a, b))| {
                            let m = (i + 1) as f64;
                            a * (m * t).cos() + b * (m * t).sin()
                        })
                        .sum::<f64>()
                })
                .collect()
        });
        if let Ok(curve) = DiscreteClosedCurve::new(points) {
            let (min, mean) = curve.spacing();
            if min >= MIN_SPACING_RATIO * mean {
                return Ok(curve);
            }
        }
    }
    Err(bad(format!("no regular fourier curve after {MAX_DRAWS} draws")))
}

/// Random trigonometric field `sum_{m=0..modes} (a_m cos + b_m sin)(2 pi m x) / (1 + m^2)`
/// per component, coefficients uniform in `[-1, 1]`.
pub fn random_smooth_field(rng: &mut impl Rng, dim: usize, samples: usize, modes: usize) -> VectorField {
    let coeffs: Vec<Vec<(f64, f64)>> = (0..dim)
        .map(|_| {
            (0..=modes)
                .map(|m| {
                    let s = 1.0 / (1 + m * m) as f64;
                    (s * rng.gen_range(-1.0..=1.0), s * rng.gen_range(-1.0..=1.0))
                })
                .collect()
        })
        .collect();
    VectorField::from_fn(dim, samples, |x| {
        let t = std::f64::consts::TAU * x;
        coeffs
            .iter()
            .map(|cs| {
                cs.iter()
                    .enumerate()
                    .map(|(m, (a, b))| a * (m as f64 * t).cos() + b * (m as f64 * t).sin())
                    .sum()
            })
            .collect()
    })
}
