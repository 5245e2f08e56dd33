//! Discretely sampled closed curves `R/Z -> R^n` and their text snapshot format.

use std::fmt::Write as _;

use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::spectral::{self, Backend, MIN_SAMPLES};

/// `N` samples of a closed regular curve on the grid `x_j = j/N`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteClosedCurve {
    points: VectorField,
}

impl DiscreteClosedCurve {
    pub fn new(points: VectorField) -> Result<Self> {
        if points.dim() < 2 {
            return Err(PelasticaError::BadDimension(points.dim()));
        }
        if points.len() < MIN_SAMPLES {
            return Err(PelasticaError::TooFewSamples {
                got: points.len(),
                min: MIN_SAMPLES,
            });
        }
        let curve = Self { points };
        if let Some(index) = curve.first_irregular() {
            return Err(PelasticaError::NotRegular { index });
        }
        Ok(curve)
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        Self::new(VectorField::from_points(points)?)
    }

    /// Samples a parametrized closed curve `f: [0,1) -> R^n`.
    pub fn sample(dim: usize, samples: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        Self::new(VectorField::from_fn(dim, samples, f))
    }

    /// Circle of the given radius in the `(e_1, e_2)` plane of `R^dim`.
    pub fn circle(radius: f64, samples: usize, dim: usize) -> Result<Self> {
        Self::sample(dim, samples, |x| {
            let mut p = vec![0.0; dim];
            p[0] = radius * (std::f64::consts::TAU * x).cos();
            p[1] = radius * (std::f64::consts::TAU * x).sin();
            p
        })
    }

    /// Ellipse `(a cos 2 pi x, b sin 2 pi x)` in the `(e_1, e_2)` plane of `R^dim`.
    pub fn ellipse(a: f64, b: f64, samples: usize, dim: usize) -> Result<Self> {
        Self::sample(dim, samples, |x| {
            let mut p = vec![0.0; dim];
            p[0] = a * (std::f64::consts::TAU * x).cos();
            p[1] = b * (std::f64::consts::TAU * x).sin();
            p
        })
    }

    fn first_irregular(&self) -> Option<usize> {
        let n = self.samples();
        if !self.points.is_finite() {
            return (0..n).find(|&j| !self.points.point(j).iter().all(|v| v.is_finite()));
        }
        (0..n).find(|&j| {
            let k = (j + 1) % n;
            let gap: f64 = (0..self.ambient_dim())
                .map(|c| (self.points.get(c, k) - self.points.get(c, j)).powi(2))
                .sum();
            gap <= 0.0
        })
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.points.dim()
    }

    #[inline]
    pub fn samples(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn points(&self) -> &VectorField {
        &self.points
    }

    pub fn into_points(self) -> VectorField {
        self.points
    }

    /// `gamma + h V`, validated as a curve.
    pub fn perturbed(&self, h: f64, v: &VectorField) -> Result<Self> {
        self.points.check_grid(v)?;
        Self::new(self.points.axpy(h, v))
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.points.scaled(s))
    }

    /// Smallest and mean distance between consecutive samples.
    pub fn spacing(&self) -> (f64, f64) {
        let n = self.samples();
        let gaps: Vec<f64> = (0..n)
            .map(|j| {
                let k = (j + 1) % n;
                (0..self.ambient_dim())
                    .map(|c| (self.points.get(c, k) - self.points.get(c, j)).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        (min, gaps.iter().sum::<f64>() / n as f64)
    }

    /// Largest coordinate magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.points
            .components()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `d^order gamma / dx^order` on the uniform parameter grid.
pub fn differentiate(curve: &DiscreteClosedCurve, order: usize) -> Result<VectorField> {
    differentiate_with(curve, order, Backend::Spectral)
}

pub fn differentiate_with(
    curve: &DiscreteClosedCurve,
    order: usize,
    backend: Backend,
) -> Result<VectorField> {
    differentiate_field(curve.points(), order, backend)
}

/// Componentwise periodic derivative of an arbitrary field on the grid.
pub fn differentiate_field(
    field: &VectorField,
    order: usize,
    backend: Backend,
) -> Result<VectorField> {
    let comps = field
        .components()
        .iter()
        .map(|c| spectral::derivative(c, order, backend))
        .collect::<Result<Vec<_>>>()?;
    VectorField::from_components(comps)
}

const CURVE_TAG: &str = "pelastica-curve";
const FIELD_TAG: &str = "pelastica-field";

/// Curve snapshot text: header plus one whitespace-separated point per line,
/// 17 significant digits per value.
pub fn write_curve(curve: &DiscreteClosedCurve) -> String {
    write_snapshot(CURVE_TAG, curve.points())
}

pub fn write_field(field: &VectorField) -> String {
    write_snapshot(FIELD_TAG, field)
}

fn write_snapshot(tag: &str, field: &VectorField) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {tag} v1 n={} N={}", field.dim(), field.len());
    for j in 0..field.len() {
        let line: Vec<String> = (0..field.dim())
            .map(|c| format_float(field.get(c, j)))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// 17 significant digits, enough for an exact `f64` round trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn read_curve(text: &str) -> Result<DiscreteClosedCurve> {
    DiscreteClosedCurve::new(read_snapshot(CURVE_TAG, text)?)
}

pub fn read_field(text: &str) -> Result<VectorField> {
    read_snapshot(FIELD_TAG, text)
}

fn read_snapshot(tag: &str, text: &str) -> Result<VectorField> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| PelasticaError::Parse("empty snapshot".into()))?;
    let (dim, len) = parse_header(tag, header)?;
    let mut points = Vec::with_capacity(len);
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| PelasticaError::Parse(format!("line {}: {e}", lineno + 2)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if p.len() != dim {
            return Err(PelasticaError::Parse(format!(
                "line {}: expected {dim} values, got {}",
                lineno + 2,
                p.len()
            )));
        }
        points.push(p);
    }
    if points.len() != len {
        return Err(PelasticaError::Parse(format!(
            "header declares N={len}, found {} samples",
            points.len()
        )));
    }
    VectorField::from_points(&points)
}

fn parse_header(tag: &str, header: &str) -> Result<(usize, usize)> {
    let mut parts = header.split_whitespace();
    let ok = parts.next() == Some("#") && parts.next() == Some(tag) && parts.next() == Some("v1");
    if !ok {
        return Err(PelasticaError::Parse(format!(
            "bad header `{header}`, expected `# {tag} v1 n=<n> N=<N>`"
        )));
    }
    let mut dim = None;
    let mut len = None;
    for kv in parts {
        match kv.split_once('=') {
            Some(("n", v)) => dim = v.parse().ok(),
            Some(("N", v)) => len = v.parse().ok(),
            _ => return Err(PelasticaError::Parse(format!("bad header field `{kv}`"))),
        }
    }
    match (dim, len) {
        (Some(d), Some(l)) => Ok((d, l)),
        _ => Err(PelasticaError::Parse("header missing n= or N=".into())),
    }
}
