//! Per-sample vector fields on the periodic grid `x_j = j/N`.
//!
//! Storage is component-major (`comps[c][j]`) so that each coordinate can be
//! handed to the FFT as a contiguous slice.

use crate::error::{PelasticaError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(dim: usize, len: usize) -> Self {
        Self {
            comps: vec![vec![0.0; len]; dim],
        }
    }

    /// Builds a field from component slices; all components must share one length.
    pub fn from_components(comps: Vec<Vec<f64>>) -> Result<Self> {
        let len = comps.first().map_or(0, Vec::len);
        if let Some(bad) = comps.iter().find(|c| c.len() != len) {
            return Err(PelasticaError::GridMismatch {
                expected_dim: comps.len(),
                expected_len: len,
                dim: comps.len(),
                len: bad.len(),
            });
        }
        Ok(Self { comps })
    }

    /// Builds a field from a list of points (sample-major input).
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut comps = vec![Vec::with_capacity(points.len()); dim];
        for p in points {
            if p.len() != dim {
                return Err(PelasticaError::GridMismatch {
                    expected_dim: dim,
                    expected_len: points.len(),
                    dim: p.len(),
                    len: points.len(),
                });
            }
            for (c, v) in p.iter().enumerate() {
                comps[c].push(*v);
            }
        }
        Ok(Self { comps })
    }

    /// Samples `f(x_j)` at `x_j = j/len`.
    pub fn from_fn(dim: usize, len: usize, f: impl Fn(f64) -> Vec<f64>) -> Self {
        let mut out = Self::zeros(dim, len);
        for j in 0..len {
            let v = f(j as f64 / len as f64);
            for c in 0..dim {
                out.comps[c][j] = v[c];
            }
        }
        out
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.comps.first().map_or(0, Vec::len)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    #[inline]
    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    #[inline]
    pub fn get(&self, c: usize, j: usize) -> f64 {
        self.comps[c][j]
    }

    #[inline]
    pub fn set(&mut self, c: usize, j: usize, v: f64) {
        self.comps[c][j] = v;
    }

    pub fn point(&self, j: usize) -> Vec<f64> {
        self.comps.iter().map(|c| c[j]).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    pub fn same_grid(&self, other: &VectorField) -> bool {
        self.dim() == other.dim() && self.len() == other.len()
    }

    pub(crate) fn check_grid(&self, other: &VectorField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(PelasticaError::GridMismatch {
                expected_dim: self.dim(),
                expected_len: self.len(),
                dim: other.dim(),
                len: other.len(),
            })
        }
    }

    #[inline]
    pub fn dot_at(&self, other: &VectorField, j: usize) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a[j] * b[j])
            .sum()
    }

    #[inline]
    pub fn norm_sq_at(&self, j: usize) -> f64 {
        self.comps.iter().map(|a| a[j] * a[j]).sum()
    }

    #[inline]
    pub fn norm_at(&self, j: usize) -> f64 {
        self.norm_sq_at(j).sqrt()
    }

    /// Pointwise inner products `<self_j, other_j>`.
    pub fn dot(&self, other: &VectorField) -> Vec<f64> {
        (0..self.len()).map(|j| self.dot_at(other, j)).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.norm_at(j)).collect()
    }

    pub fn norms_sq(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.norm_sq_at(j)).collect()
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.len()).map(|j| self.norm_at(j)).fold(0.0, f64::max)
    }

    pub fn scaled(&self, a: f64) -> VectorField {
        self.map_components(|_, v| a * v)
    }

    /// `self_j * w_j` for a per-sample scalar weight.
    pub fn weighted(&self, w: &[f64]) -> VectorField {
        self.map_components(|j, v| w[j] * v)
    }

    fn map_components(&self, f: impl Fn(usize, f64) -> f64) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .map(|c| c.iter().enumerate().map(|(j, &v)| f(j, v)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> VectorField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + a * other`
    pub fn axpy(&self, a: f64, other: &VectorField) -> VectorField {
        self.zip_with(other, |x, y| x + a * y)
    }

    /// `self_j += w_j * other_j` in place.
    pub fn add_weighted(&mut self, w: &[f64], other: &VectorField) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for j in 0..a.len() {
                a[j] += w[j] * b[j];
            }
        }
    }

    fn zip_with(&self, other: &VectorField, f: impl Fn(f64, f64) -> f64) -> VectorField {
        debug_assert!(self.same_grid(other));
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
                .collect(),
        }
    }

    /// Removes the component along the unit field `tangent`: `phi - <phi, t> t`.
    pub fn normal_part(&self, tangent: &VectorField) -> VectorField {
        let coef: Vec<f64> = self.dot(tangent).into_iter().map(|v| -v).collect();
        let mut out = self.clone();
        out.add_weighted(&coef, tangent);
        out
    }

    /// Index shift by `k` samples: `out_j = self_{j+k mod N}`.
    pub fn shifted(&self, k: usize) -> VectorField {
        let n = self.len();
        VectorField {
            comps: self
                .comps
                .iter()
                .map(|c| (0..n).map(|j| c[(j + k) % n]).collect())
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

/// `sum_j f_j * w_j / N`: trapezoid rule on the periodic unit interval.
pub(crate) fn trapezoid(values: &[f64], weights: &[f64]) -> f64 {
    let n = values.len() as f64;
    values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / n
}
