//! Arclength differential geometry of a sampled closed curve.
//!
//! With `d_s = d_x / |gamma'|`, the cache holds the unit tangent, the
//! curvature vector, the normal derivatives `nabla_s^m kappa` and the full
//! derivatives `d_s^m gamma`. Normal derivatives are built recursively:
//! differentiate in arclength, then strip the tangential component.

use crate::curve::{differentiate_field, DiscreteClosedCurve};
use crate::error::{PelasticaError, Result};
use crate::field::{trapezoid, VectorField};
use crate::spectral::Backend;

/// Order of the highest full derivative `d_s^m gamma` kept in the cache.
pub const FULL_DERIV_ORDER: usize = 6;

/// Normal order required by the gradient of the bending regularization.
pub const GRADIENT_NORMAL_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct GeometryCache {
    pub speed: Vec<f64>,
    pub tangent: VectorField,
    pub curvature: VectorField,
    /// `normal_derivs[m] = nabla_s^m kappa`, `m = 0..=max_normal_order`.
    pub normal_derivs: Vec<VectorField>,
    /// `full_derivs[m - 1] = d_s^m gamma`, `m = 1..=6`.
    pub full_derivs: Vec<VectorField>,
    pub length: f64,
    backend: Backend,
}

pub fn build_geometry(curve: &DiscreteClosedCurve, max_normal_order: usize) -> Result<GeometryCache> {
    build_geometry_with(curve, max_normal_order, Backend::Spectral)
}

pub fn build_geometry_with(
    curve: &DiscreteClosedCurve,
    max_normal_order: usize,
    backend: Backend,
) -> Result<GeometryCache> {
    let velocity = differentiate_field(curve.points(), 1, backend)?;
    let speed = velocity.norms();
    if let Some(index) = speed.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(PelasticaError::NotRegular { index });
    }
    let inv_speed: Vec<f64> = speed.iter().map(|s| 1.0 / s).collect();
    let tangent = velocity.weighted(&inv_speed);
    let length = speed.iter().sum::<f64>() / speed.len() as f64;

    let ds = |f: &VectorField| -> Result<VectorField> {
        Ok(differentiate_field(f, 1, backend)?.weighted(&inv_speed))
    };

    let mut full_derivs = Vec::with_capacity(FULL_DERIV_ORDER);
    full_derivs.push(tangent.clone());
    for _ in 1..FULL_DERIV_ORDER {
        let next = ds(full_derivs.last().expect("non-empty"))?;
        full_derivs.push(next);
    }

    let curvature = full_derivs[1].normal_part(&tangent);
    let mut normal_derivs = Vec::with_capacity(max_normal_order + 1);
    normal_derivs.push(curvature.clone());
    for _ in 0..max_normal_order {
        let next = ds(normal_derivs.last().expect("non-empty"))?.normal_part(&tangent);
        normal_derivs.push(next);
    }

    Ok(GeometryCache {
        speed,
        tangent,
        curvature,
        normal_derivs,
        full_derivs,
        length,
        backend,
    })
}

impl GeometryCache {
    #[inline]
    pub fn samples(&self) -> usize {
        self.speed.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.tangent.dim()
    }

    pub fn max_normal_order(&self) -> usize {
        self.normal_derivs.len() - 1
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// `nabla_s^m kappa`, or an error if the cache is too shallow.
    pub fn normal_deriv(&self, m: usize) -> Result<&VectorField> {
        self.normal_derivs
            .get(m)
            .ok_or(PelasticaError::InsufficientCacheDepth {
                have: self.max_normal_order(),
                need: m,
            })
    }

    pub(crate) fn require_depth(&self, need: usize) -> Result<()> {
        if self.max_normal_order() < need {
            Err(PelasticaError::InsufficientCacheDepth {
                have: self.max_normal_order(),
                need,
            })
        } else {
            Ok(())
        }
    }

    /// `d_s^m gamma` for `1 <= m <= 6`.
    pub fn full_deriv(&self, m: usize) -> &VectorField {
        &self.full_derivs[m - 1]
    }

    /// `int f ds` by the trapezoid rule in `x` with weight `|gamma'|`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        trapezoid(values, &self.speed)
    }

    /// `<a, b>_{L^2(ds)}`.
    pub fn l2_inner(&self, a: &VectorField, b: &VectorField) -> f64 {
        self.integrate(&a.dot(b))
    }

    pub fn l2_norm(&self, a: &VectorField) -> f64 {
        self.integrate(&a.norms_sq()).sqrt()
    }

    /// Arclength derivative of an arbitrary field on the same grid.
    pub fn partial_s(&self, f: &VectorField) -> Result<VectorField> {
        let inv: Vec<f64> = self.speed.iter().map(|s| 1.0 / s).collect();
        Ok(differentiate_field(f, 1, self.backend)?.weighted(&inv))
    }

    pub fn max_tangent_defect(&self) -> f64 {
        (0..self.samples())
            .map(|j| (self.tangent.norm_at(j) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|<nabla_s^m kappa, tau>|` over all cached orders and samples.
    pub fn max_orthogonality_defect(&self) -> f64 {
        self.normal_derivs
            .iter()
            .flat_map(|f| (0..self.samples()).map(move |j| f.dot_at(&self.tangent, j).abs()))
            .fold(0.0, f64::max)
    }
}
