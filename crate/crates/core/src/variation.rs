//! First variations `delta_V G = d/dh G(gamma + h V)|_{h=0}` of the three
//! functionals for arbitrary (tangential and normal) variation fields.
//!
//! These are evaluated from their own formulas, independently of the
//! gradients in [`crate::gradient`]; for normal `V` the two must agree.

use crate::curve::DiscreteClosedCurve;
use crate::error::Result;
use crate::field::VectorField;
use crate::geometry::{build_geometry, GeometryCache};

/// A per-sample variation field on the grid of its curve.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationField {
    pub vectors: VectorField,
}

impl VariationField {
    pub fn new(vectors: VectorField) -> Self {
        Self { vectors }
    }

    /// The same constant vector at every sample.
    pub fn translation(v: &[f64], samples: usize) -> Self {
        Self::new(VectorField::from_fn(v.len(), samples, |_| v.to_vec()))
    }
}

/// Arclength derivatives `d_s V, d_s^2 V, d_s^3 V`.
struct VariationDerivs {
    d1: VectorField,
    d2: VectorField,
    d3: VectorField,
}

fn variation_derivs(geom: &GeometryCache, v: &VectorField, order: usize) -> Result<VariationDerivs> {
    let d1 = geom.partial_s(v)?;
    let d2 = geom.partial_s(&d1)?;
    let d3 = if order >= 3 {
        geom.partial_s(&d2)?
    } else {
        VectorField::zeros(v.dim(), v.len())
    };
    Ok(VariationDerivs { d1, d2, d3 })
}

fn prepare(curve: &DiscreteClosedCurve, v: &VariationField, depth: usize) -> Result<GeometryCache> {
    curve.points().check_grid(&v.vectors)?;
    build_geometry(curve, depth)
}

/// `delta_V L = int <tau, d_s V> ds`
pub fn delta_length(curve: &DiscreteClosedCurve, v: &VariationField) -> Result<f64> {
    let geom = prepare(curve, v, 0)?;
    delta_length_from(&geom, v)
}

pub fn delta_length_from(geom: &GeometryCache, v: &VariationField) -> Result<f64> {
    let d1 = geom.partial_s(&v.vectors)?;
    Ok(geom.integrate(&geom.tangent.dot(&d1)))
}

/// `delta_V kappa = (d_s^2 V)^perp - 2 <d_s V, tau> kappa - <d_s V, kappa> tau`
fn delta_kappa(geom: &GeometryCache, d: &VariationDerivs) -> VectorField {
    let k = &geom.curvature;
    let t = &geom.tangent;
    let mut out = d.d2.normal_part(t);
    let c1: Vec<f64> = d.d1.dot(t).into_iter().map(|v| -2.0 * v).collect();
    let c2: Vec<f64> = d.d1.dot(k).into_iter().map(|v| -v).collect();
    out.add_weighted(&c1, k);
    out.add_weighted(&c2, t);
    out
}

/// `int (|kappa|^2+delta^2)^((p-2)/2) <kappa, delta_V kappa> ds
///   + 1/p int (|kappa|^2+delta^2)^(p/2) <tau, d_s V> ds`
pub fn delta_ep(curve: &DiscreteClosedCurve, v: &VariationField, p: f64, delta: f64) -> Result<f64> {
    let geom = prepare(curve, v, 0)?;
    delta_ep_from(&geom, v, p, delta)
}

pub fn delta_ep_from(geom: &GeometryCache, v: &VariationField, p: f64, delta: f64) -> Result<f64> {
    let d = variation_derivs(geom, &v.vectors, 2)?;
    let dk = delta_kappa(geom, &d);
    let k_dk = geom.curvature.dot(&dk);
    let t_dv = geom.tangent.dot(&d.d1);
    let vals: Vec<f64> = geom
        .curvature
        .norms_sq()
        .into_iter()
        .enumerate()
        .map(|(j, kk)| {
            let w = kk + delta * delta;
            w.powf(0.5 * (p - 2.0)) * k_dk[j] + w.powf(0.5 * p) / p * t_dv[j]
        })
        .collect();
    Ok(geom.integrate(&vals))
}

/// Coefficient of `<nabla_s V, kappa> kappa` in the normal variation of `nabla_s kappa`.
pub const DELTA_GRAD_KAPPA_COEFF: f64 = 3.0;

/// `int <nabla_s kappa, (delta_V nabla_s kappa)^perp> ds + 1/2 int |nabla_s kappa|^2 <tau, d_s V> ds`
pub fn delta_f(curve: &DiscreteClosedCurve, v: &VariationField) -> Result<f64> {
    let geom = prepare(curve, v, 1)?;
    delta_f_from(&geom, v)
}

pub fn delta_f_from(geom: &GeometryCache, v: &VariationField) -> Result<f64> {
    let d = variation_derivs(geom, &v.vectors, 3)?;
    let t = &geom.tangent;
    let k = &geom.curvature;
    let k1 = geom.normal_deriv(1)?;

    // (delta_V nabla_s kappa)^perp
    let nabla_v = d.d1.normal_part(t);
    let mut x = d.d3.normal_part(t);
    let c_k: Vec<f64> = (0..geom.samples())
        .map(|j| -3.0 * d.d2.dot_at(t, j) - DELTA_GRAD_KAPPA_COEFF * nabla_v.dot_at(k, j))
        .collect();
    let c_k1: Vec<f64> = d.d1.dot(t).into_iter().map(|v| -3.0 * v).collect();
    x.add_weighted(&c_k, k);
    x.add_weighted(&c_k1, k1);
    x.add_weighted(&k.norms_sq(), &nabla_v);

    let t_dv = t.dot(&d.d1);
    let k1k1 = k1.norms_sq();
    let vals: Vec<f64> = k1
        .dot(&x)
        .into_iter()
        .enumerate()
        .map(|(j, a)| a + 0.5 * k1k1[j] * t_dv[j])
        .collect();
    Ok(geom.integrate(&vals))
}
