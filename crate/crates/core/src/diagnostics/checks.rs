//! Fenchel, length and curvature bounds, the higher-regularity ratio and the
//! interpolation ratio.

use std::f64::consts::TAU;

use super::besov::besov_norm;
use super::{CheckRow, BOUND_TOL};
use crate::curve::DiscreteClosedCurve;
use crate::energy::{p_elastic_integral, scale_invariant_norm_from, scale_invariant_sobolev, FlowParams};
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::geometry::{build_geometry, GeometryCache};

/// `int |kappa| ds`
pub fn fenchel_integral(geom: &GeometryCache) -> f64 {
    geom.integrate(&geom.curvature.norms())
}

/// Quantities bounded in terms of the initial energy `E0` along any run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformBounds {
    pub length: f64,
    /// `(2 pi)^(p/(p-1)) / (p E0)^(1/(p-1))`
    pub length_lower: f64,
    /// `E0 / lambda`
    pub length_upper: f64,
    pub fenchel_integral: f64,
    /// `int (|kappa|^2 + delta^2)^(p/2) ds`, bounded by `p E0`
    pub curvature_integral: f64,
    pub curvature_bound: f64,
    /// `eps ||nabla_s kappa||_2^2`, bounded by `2 E0`
    pub bending_weighted: f64,
    pub bending_bound: f64,
}

pub fn uniform_bounds(geom: &GeometryCache, params: &FlowParams, e0: f64) -> Result<UniformBounds> {
    let p = params.p;
    let k1 = geom.normal_deriv(1)?;
    Ok(UniformBounds {
        length: geom.length,
        length_lower: TAU.powf(p / (p - 1.0)) / (p * e0).powf(1.0 / (p - 1.0)),
        length_upper: e0 / params.lambda,
        fenchel_integral: fenchel_integral(geom),
        curvature_integral: p_elastic_integral(geom, p, params.delta),
        curvature_bound: p * e0,
        bending_weighted: params.epsilon * geom.integrate(&k1.norms_sq()),
        bending_bound: 2.0 * e0,
    })
}

impl UniformBounds {
    pub fn rows(&self) -> Vec<CheckRow> {
        vec![
            CheckRow::new("fenchel", TAU, self.fenchel_integral, BOUND_TOL),
            CheckRow::new("length_lower", self.length_lower, self.length, BOUND_TOL),
            CheckRow::new("length_upper", self.length, self.length_upper, BOUND_TOL),
            CheckRow::new("curvature_integral", self.curvature_integral, self.curvature_bound, BOUND_TOL),
            CheckRow::new("bending_weighted", self.bending_weighted, self.bending_bound, BOUND_TOL),
        ]
    }
}

/// Fenchel, length lower bound and length upper bound rows.
pub fn fenchel_and_length_bounds(curve: &DiscreteClosedCurve, params: &FlowParams, e0: f64) -> Result<Vec<CheckRow>> {
    let geom = build_geometry(curve, 1)?;
    let mut rows = uniform_bounds(&geom, params, e0)?.rows();
    rows.truncate(3);
    Ok(rows)
}

/// `eps ||d_s^3 gamma||^2_{B^{1/4}_{2,inf}} + ||kappa||^p_{B^{1/(2p)}_{p,inf}}` against `1 + ||g||_2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HigherRegularity {
    pub bending_term: f64,
    pub curvature_term: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl HigherRegularity {
    pub fn row(&self, cap: f64) -> CheckRow {
        CheckRow::new("higher_regularity_ratio", self.ratio, cap, 0.0)
    }
}

pub fn higher_regularity_check(
    curve: &DiscreteClosedCurve,
    params: &FlowParams,
    residual_g: &VectorField,
) -> Result<HigherRegularity> {
    let geom = build_geometry(curve, 0)?;
    higher_regularity_from(&geom, params, residual_g)
}

/// Besov norms are taken in arclength measure over the grid shifts.
pub fn higher_regularity_from(
    geom: &GeometryCache,
    params: &FlowParams,
    residual_g: &VectorField,
) -> Result<HigherRegularity> {
    geom.tangent.check_grid(residual_g)?;
    let third = geom.full_deriv(3);
    let b3 = besov_norm(third, 0.25, 2.0, &geom.speed)?;
    let bk = besov_norm(&geom.curvature, 1.0 / (2.0 * params.p), params.p, &geom.speed)?;
    let bending_term = params.epsilon * b3 * b3;
    let curvature_term = bk.powf(params.p);
    let lhs = bending_term + curvature_term;
    let rhs = 1.0 + geom.l2_norm(residual_g);
    Ok(HigherRegularity {
        bending_term,
        curvature_term,
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// `||nabla_s^i kappa||_q` against `||kappa||_2^(1-alpha) ||kappa||_{k,2}^alpha`,
/// `alpha = (i + 1/2 - 1/q) / k`, all scale invariant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationRatio {
    pub i: usize,
    pub k: usize,
    pub q: f64,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Set when the right-hand side vanishes, which a closed curve cannot do.
    pub anomaly: bool,
}

impl InterpolationRatio {
    pub fn row(&self, cap: f64) -> CheckRow {
        let name = format!("interpolation_i{}_k{}_q{}", self.i, self.k, self.q);
        if self.anomaly {
            CheckRow::anomaly(name, self.lhs, self.rhs)
        } else {
            CheckRow::new(name, self.ratio, cap, 0.0)
        }
    }
}

pub fn interpolation_check(curve: &DiscreteClosedCurve, i: usize, k: usize, q: f64) -> Result<InterpolationRatio> {
    let geom = build_geometry(curve, k)?;
    interpolation_from(&geom, i, k, q)
}

pub fn interpolation_from(geom: &GeometryCache, i: usize, k: usize, q: f64) -> Result<InterpolationRatio> {
    if i >= k {
        return Err(PelasticaError::invalid("i", format!("need i < k, got i={i}, k={k}")));
    }
    if !(q >= 2.0) {
        return Err(PelasticaError::invalid("q", format!("must be >= 2, got {q}")));
    }
    let alpha = (i as f64 + 0.5 - 1.0 / q) / k as f64;
    let lhs = scale_invariant_norm_from(geom, i, q)?;
    let k0 = scale_invariant_norm_from(geom, 0, 2.0)?;
    let kk = scale_invariant_sobolev(geom, k)?;
    let rhs = k0.powf(1.0 - alpha) * kk.powf(alpha);
    let anomaly = !(rhs > 0.0);
    Ok(InterpolationRatio {
        i,
        k,
        q,
        alpha,
        lhs,
        rhs,
        ratio: if anomaly { f64::INFINITY } else { lhs / rhs },
        anomaly,
    })
}
