//! The regularized p-elastic energy `eps F + E_delta^(p) + lambda L` and the
//! scale-invariant curvature norms.

use crate::curve::{format_float, DiscreteClosedCurve};
use crate::error::{PelasticaError, Result};
use crate::geometry::{build_geometry, GeometryCache};

/// Exponent `p`, curvature regularization `delta`, bending weight `epsilon`
/// and length weight `lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowParams {
    pub p: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub lambda: f64,
}

impl FlowParams {
    pub fn new(p: f64, delta: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        let params = Self {
            p,
            delta,
            epsilon,
            lambda,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(PelasticaError::invalid(key, "must be finite"))
            }
        };
        finite("p", self.p)?;
        finite("delta", self.delta)?;
        finite("epsilon", self.epsilon)?;
        finite("lambda", self.lambda)?;
        if self.p < 2.0 {
            return Err(PelasticaError::invalid("p", format!("must be >= 2, got {}", self.p)));
        }
        if self.lambda <= 0.0 {
            return Err(PelasticaError::invalid("lambda", format!("must be > 0, got {}", self.lambda)));
        }
        if self.delta < 0.0 {
            return Err(PelasticaError::invalid("delta", format!("must be >= 0, got {}", self.delta)));
        }
        if self.epsilon < 0.0 {
            return Err(PelasticaError::invalid("epsilon", format!("must be >= 0, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Same `p` and `lambda`, new regularization pair.
    pub fn with_regularization(&self, epsilon: f64, delta: f64) -> Self {
        Self {
            epsilon,
            delta,
            ..*self
        }
    }

    /// True when either regularization is switched off.
    pub fn is_degenerate(&self) -> bool {
        self.epsilon == 0.0 || self.delta == 0.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyBreakdown {
    /// `F = 1/2 int |nabla_s kappa|^2 ds`
    pub bending_reg: f64,
    /// `E_delta^(p) = 1/p int (|kappa|^2 + delta^2)^(p/2) ds`
    pub p_elastic: f64,
    pub length: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn assemble(bending_reg: f64, p_elastic: f64, length: f64, params: &FlowParams) -> Self {
        Self {
            bending_reg,
            p_elastic,
            length,
            total: params.epsilon * bending_reg + p_elastic + params.lambda * length,
        }
    }

    pub const CSV_HEADER: &'static str = "t,bending_reg,p_elastic,length,total";

    pub fn csv_row(&self, t: f64) -> String {
        [t, self.bending_reg, self.p_elastic, self.length, self.total]
            .iter()
            .map(|v| format_float(*v))
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn evaluate_energy(curve: &DiscreteClosedCurve, params: &FlowParams) -> Result<EnergyBreakdown> {
    let geom = build_geometry(curve, 1)?;
    energy_from_geometry(&geom, params)
}

pub fn energy_from_geometry(geom: &GeometryCache, params: &FlowParams) -> Result<EnergyBreakdown> {
    let grad_kappa = geom.normal_deriv(1)?;
    let bending_reg = 0.5 * geom.integrate(&grad_kappa.norms_sq());
    let p_elastic = p_elastic_integral(geom, params.p, params.delta) / params.p;
    Ok(EnergyBreakdown::assemble(bending_reg, p_elastic, geom.length, params))
}

/// `int (|kappa|^2 + delta^2)^(p/2) ds`
pub fn p_elastic_integral(geom: &GeometryCache, p: f64, delta: f64) -> f64 {
    let d2 = delta * delta;
    let vals: Vec<f64> = geom
        .curvature
        .norms_sq()
        .into_iter()
        .map(|k2| (k2 + d2).powf(0.5 * p))
        .collect();
    geom.integrate(&vals)
}

/// The unregularized limit energy `1/p int |kappa|^p ds + lambda L`.
pub fn limit_energy(geom: &GeometryCache, p: f64, lambda: f64) -> f64 {
    p_elastic_integral(geom, p, 0.0) / p + lambda * geom.length
}

/// `L^(i + 1 - 1/q) (int |nabla_s^i kappa|^q ds)^(1/q)`, dimensionless under rescaling.
pub fn scale_invariant_norm(curve: &DiscreteClosedCurve, i: usize, q: f64) -> Result<f64> {
    let geom = build_geometry(curve, i)?;
    scale_invariant_norm_from(&geom, i, q)
}

pub fn scale_invariant_norm_from(geom: &GeometryCache, i: usize, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(PelasticaError::invalid("q", format!("must be >= 1, got {q}")));
    }
    let field = geom.normal_deriv(i)?;
    let vals: Vec<f64> = field.norms().into_iter().map(|v| v.powf(q)).collect();
    let lq = geom.integrate(&vals).powf(1.0 / q);
    Ok(geom.length.powf(i as f64 + 1.0 - 1.0 / q) * lq)
}

/// `||kappa||_{k,2} = sum_{i=0..k} ||nabla_s^i kappa||_2` in scale-invariant norms.
pub fn scale_invariant_sobolev(geom: &GeometryCache, k: usize) -> Result<f64> {
    (0..=k).map(|i| scale_invariant_norm_from(geom, i, 2.0)).sum()
}
