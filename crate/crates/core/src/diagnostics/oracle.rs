//! Central finite differences of the discrete total energy.

use crate::curve::DiscreteClosedCurve;
use crate::energy::{evaluate_energy, FlowParams};
use crate::error::Result;
use crate::variation::VariationField;

/// Default step `1e-5 (1 + ||gamma||_inf)`.
pub fn default_step(curve: &DiscreteClosedCurve) -> f64 {
    1e-5 * (1.0 + curve.sup_norm())
}

/// Step for the Richardson-extrapolated oracle, `1e-3 (1 + ||gamma||_inf)`.
/// The extrapolated difference is accurate to O(h^4), so rounding in the
/// energy differences, not truncation, limits it at the plain default step.
pub fn richardson_step(curve: &DiscreteClosedCurve) -> f64 {
    1e-3 * (1.0 + curve.sup_norm())
}

fn central(curve: &DiscreteClosedCurve, params: &FlowParams, v: &VariationField, h: f64) -> Result<f64> {
    let plus = evaluate_energy(&curve.perturbed(h, &v.vectors)?, params)?.total;
    let minus = evaluate_energy(&curve.perturbed(-h, &v.vectors)?, params)?.total;
    Ok((plus - minus) / (2.0 * h))
}

/// `(E(gamma + hV) - E(gamma - hV)) / 2h`, optionally Richardson-extrapolated
/// from steps `h` and `h/2`. `h = None` uses [`default_step`].
pub fn fd_gradient_oracle(
    curve: &DiscreteClosedCurve,
    params: &FlowParams,
    v: &VariationField,
    h: Option<f64>,
    richardson: bool,
) -> Result<f64> {
    curve.points().check_grid(&v.vectors)?;
    let h = h.unwrap_or_else(|| default_step(curve));
    let d1 = central(curve, params, v, h)?;
    if !richardson {
        return Ok(d1);
    }
    let d2 = central(curve, params, v, 0.5 * h)?;
    Ok((4.0 * d2 - d1) / 3.0)
}
