//! `L^2(ds)` gradients of the bending regularization `F`, the regularized
//! p-elastic energy `E_delta^(p)` and the length, all pointwise normal fields.

use crate::energy::FlowParams;
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::geometry::{GeometryCache, GRADIENT_NORMAL_ORDER};

/// Lower clamp on `|kappa|^2 + delta^2` before negative powers are taken.
pub const COEFF_CLAMP: f64 = 1e-300;

/// `|kappa| L` below this counts as vanishing curvature in the degenerate check.
pub const KAPPA_VANISH: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct GradientField {
    pub vectors: VectorField,
    /// `epsilon * grad F`
    pub component_f: VectorField,
    pub component_ep: VectorField,
    /// `lambda * grad L = -lambda kappa`
    pub component_len: VectorField,
}

/// `-(nabla_s^4 kappa + |kappa|^2 nabla_s^2 kappa + <nabla_s kappa, kappa> nabla_s kappa
///    - 3/2 |nabla_s kappa|^2 kappa)`
pub fn gradient_f(geom: &GeometryCache) -> Result<VectorField> {
    geom.require_depth(GRADIENT_NORMAL_ORDER)?;
    let k = &geom.normal_derivs[0];
    let k1 = &geom.normal_derivs[1];
    let k2 = &geom.normal_derivs[2];
    let k4 = &geom.normal_derivs[4];
    let kk = k.norms_sq();
    let k1k = k1.dot(k);
    let k1k1: Vec<f64> = k1.norms_sq().into_iter().map(|v| -1.5 * v).collect();

    let mut sum = k4.clone();
    sum.add_weighted(&kk, k2);
    sum.add_weighted(&k1k, k1);
    sum.add_weighted(&k1k1, k);
    Ok(sum.scaled(-1.0))
}

/// Pointwise coefficient `(|kappa|^2 + delta^2)^((p-2)/2)` of the leading term.
pub fn leading_coefficient(geom: &GeometryCache, p: f64, delta: f64) -> Vec<f64> {
    geom.curvature
        .norms_sq()
        .into_iter()
        .map(|k2| (k2 + delta * delta).max(COEFF_CLAMP).powf(0.5 * (p - 2.0)))
        .collect()
}

/// Gradient of `1/p int (|kappa|^2 + delta^2)^(p/2) ds`.
pub fn gradient_ep(geom: &GeometryCache, p: f64, delta: f64) -> Result<VectorField> {
    geom.require_depth(2)?;
    let k = &geom.normal_derivs[0];
    let k1 = &geom.normal_derivs[1];
    let k2 = &geom.normal_derivs[2];
    let n = geom.samples();
    let kk = k.norms_sq();

    if delta == 0.0 && p > 2.0 && p < 4.0 {
        if let Some(index) = (0..n).find(|&j| kk[j].sqrt() * geom.length <= KAPPA_VANISH) {
            return Err(PelasticaError::Degenerate {
                index,
                p,
                kappa_norm: kk[index].sqrt(),
            });
        }
    }

    let w: Vec<f64> = kk.iter().map(|v| (v + delta * delta).max(COEFF_CLAMP)).collect();
    let pw = |e: f64| -> Vec<f64> { w.iter().map(|v| v.powf(e)).collect() };

    // (w)^{(p-2)/2} (nabla_s^2 kappa + |kappa|^2 kappa)
    let a = pw(0.5 * (p - 2.0));
    let mut out = k2.weighted(&a);
    let a_kk: Vec<f64> = a.iter().zip(&kk).map(|(x, y)| x * y).collect();
    out.add_weighted(&a_kk, k);

    // the (p-2) lines vanish identically at p = 2
    if p != 2.0 {
        let b = pw(0.5 * (p - 4.0));
        let kk2 = k.dot(k2);
        let k1k1 = k1.norms_sq();
        let kk1 = k.dot(k1);
        let c_kappa: Vec<f64> = (0..n)
            .map(|j| (p - 2.0) * b[j] * (kk2[j] + k1k1[j]))
            .collect();
        let c_grad: Vec<f64> = (0..n).map(|j| (p - 2.0) * b[j] * 2.0 * kk1[j]).collect();
        out.add_weighted(&c_kappa, k);
        out.add_weighted(&c_grad, k1);
        if p != 4.0 {
            let c = pw(0.5 * (p - 6.0));
            let c_k: Vec<f64> = (0..n)
                .map(|j| (p - 4.0) * (p - 2.0) * c[j] * kk1[j] * kk1[j])
                .collect();
            out.add_weighted(&c_k, k);
        }
    }

    let tail: Vec<f64> = pw(0.5 * p).into_iter().map(|v| -v / p).collect();
    out.add_weighted(&tail, k);

    if let Some(index) = (0..n).find(|&j| (0..out.dim()).any(|c| !out.get(c, j).is_finite())) {
        return Err(PelasticaError::Degenerate {
            index,
            p,
            kappa_norm: kk[index].sqrt(),
        });
    }
    Ok(out)
}

/// `grad L = -kappa`
pub fn gradient_length(geom: &GeometryCache) -> VectorField {
    geom.curvature.scaled(-1.0)
}

pub fn assemble_gradient(geom: &GeometryCache, params: &FlowParams) -> Result<GradientField> {
    let component_f = if params.epsilon == 0.0 {
        VectorField::zeros(geom.ambient_dim(), geom.samples())
    } else {
        gradient_f(geom)?.scaled(params.epsilon)
    };
    let component_ep = gradient_ep(geom, params.p, params.delta)?;
    let component_len = gradient_length(geom).scaled(params.lambda);
    let vectors = component_f.add(&component_ep).add(&component_len);
    Ok(GradientField {
        vectors,
        component_f,
        component_ep,
        component_len,
    })
}

impl GradientField {
    pub fn l2_norm(&self, geom: &GeometryCache) -> f64 {
        geom.l2_norm(&self.vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::DiscreteClosedCurve;
    use crate::geometry::build_geometry;

    #[test]
    fn bending_gradient_vanishes_on_circles() {
        for r in [0.5, 1.0, 3.0] {
            let c = DiscreteClosedCurve::circle(r, 64, 2).unwrap();
            let g = build_geometry(&c, 4).unwrap();
            assert!(gradient_f(&g).unwrap().max_norm() <= 1e-6);
        }
    }

    #[test]
    fn circle_ep_gradient_closed_form() {
        // all nabla_s terms vanish: grad = ((m^2+d^2)^{(p-2)/2} m^2 - (m^2+d^2)^{p/2}/p) kappa
        for &(r, p, d) in &[(1.0, 2.0, 0.0), (0.7, 3.0, 0.0), (2.0, 4.5, 0.3), (1.2, 2.5, 0.1)] {
            let c = DiscreteClosedCurve::circle(r, 64, 2).unwrap();
            let g = build_geometry(&c, 2).unwrap();
            let grad = gradient_ep(&g, p, d).unwrap();
            let m: f64 = 1.0 / r;
            let w = m * m + d * d;
            let coef = w.powf((p - 2.0) / 2.0) * m * m - w.powf(p / 2.0) / p;
            let expect = g.curvature.scaled(coef);
            assert!(grad.sub(&expect).max_norm() < 1e-9 * (1.0 + coef.abs() * m));
            if d == 0.0 {
                assert!((coef - (1.0 - 1.0 / p) * m.powf(p)).abs() < 1e-12 * m.powf(p));
            }
        }
    }

    #[test]
    fn p2_collapses() {
        let c = DiscreteClosedCurve::ellipse(1.6, 1.0, 128, 2).unwrap();
        let g = build_geometry(&c, 2).unwrap();
        let d = 0.4;
        let grad = gradient_ep(&g, 2.0, d).unwrap();
        let k = &g.normal_derivs[0];
        let mut expect = g.normal_derivs[2].clone();
        let coef: Vec<f64> = k.norms_sq().iter().map(|kk| kk - 0.5 * (kk + d * d)).collect();
        expect.add_weighted(&coef, k);
        assert!(grad.sub(&expect).max_norm() < 1e-12 * (1.0 + expect.max_norm()));
    }

    #[test]
    fn length_gradient_on_circles() {
        for r in [1.0, 4.0] {
            let c = DiscreteClosedCurve::circle(r, 64, 2).unwrap();
            let g = build_geometry(&c, 0).unwrap();
            let grad = gradient_length(&g);
            for j in 0..64 {
                assert!((grad.norm_at(j) - 1.0 / r).abs() < 1e-10);
                // points away from the center
                assert!(grad.dot_at(c.points(), j) > 0.0);
            }
            let pairing = g.l2_inner(&grad, &g.curvature);
            assert!(pairing < 0.0);
        }
    }

    #[test]
    fn gradients_are_normal() {
        let c = DiscreteClosedCurve::sample(3, 128, |x| {
            let t = std::f64::consts::TAU * x;
            vec![t.cos() + 0.1 * (2.0 * t).cos(), t.sin() - 0.05 * (3.0 * t).sin(), 0.2 * (2.0 * t).sin()]
        })
        .unwrap();
        let g = build_geometry(&c, 4).unwrap();
        let params = FlowParams::new(3.0, 0.1, 0.1, 1.0).unwrap();
        let grad = assemble_gradient(&g, &params).unwrap();
        for f in [&grad.vectors, &grad.component_f, &grad.component_ep, &grad.component_len] {
            for j in 0..128 {
                assert!(f.dot_at(&g.tangent, j).abs() <= 1e-8 * (1.0 + f.norm_at(j)));
            }
        }
        let sum = grad.component_f.add(&grad.component_ep).add(&grad.component_len);
        assert_eq!(sum, grad.vectors);
    }

    #[test]
    fn zero_epsilon_drops_bending_component() {
        let c = DiscreteClosedCurve::ellipse(2.0, 1.0, 64, 2).unwrap();
        let g = build_geometry(&c, 4).unwrap();
        let params = FlowParams::new(2.0, 0.1, 0.0, 1.0).unwrap();
        let grad = assemble_gradient(&g, &params).unwrap();
        assert_eq!(grad.component_f.max_norm(), 0.0);
    }

    #[test]
    fn degenerate_coefficient_is_reported() {
        // a figure-eight has an inflection point where kappa vanishes
        let c = DiscreteClosedCurve::sample(2, 64, |x| {
            let t = std::f64::consts::TAU * x;
            vec![t.sin(), (2.0 * t).sin() / 2.0]
        })
        .unwrap();
        let g = build_geometry(&c, 2).unwrap();
        assert!(matches!(gradient_ep(&g, 3.0, 0.0), Err(PelasticaError::Degenerate { .. })));
        assert!(gradient_ep(&g, 3.0, 0.1).is_ok());
        assert!(gradient_ep(&g, 2.0, 0.0).is_ok());
    }

    #[test]
    fn shallow_cache_rejected() {
        let c = DiscreteClosedCurve::circle(1.0, 32, 2).unwrap();
        let g = build_geometry(&c, 2).unwrap();
        assert!(matches!(
            gradient_f(&g),
            Err(PelasticaError::InsufficientCacheDepth { have: 2, need: 4 })
        ));
    }
}
