//! Library routines against the independent oracles in `common`.

mod common;

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pelastica::curve::DiscreteClosedCurve;
use pelastica::diagnostics::{besov_seminorm, fd_gradient_oracle, fenchel_integral, higher_regularity_check, interpolation_check};
use pelastica::energy::{evaluate_energy, FlowParams};
use pelastica::field::VectorField;
use pelastica::generate::{fourier_curve, random_smooth_field};
use pelastica::geometry::build_geometry;
use pelastica::gradient::assemble_gradient;
use pelastica::variation::{delta_ep, delta_f, delta_length, VariationField};

use common::*;

#[test]
fn ellipse_total_curvature_matches_quadrature() {
    for (a, b) in [(2.0, 1.0), (3.0, 1.0), (1.0, 0.7)] {
        let geom = build_geometry(&DiscreteClosedCurve::ellipse(a, b, 256, 2).unwrap(), 0).unwrap();
        let exact = ellipse_total_curvature(a, b);
        assert!((fenchel_integral(&geom) - exact).abs() < 1e-8, "({a},{b})");
        // a convex planar curve is the equality case
        assert!((exact - TAU).abs() < 1e-9);
    }
}

#[test]
fn nonconvex_curve_exceeds_fenchel_bound() {
    // a figure with an inward dent has total absolute curvature above 2 pi
    let curve = DiscreteClosedCurve::sample(2, 256, |x| {
        let t = TAU * x;
        let r = 1.0 + 0.4 * (3.0 * t).cos();
        vec![r * t.cos(), r * t.sin()]
    })
    .unwrap();
    let geom = build_geometry(&curve, 0).unwrap();
    assert!(fenchel_integral(&geom) > TAU + 0.1);
}

#[test]
fn circle_gradient_matches_scalar_reduction() {
    for (p, delta, lambda, r) in [(2.0, 0.0, 1.0, 1.0), (3.0, 0.5, 0.7, 1.4), (4.0, 1.0, 2.0, 0.6)] {
        let params = FlowParams::new(p, delta, 0.1, lambda).unwrap();
        let circle = DiscreteClosedCurve::circle(r, 128, 2).unwrap();
        let geom = build_geometry(&circle, 4).unwrap();
        let g = assemble_gradient(&geom, &params).unwrap();
        // grad E = (G(1/R) - lambda) kappa, kappa = -gamma / R^2
        let coeff = circle_g(1.0 / r, p, delta) - lambda;
        for j in 0..128 {
            let pt = circle.points().point(j);
            for c in 0..2 {
                let expect = -coeff * pt[c] / (r * r);
                assert!((g.vectors.get(c, j) - expect).abs() < 1e-9 * (1.0 + expect.abs()));
            }
        }
    }
}

#[test]
fn fd_oracle_agrees_with_plain_central_difference() {
    let curve = fourier_curve(3, 4, 0.2, 128, 3).unwrap();
    let params = FlowParams::new(3.0, 0.2, 0.05, 1.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let v = random_smooth_field(&mut rng, 3, 128, 4);
    let lib = fd_gradient_oracle(&curve, &params, &VariationField::new(v.clone()), Some(1e-4), false).unwrap();
    let local = central_difference(&curve, &params, &v, 1e-4);
    assert!((lib - local).abs() <= 1e-12 * (1.0 + local.abs()));
}

#[test]
fn fd_error_shrinks_quadratically() {
    let curve = fourier_curve(4, 3, 0.2, 128, 2).unwrap();
    let params = FlowParams::new(2.0, 0.3, 0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let v = VariationField::new(random_smooth_field(&mut rng, 2, 128, 3));
    let exact = delta_ep(&curve, &v, 2.0, 0.3).unwrap() + delta_length(&curve, &v).unwrap();
    let err = |h: f64| (fd_gradient_oracle(&curve, &params, &v, Some(h), false).unwrap() - exact).abs();
    let (e1, e2) = (err(1e-2), err(1e-3));
    assert!(e2 < e1 / 50.0, "{e1:e} {e2:e}");
    assert!(err(1e-5) <= 1e-5 * exact.abs());
}

#[test]
fn summed_variations_match_fd_at_default_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..4 {
        let curve = fourier_curve(seed, 4, 0.2, 512, 2 + seed as usize % 2);
        let curve = curve.unwrap();
        let params = FlowParams::new(2.0 + seed as f64 * 0.5, 0.3, 0.1, 1.0).unwrap();
        let v = VariationField::new(random_smooth_field(&mut rng, curve.ambient_dim(), 512, 4));
        let value = params.epsilon * delta_f(&curve, &v).unwrap()
            + delta_ep(&curve, &v, params.p, params.delta).unwrap()
            + params.lambda * delta_length(&curve, &v).unwrap();
        let fd = fd_gradient_oracle(&curve, &params, &v, None, false).unwrap();
        assert!((value - fd).abs() <= 1e-5 * fd.abs(), "{value} vs {fd}");
    }
}

#[test]
fn besov_matches_brute_force_with_arclength_weights() {
    let curve = fourier_curve(8, 5, 0.3, 128, 3).unwrap();
    let geom = build_geometry(&curve, 0).unwrap();
    for (s, q) in [(0.25, 2.0), (1.0 / 6.0, 3.0), (0.5, 1.5)] {
        let fast = besov_seminorm(&geom.curvature, s, q, &geom.speed).unwrap().seminorm;
        let slow = brute_besov(&geom.curvature.points(), s, q, &geom.speed);
        assert!((fast - slow).abs() <= 1e-12 * slow);
    }
}

#[test]
fn stationary_circle_regularity_against_brute_force() {
    let (p, delta, eps, lambda) = (3.0, 0.2, 0.1, 1.0);
    let params = FlowParams::new(p, delta, eps, lambda).unwrap();
    let r = circle_root(p, delta, lambda);
    let circle = DiscreteClosedCurve::circle(r, 64, 2).unwrap();
    let geom = build_geometry(&circle, 3).unwrap();
    let zero = VectorField::zeros(2, 64);
    let check = higher_regularity_check(&circle, &params, &zero).unwrap();
    let lq = |u: &VectorField, q: f64| (u.norms().iter().zip(&geom.speed).map(|(v, w)| w * v.powf(q)).sum::<f64>() / 64.0).powf(1.0 / q);
    let third = geom.full_deriv(3);
    let b3 = lq(third, 2.0) + brute_besov(&third.points(), 0.25, 2.0, &geom.speed);
    let bk = lq(&geom.curvature, p) + brute_besov(&geom.curvature.points(), 1.0 / (2.0 * p), p, &geom.speed);
    let expect = eps * b3 * b3 + bk.powf(p);
    assert!((check.lhs - expect).abs() <= 1e-12 * expect);
    assert!((check.rhs - 1.0).abs() < 1e-15);
    // halving eps halves the bending term exactly
    let half = higher_regularity_check(&circle, &params.with_regularization(eps / 2.0, delta), &zero).unwrap();
    assert!((half.bending_term - check.bending_term / 2.0).abs() <= 1e-15 * check.bending_term);
}

#[test]
fn interpolation_ratio_matches_direct_evaluation() {
    for seed in 0..5 {
        let curve = fourier_curve(40 + seed, 4, 0.25, 128, 2).unwrap();
        let pts = curve.points();
        for (i, k, q) in [(1, 2, 2.0), (1, 3, 2.0), (2, 3, 2.0), (1, 2, 4.0), (0, 2, 3.0)] {
            let lib = interpolation_check(&curve, i, k, q).unwrap().ratio;
            let direct = planar_interpolation_ratio(pts.component(0), pts.component(1), i, k, q);
            assert!((lib - direct).abs() <= 1e-8 * direct, "({i},{k},{q}): {lib} vs {direct}");
        }
    }
}

#[test]
fn circle_interpolation_lhs_vanishes() {
    let c = DiscreteClosedCurve::circle(2.0, 64, 2).unwrap();
    let r = interpolation_check(&c, 1, 2, 2.0).unwrap();
    assert!(r.ratio < 1e-10 && !r.anomaly);
}

#[test]
fn monotonicity_margin_by_hand() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let p = rng.gen_range(2.0..4.0);
        let delta = rng.gen_range(0.0..1.0);
        let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let phi = |z: &[f64]| {
            let a = (z.iter().map(|c| c * c).sum::<f64>() + delta * delta).powf(0.5 * (p - 2.0));
            z.iter().map(|c| a * c).collect::<Vec<f64>>()
        };
        let (fw, fv) = (phi(&w), phi(&v));
        let lhs: f64 = (0..3).map(|c| (fw[c] - fv[c]) * (w[c] - v[c])).sum();
        let dist = (0..3).map(|c| (w[c] - v[c]).powi(2)).sum::<f64>().sqrt();
        let expect = lhs - 4f64.powf(1.0 - p) * dist.powf(p);
        let got = pelastica::diagnostics::monotonicity::monotonicity_margin(&w, &v, p, delta);
        assert!((got - expect).abs() <= 1e-12 * (1.0 + lhs.abs()));
        assert!(got >= -1e-12);
    }
}

#[test]
fn unit_circle_energy_closed_forms() {
    let params = FlowParams::new(2.0, 0.0, 0.0, 1.0).unwrap();
    let e = evaluate_energy(&DiscreteClosedCurve::circle(1.0, 64, 2).unwrap(), &params).unwrap();
    assert!((e.p_elastic - std::f64::consts::PI).abs() < 1e-12);
    assert!((e.length - TAU).abs() < 1e-12);
    assert!((e.total - 3.0 * std::f64::consts::PI).abs() < 1e-12);
}
