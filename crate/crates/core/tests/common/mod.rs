//! Independent oracles shared by the integration tests. Nothing here calls
//! the library routine it is used to check.
#![allow(dead_code)]

use std::f64::consts::TAU;

use pelastica::curve::DiscreteClosedCurve;
use pelastica::energy::{evaluate_energy, FlowParams};
use pelastica::field::VectorField;

/// Circle reduction of the gradient: `grad E = (G(1/R) - lambda) kappa` with
/// `G(m) = (m^2+d^2)^((p-2)/2) m^2 - (m^2+d^2)^(p/2) / p`.
pub fn circle_g(m: f64, p: f64, delta: f64) -> f64 {
    let w = m * m + delta * delta;
    w.powf(0.5 * (p - 2.0)) * m * m - w.powf(0.5 * p) / p
}

/// `dR/dt = (G(1/R) - lambda) / R` for a circle moving by `-grad E`.
pub fn circle_rate(r: f64, p: f64, delta: f64, lambda: f64) -> f64 {
    (circle_g(1.0 / r, p, delta) - lambda) / r
}

/// Classical RK4 for the radius ODE, returning `R(t)` at each multiple of `h`.
pub fn circle_trajectory(r0: f64, p: f64, delta: f64, lambda: f64, t_end: f64, h: f64) -> Vec<(f64, f64)> {
    let f = |r: f64| circle_rate(r, p, delta, lambda);
    let steps = (t_end / h).round() as usize;
    let mut out = vec![(0.0, r0)];
    let mut r = r0;
    for i in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((i + 1) as f64 * h, r));
    }
    out
}

/// Stationary radius: root of `G(m) = lambda` in `m = 1/R`, by bisection.
pub fn circle_root(p: f64, delta: f64, lambda: f64) -> f64 {
    let h = |m: f64| circle_g(m, p, delta) - lambda;
    let (mut lo, mut hi) = (1e-12, 1.0);
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 / (0.5 * (lo + hi))
}

/// `sup_k ||u(. + k/N) - u||_{L^q(w dx)} / (k/N)^s` by plain nested loops.
pub fn brute_besov(u: &[Vec<f64>], s: f64, q: f64, weights: &[f64]) -> f64 {
    let n = u.len();
    let mut best = 0.0f64;
    for k in 1..=n / 2 {
        let mut acc = 0.0;
        for j in 0..n {
            let other = &u[(j + k) % n];
            let mut d2 = 0.0;
            for c in 0..u[j].len() {
                d2 += (other[c] - u[j][c]).powi(2);
            }
            acc += weights[j] * d2.sqrt().powf(q);
        }
        let val = (acc / n as f64).powf(1.0 / q) / (k as f64 / n as f64).powf(s);
        best = best.max(val);
    }
    best
}

/// `|kappa|` of `(a cos t, b sin t)`.
pub fn ellipse_curvature(a: f64, b: f64, t: f64) -> f64 {
    a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `int |kappa| ds` of the ellipse, `ds = sqrt(a^2 sin^2 + b^2 cos^2) dt`.
pub fn ellipse_total_curvature(a: f64, b: f64) -> f64 {
    let f = |t: f64| ellipse_curvature(a, b, t) * (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
    adaptive_simpson(&f, 0.0, TAU, 1e-13)
}

/// Plain central difference of the total energy.
pub fn central_difference(curve: &DiscreteClosedCurve, params: &FlowParams, v: &VectorField, h: f64) -> f64 {
    let e = |s: f64| evaluate_energy(&curve.perturbed(s, v).unwrap(), params).unwrap().total;
    (e(h) - e(-h)) / (2.0 * h)
}

/// `(int |u|^2 dx)^(1/2)` over the sample grid.
pub fn l2_dx(u: &VectorField) -> f64 {
    (u.norms_sq().iter().sum::<f64>() / u.len() as f64).sqrt()
}

/// Derivative of a periodic sample sequence on `[0, 1)` by a direct O(N^2)
/// DFT, with the Nyquist mode dropped for odd orders.
pub fn naive_derivative(values: &[f64], order: u32) -> Vec<f64> {
    let n = values.len();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    for k in 0..n {
        for (j, v) in values.iter().enumerate() {
            let a = -TAU * (k * j % n) as f64 / n as f64;
            re[k] += v * a.cos();
            im[k] += v * a.sin();
        }
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        let m = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
        if order % 2 == 1 && 2 * k == n {
            continue;
        }
        // multiply by (i w)^order
        let mag = (TAU * m as f64).powi(order as i32);
        let (fr, fi) = match order % 4 {
            0 => (mag, 0.0),
            1 => (0.0, mag),
            2 => (-mag, 0.0),
            _ => (0.0, -mag),
        };
        let (cr, ci) = (re[k] * fr - im[k] * fi, re[k] * fi + im[k] * fr);
        for (j, o) in out.iter_mut().enumerate() {
            let a = TAU * (k * j % n) as f64 / n as f64;
            *o += (cr * a.cos() - ci * a.sin()) / n as f64;
        }
    }
    out
}

/// Interpolation ratio for a planar curve computed from the signed curvature
/// and its arclength derivatives, in which `nabla_s^j kappa = k^(j) N`.
pub fn planar_interpolation_ratio(x: &[f64], y: &[f64], i: usize, k: usize, q: f64) -> f64 {
    let n = x.len() as f64;
    let (x1, y1) = (naive_derivative(x, 1), naive_derivative(y, 1));
    let (x2, y2) = (naive_derivative(x, 2), naive_derivative(y, 2));
    let speed: Vec<f64> = x1.iter().zip(&y1).map(|(a, b)| a.hypot(*b)).collect();
    let len = speed.iter().sum::<f64>() / n;
    let mut derivs = vec![(0..x.len())
        .map(|j| (x1[j] * y2[j] - y1[j] * x2[j]) / speed[j].powi(3))
        .collect::<Vec<f64>>()];
    for _ in 0..k {
        let d = naive_derivative(derivs.last().unwrap(), 1);
        derivs.push(d.iter().zip(&speed).map(|(a, v)| a / v).collect());
    }
    let norm = |j: usize, q: f64| {
        let integral = derivs[j].iter().zip(&speed).map(|(a, v)| a.abs().powf(q) * v).sum::<f64>() / n;
        len.powf(j as f64 + 1.0 - 1.0 / q) * integral.powf(1.0 / q)
    };
    let alpha = (i as f64 + 0.5 - 1.0 / q) / k as f64;
    let sobolev: f64 = (0..=k).map(|j| norm(j, 2.0)).sum();
    norm(i, q) / (norm(0, 2.0).powf(1.0 - alpha) * sobolev.powf(alpha))
}
