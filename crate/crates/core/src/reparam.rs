//! Constant-speed resampling of closed curves.
//!
//! The normalized arclength `phi(x) = (1/L) int_0^x |gamma'(y)| dy` is
//! inverted at `sigma_j = j/N`. A monotone cubic (Fritsch-Carlson) fit of
//! the inverse through the grid nodes gives the starting point; Newton
//! iterations on the trigonometric interpolant of the speed then refine it
//! to full precision, and the curve interpolant is evaluated there.
//! Sample 0 is the anchor and is copied unchanged.

use crate::curve::{differentiate_field, DiscreteClosedCurve};
use crate::error::{PelasticaError, Result};
use crate::field::VectorField;
use crate::spectral::{Backend, TrigInterpolant};

const NEWTON_MAX_ITERS: usize = 30;
const NEWTON_TOL: f64 = 1e-15;

pub fn reparametrize_constant_speed(curve: &DiscreteClosedCurve) -> Result<DiscreteClosedCurve> {
    let n = curve.samples();
    let velocity = differentiate_field(curve.points(), 1, Backend::Spectral)?;
    let speed = velocity.norms();
    if let Some(index) = speed.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(PelasticaError::NotRegular { index });
    }
    let speed_interp = TrigInterpolant::new(&speed);
    let length = speed_interp.mean();
    let phi = |x: f64| speed_interp.integral(x) / length;
    let dphi = |x: f64| speed_interp.eval(x).0 / length;

    // nodes of the inverse map sigma -> x, closed with (1, 1)
    let mut sigma_nodes: Vec<f64> = (0..n).map(|j| phi(j as f64 / n as f64)).collect();
    sigma_nodes.push(1.0);
    let x_nodes: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    if sigma_nodes.windows(2).any(|w| w[1] <= w[0]) {
        // phi is strictly increasing for a regular curve; a fold here means
        // the speed interpolant went negative between samples
        let index = sigma_nodes.windows(2).position(|w| w[1] <= w[0]).unwrap_or(0);
        return Err(PelasticaError::NotRegular { index });
    }
    let guess = MonotoneCubic::new(sigma_nodes, x_nodes);

    let interps: Vec<TrigInterpolant> = curve
        .points()
        .components()
        .iter()
        .map(|c| TrigInterpolant::new(c))
        .collect();

    let mut out = VectorField::zeros(curve.ambient_dim(), n);
    for c in 0..curve.ambient_dim() {
        out.set(c, 0, curve.points().get(c, 0));
    }
    for j in 1..n {
        let target = j as f64 / n as f64;
        let mut x = guess.eval(target);
        for _ in 0..NEWTON_MAX_ITERS {
            let step = (phi(x) - target) / dphi(x);
            x -= step;
            if step.abs() < NEWTON_TOL {
                break;
            }
        }
        for (c, it) in interps.iter().enumerate() {
            out.set(c, j, it.eval(x).0);
        }
    }
    DiscreteClosedCurve::new(out)
}

/// Max minus min of `|gamma'(x_j)|`, relative to the length.
pub fn speed_spread(curve: &DiscreteClosedCurve) -> Result<f64> {
    let speed = differentiate_field(curve.points(), 1, Backend::Spectral)?.norms();
    let length = speed.iter().sum::<f64>() / speed.len() as f64;
    let max = speed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = speed.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((max - min) / length)
}

/// Fritsch-Carlson monotone piecewise cubic Hermite interpolant.
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let m = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..m - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut slopes = vec![0.0; m];
        for i in 1..m - 1 {
            slopes[i] = harmonic_slope(h[i - 1], h[i], d[i - 1], d[i]);
        }
        // the inverse arclength map minus the identity is periodic
        let end = harmonic_slope(h[m - 2], h[0], d[m - 2], d[0]);
        slopes[0] = end;
        slopes[m - 1] = end;
        Self { xs, ys, slopes }
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self
            .xs
            .partition_point(|&v| v <= x)
            .clamp(1, self.xs.len() - 1)
            - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn harmonic_slope(h_prev: f64, h_next: f64, d_prev: f64, d_next: f64) -> f64 {
    if d_prev * d_next <= 0.0 {
        return 0.0;
    }
    let w1 = 2.0 * h_next + h_prev;
    let w2 = h_next + 2.0 * h_prev;
    (w1 + w2) / (w1 / d_prev + w2 / d_next)
}
