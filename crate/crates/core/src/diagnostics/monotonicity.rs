//! Randomized check of the pointwise monotonicity of `Phi(z) = (|z|^2 + delta^2)^((p-2)/2) z`:
//! `<Phi(w) - Phi(v), w - v> >= 4^(1-p) |w - v|^p`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::CheckRow;
use crate::error::{PelasticaError, Result};

/// Trials handled by one seeded generator.
const CHUNK: usize = 4096;

/// Allowed negative margin.
pub const MONOTONICITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonotonicityOutcome {
    pub p: f64,
    pub delta: f64,
    pub dim: usize,
    pub trials: usize,
    /// `min (lhs - rhs)` over all trials.
    pub worst_margin: f64,
}

impl MonotonicityOutcome {
    pub fn row(&self) -> CheckRow {
        CheckRow::new(
            format!("monotonicity_p{}_d{}_n{}", self.p, self.delta, self.dim),
            -self.worst_margin,
            0.0,
            MONOTONICITY_TOL,
        )
    }
}

fn phi(z: &[f64], p: f64, delta: f64) -> Vec<f64> {
    let n2: f64 = z.iter().map(|v| v * v).sum();
    let a = (n2 + delta * delta).powf(0.5 * (p - 2.0));
    z.iter().map(|v| a * v).collect()
}

/// `<Phi(w) - Phi(v), w - v> - 4^(1-p) |w - v|^p`
pub fn monotonicity_margin(w: &[f64], v: &[f64], p: f64, delta: f64) -> f64 {
    let fw = phi(w, p, delta);
    let fv = phi(v, p, delta);
    let mut lhs = 0.0;
    let mut d2 = 0.0;
    for c in 0..w.len() {
        let d = w[c] - v[c];
        lhs += (fw[c] - fv[c]) * d;
        d2 += d * d;
    }
    lhs - 4f64.powf(1.0 - p) * d2.powf(0.5 * p)
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
    (0..dim).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

/// Half the trials draw `w, v` independently, half draw `v` as a small
/// perturbation of `w`; magnitudes span four decades. Chunks run in parallel
/// with generators seeded from `(seed, chunk)`, so the result does not depend
/// on scheduling.
pub fn monotonicity_property_test(p: f64, delta: f64, dim: usize, trials: usize, seed: u64) -> Result<MonotonicityOutcome> {
    if !(p >= 2.0) {
        return Err(PelasticaError::invalid("p", format!("must be >= 2, got {p}")));
    }
    if !(delta >= 0.0) {
        return Err(PelasticaError::invalid("delta", format!("must be >= 0, got {delta}")));
    }
    if dim == 0 {
        return Err(PelasticaError::BadDimension(dim));
    }
    let chunks = trials.div_ceil(CHUNK);
    let worst_margin = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = CHUNK.min(trials - chunk * CHUNK);
            let mut worst = f64::INFINITY;
            for t in 0..count {
                let w = random_vector(&mut rng, dim);
                let v = if t % 2 == 0 {
                    random_vector(&mut rng, dim)
                } else {
                    let d = random_vector(&mut rng, dim);
                    let s = 10f64.powf(rng.gen_range(-8.0..-1.0));
                    w.iter().zip(&d).map(|(a, b)| a + s * b).collect()
                };
                worst = worst.min(monotonicity_margin(&w, &v, p, delta));
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(MonotonicityOutcome {
        p,
        delta,
        dim,
        trials,
        worst_margin,
    })
}
