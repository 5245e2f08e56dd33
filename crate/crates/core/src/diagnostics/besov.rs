//! Discrete Besov-Nikolskii seminorms
//! `|u|_{B^s_{q,inf}} = sup_h ||u(. + h) - u||_{L^q(ds)} / |h|^s`
//! over the grid shifts `h = k/N`, `k = 1..=N/2`.

use rayon::prelude::*;

use crate::error::{PelasticaError, Result};
use crate::field::VectorField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovEstimate {
    pub s: f64,
    pub q: f64,
    pub seminorm: f64,
    /// The shift `h = k/N` attaining the supremum (first one on ties).
    pub argmax_shift: f64,
}

fn validate(s: f64, q: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(PelasticaError::invalid("s", format!("must lie in (0, 1), got {s}")));
    }
    if !(q >= 1.0) {
        return Err(PelasticaError::invalid("q", format!("must be >= 1, got {q}")));
    }
    Ok(())
}

/// Seminorm of `field` with `L^q` integrals weighted by `weights / N`
/// (pass the speed `|gamma'|` for arclength measure, or ones for `dx`).
pub fn besov_seminorm(field: &VectorField, s: f64, q: f64, weights: &[f64]) -> Result<BesovEstimate> {
    validate(s, q)?;
    let n = field.len();
    if weights.len() != n {
        return Err(PelasticaError::GridMismatch {
            expected_dim: field.dim(),
            expected_len: n,
            dim: field.dim(),
            len: weights.len(),
        });
    }
    let dim = field.dim();
    // sample-major copy so each shifted difference reads contiguous memory
    let flat: Vec<f64> = (0..n)
        .flat_map(|j| (0..dim).map(move |c| field.get(c, j)))
        .collect();
    let inv_n = 1.0 / n as f64;

    let ratios: Vec<f64> = (1..=n / 2)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for j in 0..n {
                let a = &flat[j * dim..(j + 1) * dim];
                let jk = (j + k) % n;
                let b = &flat[jk * dim..(jk + 1) * dim];
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)).sum();
                let pow = if q == 2.0 { d2 } else { d2.powf(0.5 * q) };
                acc += weights[j] * pow;
            }
            let lq = if q == 2.0 {
                (acc * inv_n).sqrt()
            } else {
                (acc * inv_n).powf(1.0 / q)
            };
            lq / (k as f64 * inv_n).powf(s)
        })
        .collect();

    let (best_k, seminorm) = ratios
        .iter()
        .enumerate()
        .fold((0, 0.0_f64), |(bk, bv), (i, &v)| if v > bv { (i, v) } else { (bk, bv) });
    Ok(BesovEstimate {
        s,
        q,
        seminorm,
        argmax_shift: (best_k + 1) as f64 * inv_n,
    })
}

/// `||u||_{L^q} + |u|_{B^s_{q,inf}}`
pub fn besov_norm(field: &VectorField, s: f64, q: f64, weights: &[f64]) -> Result<f64> {
    let semi = besov_seminorm(field, s, q, weights)?;
    let n = field.len() as f64;
    let lq = field
        .norms()
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.powf(q))
        .sum::<f64>()
        / n;
    Ok(lq.powf(1.0 / q) + semi.seminorm)
}
