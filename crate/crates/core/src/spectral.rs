//! Periodic differentiation on the uniform grid `x_j = j/N` of `R/Z`.
//!
//! The default backend is FFT-based spectral differentiation. Fourier
//! coefficients whose magnitude sits below [`NOISE_FLOOR`] times the largest
//! non-constant coefficient are dropped before differentiating; at sixth
//! order rounding noise in the top modes would otherwise be amplified by
//! `(pi N)^6`. A fourth-order central difference backend is kept for
//! cross-validation.

use std::cell::RefCell;
use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{PelasticaError, Result};

/// Relative magnitude below which Fourier coefficients are treated as rounding noise.
pub const NOISE_FLOOR: f64 = 1e-14;

/// Highest derivative order the operators accept.
pub const MAX_ORDER: usize = 6;

/// Smallest grid the operators accept.
pub const MIN_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Spectral,
    /// Fourth-order central differences applied `order` times.
    CentralFd4,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Normalized forward DFT: `c_k = (1/N) sum_j f_j e^{-2 pi i k j / N}`.
pub fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`forward`], returning the real part.
pub fn inverse(coeffs: &[Complex64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf.iter().map(|c| c.re).collect()
}

/// Signed wavenumber of DFT slot `idx` on an `n`-point grid.
#[inline]
pub fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

fn drop_noise(coeffs: &mut [Complex64]) {
    let peak = coeffs[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = NOISE_FLOOR * peak;
    for c in coeffs[1..].iter_mut() {
        if c.norm() < floor {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Multiplier `(2 pi i k)^order` for slot `idx`; the unpaired Nyquist mode is
/// dropped for odd orders so the result stays real.
fn symbol(idx: usize, n: usize, order: usize) -> Complex64 {
    let k = wavenumber(idx, n);
    if n % 2 == 0 && idx == n / 2 && order % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, TAU * k as f64).powu(order as u32)
}

fn check_order(order: usize, len: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(PelasticaError::OrderOutOfRange(order));
    }
    if len < MIN_SAMPLES {
        return Err(PelasticaError::TooFewSamples {
            got: len,
            min: MIN_SAMPLES,
        });
    }
    Ok(())
}

/// `d^order f / dx^order` of periodic samples on `[0, 1)`.
pub fn derivative(values: &[f64], order: usize, backend: Backend) -> Result<Vec<f64>> {
    check_order(order, values.len())?;
    Ok(match backend {
        Backend::Spectral => spectral_derivative(values, order),
        Backend::CentralFd4 => {
            let mut out = values.to_vec();
            for _ in 0..order {
                out = fd4_first(&out);
            }
            out
        }
    })
}

pub(crate) fn spectral_derivative(values: &[f64], order: usize) -> Vec<f64> {
    let n = values.len();
    let mut coeffs = forward(values);
    drop_noise(&mut coeffs);
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c *= symbol(idx, n, order);
    }
    inverse(&coeffs)
}

fn fd4_first(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let inv = n as f64 / 12.0;
    (0..n)
        .map(|j| {
            let at = |o: isize| f[(j as isize + o).rem_euclid(n as isize) as usize];
            (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) * inv
        })
        .collect()
}

/// Trigonometric interpolant of periodic samples, evaluable off-grid.
#[derive(Clone, Debug)]
pub struct TrigInterpolant {
    /// `c_0 .. c_{N/2}`; the Nyquist slot is halved so that the real
    /// reconstruction `c_0 + 2 Re sum_{k>=1} c_k z^k` is correct.
    half: Vec<Complex64>,
}

impl TrigInterpolant {
    pub fn new(values: &[f64]) -> Self {
        let n = values.len();
        let coeffs = forward(values);
        let mut half: Vec<Complex64> = coeffs[..=n / 2].to_vec();
        if n % 2 == 0 {
            half[n / 2] *= 0.5;
        }
        Self { half }
    }

    /// Value and first derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let z = Complex64::from_polar(1.0, TAU * x);
        let mut zk = z;
        let mut val = self.half[0].re;
        let mut der = 0.0;
        for (k, c) in self.half.iter().enumerate().skip(1) {
            let term = c * zk;
            val += 2.0 * term.re;
            // d/dx of 2 Re(c e^{2 pi i k x}) = 2 Re(2 pi i k c e^{...}) = -4 pi k Im(...)
            der -= 2.0 * TAU * k as f64 * term.im;
            zk *= z;
        }
        (val, der)
    }

    /// Antiderivative of the zero-mean part, anchored to vanish at `x = 0`,
    /// plus the mean times `x`.
    pub fn integral(&self, x: f64) -> f64 {
        let z = Complex64::from_polar(1.0, TAU * x);
        let mut zk = z;
        let mut acc = self.half[0].re * x;
        for (k, c) in self.half.iter().enumerate().skip(1) {
            // 2 Re( c (z^k - 1) / (2 pi i k) )
            let w = c * (zk - 1.0) / Complex64::new(0.0, TAU * k as f64);
            acc += 2.0 * w.re;
            zk *= z;
        }
        acc
    }

    pub fn mean(&self) -> f64 {
        self.half[0].re
    }
}
