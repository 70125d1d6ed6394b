//! Equispaced sampling of polynomials on the unit circle.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::CirclePolynomial;

pub const DEFAULT_OVERSAMPLE: usize = 8;
pub const MIN_OVERSAMPLE: usize = 4;
/// Largest grid the adaptive routines will build.
pub const MAX_GRID: usize = 1 << 22;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Values of a polynomial at `M` equispaced points of the circle.
///
/// Entry `t` is `P(exp(2πi (t + offset) / M))`. `offset` is zero for the
/// standard grid and `0.5` for the staggered grid used by Mahler quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationGrid {
    pub m: usize,
    pub offset: f64,
    pub degree: usize,
    pub values: Vec<Complex64>,
}

impl EvaluationGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Angle of node `t`.
    pub fn angle(&self, t: usize) -> f64 {
        2.0 * PI * (t as f64 + self.offset) / self.m as f64
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// Smallest power of two holding `oversample * (d + 1)` points, capped at
/// [`MAX_GRID`] but never fewer than `2(d + 1)`.
pub fn default_size(degree: usize, oversample: usize) -> usize {
    let floor = (2 * (degree + 1)).next_power_of_two();
    let want = (oversample.max(2) * (degree + 1)).next_power_of_two();
    want.min(MAX_GRID).max(floor)
}

pub fn evaluate_on_grid(p: &CirclePolynomial, m: Option<usize>) -> Result<EvaluationGrid> {
    evaluate_shifted(p, m, 0.0)
}

/// Grid with nodes at `exp(2πi (t + offset) / M)`.
pub fn evaluate_shifted(
    p: &CirclePolynomial,
    m: Option<usize>,
    offset: f64,
) -> Result<EvaluationGrid> {
    let d = p.degree();
    let m = match m {
        Some(m) => {
            if !m.is_power_of_two() {
                return Err(Error::GridResolution(format!("grid size {m} is not a power of two")));
            }
            if m < 2 * (d + 1) {
                return Err(Error::GridResolution(format!(
                    "grid size {m} is below 2(deg + 1) = {} for degree {d}",
                    2 * (d + 1)
                )));
            }
            m
        }
        None => default_size(d, DEFAULT_OVERSAMPLE),
    };
    Ok(EvaluationGrid {
        m,
        offset,
        degree: d,
        values: evaluate_raw(p.coeffs(), m, offset),
    })
}

/// Evaluate `Σ a_j ω^{j(t + offset)}` for `t < m` with `ω = e^{2πi/m}`.
/// Coefficients past `m` are folded, which is exact on the grid.
pub(crate) fn evaluate_raw(coeffs: &[Complex64], m: usize, offset: f64) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (j, c) in coeffs.iter().enumerate() {
        let tw = if offset == 0.0 {
            *c
        } else {
            c * Complex64::from_polar(1.0, 2.0 * PI * offset * j as f64 / m as f64)
        };
        buf[j % m] += tw;
    }
    PLANNER.with(|pl| {
        let fft = pl.borrow_mut().plan_fft_inverse(m);
        fft.process(&mut buf);
    });
    buf
}

/// Unnormalized forward transform `X_f = Σ_t x_t e^{-2πi f t / m}`.
pub(crate) fn forward_in_place(buf: &mut [Complex64]) {
    PLANNER.with(|pl| {
        let fft = pl.borrow_mut().plan_fft_forward(buf.len());
        fft.process(buf);
    });
}
