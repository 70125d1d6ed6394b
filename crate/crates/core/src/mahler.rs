//! Mahler measure by two independent routes: Jensen's formula over the
//! full root set, and trapezoid quadrature of `log|P|` on the circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{default_size, evaluate_shifted, EvaluationGrid, DEFAULT_OVERSAMPLE, MAX_GRID};
use crate::poly::CirclePolynomial;
use crate::sum::pairwise_mean_by;

/// Highest degree handed to the root solver.
pub const ROOT_SOLVER_MAX_DEGREE: usize = 512;
/// Floor applied to `log|P|` at grid nodes.
pub const LOG_CLIP: f64 = -50.0;
/// Clip fraction above which a quadrature result is flagged.
pub const LOW_CONFIDENCE_CLIP_FRACTION: f64 = 1e-3;

const ABERTH_MAX_ITER: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MahlerMethod {
    Roots,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MahlerEstimate {
    pub value: f64,
    pub method: MahlerMethod,
    /// Grid size for quadrature, zero for the root route.
    pub grid_m: usize,
    pub clip_count: usize,
    pub low_confidence: bool,
    pub converged: bool,
}

/// Roots of `P` by Aberth–Ehrlich simultaneous iteration.
///
/// Zero low-order coefficients are split off as exact roots at the origin.
/// Steps are computed through the reversed polynomial whenever `|z| > 1`
/// so that Horner never overflows.
pub fn roots(p: &CirclePolynomial) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let c = p.coeffs();
    let low = c.iter().take_while(|x| **x == zero).count();
    let mut out = vec![zero; low.min(p.degree())];
    let a = &c[low.min(c.len() - 1)..];
    let d = a.len() - 1;
    if d == 0 {
        return out;
    }
    if d == 1 {
        out.push(-a[0] / a[1]);
        return out;
    }
    let rev: Vec<Complex64> = a.iter().rev().copied().collect();
    let radius = (a[0].norm() / a[d].norm()).powf(1.0 / d as f64);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; d];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for k in 0..d {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let ratio = newton_ratio(a, &rev, zk);
            let mut s = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    s += (zk - zj).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[k] = zk - step;
            }
            if !step.is_finite() || step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(1e-300) {
                done[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    out.extend(z);
    out
}

/// `p(z)/p'(z)`.
fn newton_ratio(a: &[Complex64], rev: &[Complex64], z: Complex64) -> Complex64 {
    let d = a.len() - 1;
    if z.norm() <= 1.0 {
        let (v, dv) = horner_with_derivative(a, z);
        v / dv
    } else {
        // p(z) = z^d q(1/z) with q the reversed polynomial
        let w = z.inv();
        let (q, dq) = horner_with_derivative(rev, w);
        z * q / (q * d as f64 - w * dq)
    }
}

fn horner_with_derivative(a: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for c in a.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// `|lead| · Π max(1, |root|)`.
pub fn mahler_roots(p: &CirclePolynomial) -> Result<f64> {
    if p.degree() > ROOT_SOLVER_MAX_DEGREE {
        return Err(Error::Capability(format!(
            "degree {} exceeds the root-solver limit {}; use mahler_quadrature",
            p.degree(),
            ROOT_SOLVER_MAX_DEGREE
        )));
    }
    if p.is_zero() {
        return Err(Error::DegenerateInput("Mahler measure of the zero polynomial".into()));
    }
    let lead = p.coeffs()[p.degree()].norm();
    let log_sum: f64 = roots(p).iter().map(|r| r.norm().ln().max(0.0)).sum();
    Ok(lead * log_sum.exp())
}

/// `exp(mean log|P|)` over the nodes of `grid`, with `log|P|` floored at
/// [`LOG_CLIP`].
pub fn mahler_quadrature(p: &CirclePolynomial, grid: &EvaluationGrid) -> Result<MahlerEstimate> {
    if p.is_zero() || grid.values.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::DegenerateInput("all grid values are zero".into()));
    }
    let clip_count = grid
        .values
        .iter()
        .filter(|v| !(v.norm().ln() > LOG_CLIP))
        .count();
    let mean = pairwise_mean_by(&grid.values, |v| {
        let l = v.norm().ln();
        if l > LOG_CLIP {
            l
        } else {
            LOG_CLIP
        }
    });
    Ok(MahlerEstimate {
        value: mean.exp(),
        method: MahlerMethod::Quadrature,
        grid_m: grid.m,
        clip_count,
        low_confidence: clip_count as f64 > LOW_CONFIDENCE_CLIP_FRACTION * grid.m as f64,
        converged: true,
    })
}

/// Quadrature on half-step-shifted grids, doubling `M` until successive
/// values agree to `rel_tol` or `M` reaches [`MAX_GRID`].
///
/// Shifted nodes are primitive `2M`-th roots of unity, so roots of `P` at
/// low-order roots of unity never land on a node.
pub fn mahler_quadrature_converged(p: &CirclePolynomial, rel_tol: f64) -> Result<MahlerEstimate> {
    let mut m = default_size(p.degree(), DEFAULT_OVERSAMPLE);
    let mut prev = mahler_quadrature(p, &evaluate_shifted(p, Some(m), 0.5)?)?;
    while m < MAX_GRID {
        m *= 2;
        let mut next = mahler_quadrature(p, &evaluate_shifted(p, Some(m), 0.5)?)?;
        if (next.value - prev.value).abs() <= rel_tol * next.value {
            next.converged = true;
            return Ok(next);
        }
        prev = next;
    }
    prev.converged = false;
    Ok(prev)
}

/// Roots below the solver limit, converged quadrature above it.
pub fn mahler_measure(p: &CirclePolynomial) -> Result<MahlerEstimate> {
    if p.degree() <= ROOT_SOLVER_MAX_DEGREE {
        Ok(MahlerEstimate {
            value: mahler_roots(p)?,
            method: MahlerMethod::Roots,
            grid_m: 0,
            clip_count: 0,
            low_confidence: false,
            converged: true,
        })
    } else {
        mahler_quadrature_converged(p, 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::evaluate_on_grid;

    fn poly(c: &[f64]) -> CirclePolynomial {
        CirclePolynomial::from_real(c)
    }

    #[test]
    fn roots_examples() {
        assert!((mahler_roots(&poly(&[-2.0, 1.0])).unwrap() - 2.0).abs() < 1e-14);
        assert!((mahler_roots(&poly(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-14);
        // (z - 2)(z - 1/2)
        assert!((mahler_roots(&poly(&[1.0, -2.5, 1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!((mahler_roots(&poly(&[3.0])).unwrap() - 3.0).abs() < 1e-15);
        // z^2 (z - 3) has two roots at the origin
        assert!((mahler_roots(&poly(&[0.0, 0.0, -3.0, 1.0])).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn roots_of_cyclotomic() {
        // z^8 - 1
        let mut c = vec![0.0; 9];
        c[0] = -1.0;
        c[8] = 1.0;
        let r = roots(&poly(&c));
        assert_eq!(r.len(), 8);
        for z in r {
            assert!((z.powu(8) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_reconstruct_polynomial() {
        let mut rng = crate::rng::rng_from_seed(3);
        let p = crate::generators::random_complex(40, &mut rng);
        let r = roots(&p);
        let z = Complex64::from_polar(0.9, 1.3);
        let lead = p.coeffs()[40];
        let prod = r.iter().fold(lead, |acc, ri| acc * (z - ri));
        assert!((prod - p.eval(z)).norm() < 1e-9 * p.eval(z).norm().max(1.0));
    }

    #[test]
    fn quadrature_examples() {
        let g = evaluate_on_grid(&CirclePolynomial::monomial(1), Some(64)).unwrap();
        let m = mahler_quadrature(&CirclePolynomial::monomial(1), &g).unwrap();
        assert!((m.value - 1.0).abs() < 1e-15);
        let p = poly(&[-2.0, 1.0]);
        let g = evaluate_on_grid(&p, Some(4096)).unwrap();
        assert!((mahler_quadrature(&p, &g).unwrap().value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn quadrature_clips_exact_zero() {
        let p = poly(&[1.0, 1.0]);
        let g = evaluate_on_grid(&p, Some(8)).unwrap();
        let m = mahler_quadrature(&p, &g).unwrap();
        assert!(m.value.is_finite());
        // z = -1 is a node; the FFT leaves a rounding residue there at most
        assert!(m.clip_count <= 1);
    }

    #[test]
    fn capability_error_above_threshold() {
        let p = poly(&vec![1.0; ROOT_SOLVER_MAX_DEGREE + 2]);
        assert!(matches!(mahler_roots(&p), Err(Error::Capability(_))));
        assert_eq!(mahler_measure(&p).unwrap().method, MahlerMethod::Quadrature);
    }

    #[test]
    fn routes_agree_on_random_polynomials() {
        let mut rng = crate::rng::rng_from_seed(17);
        for _ in 0..10 {
            let p = crate::generators::random_complex(64, &mut rng);
            let r = mahler_roots(&p).unwrap();
            let q = mahler_quadrature_converged(&p, 1e-12).unwrap().value;
            assert!((r - q).abs() <= 1e-6 * r, "{r} vs {q}");
        }
    }
}
