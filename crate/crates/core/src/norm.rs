//! Norms and flatness metrics on the unit circle.
//!
//! All integrals against the normalized Lebesgue measure are trapezoid sums
//! over an [`EvaluationGrid`]. For `|P|^α` with `α` not an even integer the
//! integrand is only piecewise smooth near zeros of `P`, so the adaptive
//! entry points double `M` until successive values agree to [`REL_TOL`]
//! (capped at [`MAX_GRID`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{default_size, evaluate_on_grid, EvaluationGrid, DEFAULT_OVERSAMPLE, MAX_GRID, MIN_OVERSAMPLE};
use crate::mahler::{mahler_measure, MahlerMethod};
use crate::poly::CirclePolynomial;
use crate::sum::pairwise_mean_by;

/// Relative agreement required between successive grid doublings.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor on the doubling test, for integrals that are themselves tiny.
pub const ABS_TOL: f64 = 1e-14;

const GOLDEN_ITERS: usize = 100;

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::param(format!("alpha = {alpha} must be a positive real")));
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_TOL
}

/// `(mean_t |v_t|^α)^{1/α}` over the grid.
pub fn lp_norm_on_grid(grid: &EvaluationGrid, alpha: f64) -> f64 {
    if alpha == 2.0 {
        return pairwise_mean_by(&grid.values, |v| v.norm_sqr()).sqrt();
    }
    pairwise_mean_by(&grid.values, |v| v.norm().powf(alpha)).powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Converged {
    pub value: f64,
    pub grid_m: usize,
    pub converged: bool,
}

/// `||P||_α`. With a grid the trapezoid sum on that grid is returned as is.
/// Without one, `α = 2` uses Parseval and other exponents use grid doubling.
pub fn lp_norm(p: &CirclePolynomial, alpha: f64, grid: Option<&EvaluationGrid>) -> Result<f64> {
    check_alpha(alpha)?;
    match grid {
        Some(g) => Ok(lp_norm_on_grid(g, alpha)),
        None if alpha == 2.0 => Ok(p.l2_norm()),
        None => Ok(lp_norm_adaptive(p, alpha, DEFAULT_OVERSAMPLE)?.value),
    }
}

pub fn lp_norm_adaptive(p: &CirclePolynomial, alpha: f64, oversample: usize) -> Result<Converged> {
    check_alpha(alpha)?;
    let mut m = default_size(p.degree(), oversample.max(MIN_OVERSAMPLE));
    let mut prev = lp_norm_on_grid(&evaluate_on_grid(p, Some(m))?, alpha);
    // even integer powers of |P| are trigonometric polynomials of degree (α/2)·d
    if alpha.fract() == 0.0 && (alpha as usize).is_multiple_of(2) && m > (alpha as usize) * p.degree() {
        return Ok(Converged { value: prev, grid_m: m, converged: true });
    }
    while m < MAX_GRID {
        m *= 2;
        let next = lp_norm_on_grid(&evaluate_on_grid(p, Some(m))?, alpha);
        if close(prev, next) {
            return Ok(Converged { value: next, grid_m: m, converged: true });
        }
        prev = next;
    }
    Ok(Converged { value: prev, grid_m: m, converged: false })
}

/// `||P||_4` from the autocorrelations: `||P||_4^4 = Σ_k |γ_k|²` over all
/// lags, negative lags included.
pub fn l4_norm_autocorrelation(p: &CirclePolynomial) -> f64 {
    l4_pow4_autocorrelation(p).powf(0.25)
}

pub fn l4_pow4_autocorrelation(p: &CirclePolynomial) -> f64 {
    let g = p.autocorrelation();
    let side: Vec<f64> = g[1..].iter().map(|c| c.norm_sqr()).collect();
    g[0].norm_sqr() + 2.0 * crate::sum::pairwise_sum(&side)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumEstimate {
    pub value: f64,
    /// Angle in `[0, 2π)` where the value is attained.
    pub angle: f64,
    /// Best raw grid sample before refinement.
    pub grid_value: f64,
    pub grid_m: usize,
}

fn modulus_at(p: &CirclePolynomial, theta: f64) -> f64 {
    p.eval(Complex64::from_polar(1.0, theta)).norm()
}

/// Golden-section search for the extremum of `sign · |P(e^{iθ})|` on `[lo, hi]`.
fn golden(p: &CirclePolynomial, lo: f64, hi: f64, sign: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = sign * modulus_at(p, c);
    let mut fd = sign * modulus_at(p, d);
    for _ in 0..GOLDEN_ITERS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * modulus_at(p, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * modulus_at(p, d);
        }
    }
    if fc > fd {
        (c, sign * fc)
    } else {
        (d, sign * fd)
    }
}

fn refine_extremum(p: &CirclePolynomial, grid: &EvaluationGrid, sign: f64) -> ExtremumEstimate {
    let (t_best, v_best) = grid
        .values
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(bt, bv), (t, v)| {
            if sign * v > bv {
                (t, sign * v)
            } else {
                (bt, bv)
            }
        });
    let grid_value = sign * v_best;
    let h = 2.0 * PI / grid.m as f64;
    let center = grid.angle(t_best);
    let (theta, refined) = golden(p, center - h, center + h, sign);
    let (value, angle) = if sign * refined > sign * grid_value {
        (refined, theta)
    } else {
        (grid_value, center)
    };
    ExtremumEstimate {
        value,
        angle: angle.rem_euclid(2.0 * PI),
        grid_value,
        grid_m: grid.m,
    }
}

/// Refined lower bound for `sup |P|` on the circle: best grid sample, then
/// golden-section search over the two neighbouring grid cells.
pub fn sup_norm(p: &CirclePolynomial, grid: &EvaluationGrid) -> ExtremumEstimate {
    refine_extremum(p, grid, 1.0)
}

/// Refined upper bound for `min |P|` on the circle.
pub fn inf_modulus(p: &CirclePolynomial, grid: &EvaluationGrid) -> ExtremumEstimate {
    refine_extremum(p, grid, -1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureDeviation {
    pub eps: f64,
    pub fraction: f64,
}

/// Every flatness metric of `P̃ = P/||P||_2` at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub alpha: f64,
    /// `||P||_α / ||P||_2`.
    pub lp_ratio: f64,
    /// `∫ ||P̃| - 1|^α dz`.
    pub flatness_distance: f64,
    /// `sup ||P̃| - 1|` from refined grid extrema.
    pub sup_deviation: f64,
    /// Fraction of grid nodes with `||P̃| - 1| > ε`, one entry per ε.
    pub measure_deviation: Vec<MeasureDeviation>,
    pub mahler: f64,
    pub mahler_method: MahlerMethod,
    pub mahler_low_confidence: bool,
    pub grid_m: usize,
    pub oversample: usize,
    pub converged: bool,
}

impl FlatnessReport {
    pub fn csv_header(&self) -> String {
        let mut h = String::from("alpha,lp_ratio,flatness_distance,sup_deviation,mahler,grid_m,converged");
        for m in &self.measure_deviation {
            h.push_str(&format!(",measure_eps_{}", m.eps));
        }
        h
    }

    pub fn csv_row(&self) -> String {
        let mut r = format!(
            "{},{},{},{},{},{},{}",
            self.alpha,
            self.lp_ratio,
            self.flatness_distance,
            self.sup_deviation,
            self.mahler,
            self.grid_m,
            self.converged
        );
        for m in &self.measure_deviation {
            r.push_str(&format!(",{}", m.fraction));
        }
        r
    }
}

pub const DEFAULT_EPS_LADDER: [f64; 4] = [0.01, 0.05, 0.1, 0.25];

pub fn flatness_report(p: &CirclePolynomial, alpha: f64, eps_ladder: &[f64]) -> Result<FlatnessReport> {
    flatness_report_with(p, alpha, eps_ladder, DEFAULT_OVERSAMPLE)
}

pub fn flatness_report_with(
    p: &CirclePolynomial,
    alpha: f64,
    eps_ladder: &[f64],
    oversample: usize,
) -> Result<FlatnessReport> {
    check_alpha(alpha)?;
    if let Some(e) = eps_ladder.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::param(format!("eps ladder entries must be nonnegative, got {e}")));
    }
    let unit = p.normalized()?;
    let oversample = oversample.max(MIN_OVERSAMPLE);
    let metrics = |g: &EvaluationGrid| {
        let lp = lp_norm_on_grid(g, alpha);
        let fd = pairwise_mean_by(&g.values, |v| (v.norm() - 1.0).abs().powf(alpha));
        (lp, fd)
    };
    let mut m = default_size(unit.degree(), oversample);
    let mut grid = evaluate_on_grid(&unit, Some(m))?;
    let mut cur = metrics(&grid);
    let mut converged = false;
    while m < MAX_GRID {
        let next_grid = evaluate_on_grid(&unit, Some(2 * m))?;
        let next = metrics(&next_grid);
        m *= 2;
        grid = next_grid;
        let done = close(cur.0, next.0) && close(cur.1, next.1);
        cur = next;
        if done {
            converged = true;
            break;
        }
    }
    let sup = sup_norm(&unit, &grid).value;
    let inf = inf_modulus(&unit, &grid).value;
    let sup_deviation = (sup - 1.0).max(1.0 - inf).max(0.0);
    let measure_deviation = eps_ladder
        .iter()
        .map(|&eps| {
            let count = grid.values.iter().filter(|v| (v.norm() - 1.0).abs() > eps).count();
            MeasureDeviation { eps, fraction: count as f64 / grid.m as f64 }
        })
        .collect();
    let mahler = mahler_measure(&unit)?;
    Ok(FlatnessReport {
        alpha,
        lp_ratio: cur.0,
        flatness_distance: cur.1,
        sup_deviation,
        measure_deviation,
        mahler: mahler.value,
        mahler_method: mahler.method,
        mahler_low_confidence: mahler.low_confidence,
        grid_m: grid.m,
        oversample,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_blaschke, gen_littlewood};

    fn poly(c: &[f64]) -> CirclePolynomial {
        CirclePolynomial::from_real(c)
    }

    #[test]
    fn lp_examples() {
        let p = poly(&[1.0, 1.0]);
        assert!((lp_norm(&p, 2.0, None).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        // γ = (2, 1): 4 + 1 + 1 = 6
        assert!((l4_norm_autocorrelation(&p) - 6f64.powf(0.25)).abs() < 1e-15);
        assert!((lp_norm(&p, 4.0, None).unwrap() - 6f64.powf(0.25)).abs() < 1e-14);
        let c = poly(&[-3.0]);
        for a in [0.5, 1.0, 3.0, 7.5] {
            assert!((lp_norm(&c, a, None).unwrap() - 3.0).abs() < 1e-14);
        }
        assert!(lp_norm(&p, 0.0, None).is_err());
        assert!(lp_norm(&p, -1.0, None).is_err());
    }

    #[test]
    fn l1_of_one_plus_z_matches_closed_form() {
        // ∫|1 + e^{iθ}| = ∫ 2|cos(θ/2)| = 4/π
        let v = lp_norm(&poly(&[1.0, 1.0]), 1.0, None).unwrap();
        assert!((v - 4.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn sup_examples() {
        let m = CirclePolynomial::monomial(1);
        let g = evaluate_on_grid(&m, None).unwrap();
        assert!((sup_norm(&m, &g).value - 1.0).abs() < 1e-15);
        let p = poly(&[1.0, 1.0]);
        let s = sup_norm(&p, &evaluate_on_grid(&p, None).unwrap());
        assert!((s.value - 2.0).abs() < 1e-15);
        assert!(s.angle.abs() < 1e-12 || (s.angle - 2.0 * PI).abs() < 1e-12);
        let q = poly(&[1.0, -1.0]);
        let s = sup_norm(&q, &evaluate_on_grid(&q, None).unwrap());
        assert!((s.value - 2.0).abs() < 1e-15);
        assert!((s.angle - PI).abs() < 1e-9);
    }

    #[test]
    fn sup_refinement_improves_off_grid_peak() {
        // peak of |1 + e^{i(θ - 0.3)}| sits off every dyadic node
        let p = CirclePolynomial::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, -0.3),
        ]);
        let g = evaluate_on_grid(&p, Some(8)).unwrap();
        let s = sup_norm(&p, &g);
        assert!(s.grid_value < 2.0 - 1e-3);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.angle - 0.3).abs() < 1e-6);
    }

    #[test]
    fn report_for_monomial_is_perfectly_flat() {
        let r = flatness_report(&CirclePolynomial::monomial(1), 1.0, &[0.0, 0.1]).unwrap();
        assert!(r.flatness_distance < 1e-15);
        assert!(r.sup_deviation < 1e-15);
        assert!(r.measure_deviation.iter().all(|m| m.fraction == 0.0));
        assert!((r.mahler - 1.0).abs() < 1e-15);
        assert!((r.lp_ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn report_rejects_zero() {
        assert_eq!(flatness_report(&poly(&[0.0]), 1.0, &[]).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn blaschke_sup_deviation_bound() {
        let a: f64 = 0.5;
        let p = gen_blaschke(20, a).unwrap();
        let r = flatness_report(&p, 1.0, &DEFAULT_EPS_LADDER).unwrap();
        assert!(r.sup_deviation <= 1.5 * a.powi(18) + 1e-9, "{}", r.sup_deviation);
    }

    #[test]
    fn littlewood_l1_ratio_below_one() {
        let p = gen_littlewood(1024, 42, false).unwrap();
        let r = flatness_report(&p, 1.0, &DEFAULT_EPS_LADDER).unwrap();
        assert!(r.lp_ratio < 1.0);
        assert!(r.converged);
    }

    #[test]
    fn measure_deviation_is_monotone() {
        let p = gen_littlewood(200, 3, false).unwrap();
        let eps: Vec<f64> = (0..20).map(|k| k as f64 * 0.1).collect();
        let r = flatness_report(&p, 1.5, &eps).unwrap();
        for w in r.measure_deviation.windows(2) {
            assert!(w[1].fraction <= w[0].fraction);
        }
    }

    #[test]
    fn csv_row_has_header_arity() {
        let r = flatness_report(&poly(&[1.0, 2.0]), 3.0, &[0.1, 0.2]).unwrap();
        assert_eq!(r.csv_header().split(',').count(), r.csv_row().split(',').count());
    }
}
