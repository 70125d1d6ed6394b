//! Sublevel-set measure bounds for L²-normalized polynomials.
//!
//! With `||F̃||_2 = 1`, `∫(|F̃| - 1)² = 2 - 2||F̃||_1`, so Chebyshev gives
//! `|{|F̃| < 1 - ζ}| <= (2 - 2||F̃||_1)/ζ²`. Conversely, with
//! `a = 1 - ||F̃||_1`, Markov's inequality forces
//! `|{|F̃| < 1 - a/2}| >= (a/2)/(1 - a/2)`.
//!
//! Both sides of each inequality are evaluated on the same grid and compared
//! with slack `2/M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{default_size, evaluate_on_grid, EvaluationGrid, DEFAULT_OVERSAMPLE};
use crate::norm::lp_norm_on_grid;
use crate::poly::CirclePolynomial;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SublevelCheck {
    pub zeta2: f64,
    pub l1: f64,
    pub measure: f64,
    pub chebyshev_bound: f64,
    pub grid_slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub a: f64,
    pub measure: f64,
    pub lower_bound: f64,
    pub grid_slack: f64,
    pub holds: bool,
}

/// Smallest grid used for sublevel fractions.
pub const MIN_MEASURE_GRID: usize = 4096;

fn unit_grid(f: &CirclePolynomial) -> Result<EvaluationGrid> {
    let unit = f.normalized()?;
    let m = default_size(unit.degree(), DEFAULT_OVERSAMPLE).max(MIN_MEASURE_GRID);
    evaluate_on_grid(&unit, Some(m))
}

fn fraction_below(grid: &EvaluationGrid, level: f64) -> f64 {
    grid.values.iter().filter(|v| v.norm() < level).count() as f64 / grid.m as f64
}

pub fn sublevel_bound_check(f: &CirclePolynomial, zeta2: f64) -> Result<SublevelCheck> {
    if !(zeta2 > 0.0 && zeta2 < 1.0) {
        return Err(Error::param(format!("zeta2 = {zeta2} must lie in (0, 1)")));
    }
    let grid = unit_grid(f)?;
    let l1 = lp_norm_on_grid(&grid, 1.0);
    let measure = fraction_below(&grid, 1.0 - zeta2);
    let chebyshev_bound = ((2.0 - 2.0 * l1) / (zeta2 * zeta2)).max(0.0);
    let grid_slack = 2.0 / grid.m as f64;
    Ok(SublevelCheck {
        zeta2,
        l1,
        measure,
        chebyshev_bound,
        grid_slack,
        holds: measure <= chebyshev_bound + grid_slack,
    })
}

pub fn markov_bound_check(f: &CirclePolynomial) -> Result<MarkovCheck> {
    let grid = unit_grid(f)?;
    let l1 = lp_norm_on_grid(&grid, 1.0);
    if l1 >= 1.0 - 1e-12 {
        return Err(Error::NotApplicable(format!(
            "||F||_1 = {l1} is not below 1, so a = 1 - ||F||_1 is not positive"
        )));
    }
    let a = 1.0 - l1;
    let measure = fraction_below(&grid, 1.0 - a / 2.0);
    let lower_bound = (a / 2.0) / (1.0 - a / 2.0);
    let grid_slack = 2.0 / grid.m as f64;
    Ok(MarkovCheck {
        a,
        measure,
        lower_bound,
        grid_slack,
        holds: measure > lower_bound - grid_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gauss_fresnel, gen_littlewood};
    use std::f64::consts::PI;

    #[test]
    fn monomial_cases() {
        let z = CirclePolynomial::monomial(1);
        for zeta in [0.01, 0.3, 0.9] {
            let c = sublevel_bound_check(&z, zeta).unwrap();
            assert_eq!(c.measure, 0.0);
            assert!(c.holds);
        }
        assert!(matches!(markov_bound_check(&z), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn one_plus_z_markov() {
        let p = CirclePolynomial::from_real(&[1.0, 1.0]);
        let c = markov_bound_check(&p).unwrap();
        // ||F̃||_1 = (2/π)·√2
        let l1 = 2.0 * 2f64.sqrt() / PI;
        assert!((c.a - (1.0 - l1)).abs() < 1e-3);
        assert!(c.holds);
    }

    #[test]
    fn gauss_fresnel_sublevel() {
        let p = gen_gauss_fresnel(1024, false).unwrap();
        let c = sublevel_bound_check(&p, 0.2).unwrap();
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn littlewood_suite() {
        for seed in 0..20 {
            let p = gen_littlewood(256, seed, false).unwrap();
            assert!(markov_bound_check(&p).unwrap().holds);
            assert!(sublevel_bound_check(&p, 0.3).unwrap().holds);
        }
    }

    #[test]
    fn zeta_range() {
        let p = CirclePolynomial::monomial(0);
        assert!(sublevel_bound_check(&p, 0.0).is_err());
        assert!(sublevel_bound_check(&p, 1.0).is_err());
        assert_eq!(sublevel_bound_check(&CirclePolynomial::from_real(&[0.0]), 0.5).unwrap_err(), Error::ZeroPolynomial);
    }
}
