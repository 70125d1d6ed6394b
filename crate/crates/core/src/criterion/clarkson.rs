//! Clarkson-type inequalities on the circle and the uniform-convexity
//! modulus of `L^p`.
//!
//! All four norms of a check are computed on one shared grid. The uniform
//! measure on the grid nodes is itself a probability space, so the
//! inequalities hold for the discrete norms exactly and the reported slack
//! only carries rounding error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{default_size, evaluate_on_grid, DEFAULT_OVERSAMPLE};
use crate::norm::lp_norm_on_grid;
use crate::poly::CirclePolynomial;

/// Conjugate exponent `x / (x - 1)`.
pub fn conjugate(x: f64) -> f64 {
    x / (x - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClarksonCheck {
    pub p: f64,
    pub r: f64,
    pub s: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub grid_m: usize,
}

struct SharedNorms {
    f: f64,
    g: f64,
    sum: f64,
    diff: f64,
    m: usize,
}

fn shared_norms(f: &CirclePolynomial, g: &CirclePolynomial, p: f64) -> Result<SharedNorms> {
    let d = f.degree().max(g.degree());
    let m = default_size(d, DEFAULT_OVERSAMPLE);
    let gf = evaluate_on_grid(f, Some(m))?;
    let gg = evaluate_on_grid(g, Some(m))?;
    let mut sum = gf.clone();
    let mut diff = gf.clone();
    for ((s, df), v) in sum.values.iter_mut().zip(diff.values.iter_mut()).zip(&gg.values) {
        *s += v;
        *df -= v;
    }
    Ok(SharedNorms {
        f: lp_norm_on_grid(&gf, p),
        g: lp_norm_on_grid(&gg, p),
        sum: lp_norm_on_grid(&sum, p),
        diff: lp_norm_on_grid(&diff, p),
        m,
    })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::param(format!("Clarkson inequalities need 1 < p <= 2, got p = {p}")));
    }
    Ok(())
}

/// `(a^e + b^e)^{1/e}` without overflow for large `e`.
fn power_sum_root(a: f64, b: f64, e: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    m * ((a / m).powf(e) + (b / m).powf(e)).powf(1.0 / e)
}

/// `(||F+G||_p^r + ||F-G||_p^r)^{1/r} <= 2^{1/s'} (||F||_p^s + ||G||_p^s)^{1/s}`
/// for `1 < s <= p <= r`, `r' <= s`, `1 < p <= 2`.
pub fn clarkson_general(
    f: &CirclePolynomial,
    g: &CirclePolynomial,
    p: f64,
    r: f64,
    s: f64,
) -> Result<ClarksonCheck> {
    check_p(p)?;
    if !(s > 1.0) {
        return Err(Error::param(format!("constraint 1 < s violated: s = {s}")));
    }
    if !(s <= p) {
        return Err(Error::param(format!("constraint s <= p violated: s = {s}, p = {p}")));
    }
    if !(p <= r) || !r.is_finite() {
        return Err(Error::param(format!("constraint p <= r violated: p = {p}, r = {r}")));
    }
    let r_conj = conjugate(r);
    // r' <= s, with a few ulps of room for r chosen as exactly s'
    if r_conj > s * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::param(format!("constraint r' <= s violated: r' = {r_conj}, s = {s}")));
    }
    let n = shared_norms(f, g, p)?;
    let lhs = power_sum_root(n.sum, n.diff, r);
    let rhs = 2f64.powf(1.0 / conjugate(s)) * power_sum_root(n.f, n.g, s);
    Ok(ClarksonCheck { p, r, s, lhs, rhs, slack: rhs - lhs, grid_m: n.m })
}

/// `||(F+G)/2||_p^{p'} + ||(F-G)/2||_p^{p'} <= (||F||_p^p / 2 + ||G||_p^p / 2)^{1/(p-1)}`.
pub fn clarkson_classical(f: &CirclePolynomial, g: &CirclePolynomial, p: f64) -> Result<ClarksonCheck> {
    check_p(p)?;
    let q = conjugate(p);
    let n = shared_norms(f, g, p)?;
    // both sides are homogeneous of degree p'; scale before taking powers
    let m = n.f.max(n.g).max(f64::MIN_POSITIVE);
    let scale = m.powf(q);
    let lhs = scale * ((n.sum / (2.0 * m)).powf(q) + (n.diff / (2.0 * m)).powf(q));
    let rhs = scale * (0.5 * (n.f / m).powf(p) + 0.5 * (n.g / m).powf(p)).powf(1.0 / (p - 1.0));
    Ok(ClarksonCheck { p, r: q, s: p, lhs, rhs, slack: rhs - lhs, grid_m: n.m })
}

/// Modulus of uniform convexity of `L^p`:
/// `1 - (1 - (ε/2)^p)^{1/p}` for `p >= 2` and the same with `p'` for `p <= 2`.
pub fn convexity_delta(eps: f64, p: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::param(format!("eps = {eps} must lie in (0, 2]")));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::param(format!("p = {p} must exceed 1")));
    }
    let q = if p >= 2.0 { p } else { conjugate(p) };
    Ok(delta_with_exponent(eps, q))
}

fn delta_with_exponent(eps: f64, q: f64) -> f64 {
    1.0 - (1.0 - (eps / 2.0).powf(q)).powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::random_complex;
    use crate::rng::rng_from_seed;

    fn pair(seed: u64, deg: usize) -> (CirclePolynomial, CirclePolynomial) {
        let mut rng = rng_from_seed(seed);
        (random_complex(deg, &mut rng), random_complex(deg, &mut rng))
    }

    #[test]
    fn equality_when_f_equals_g() {
        let (f, _) = pair(1, 20);
        let c = clarkson_general(&f, &f, 1.5, 3.0, 1.5).unwrap();
        assert!(c.slack.abs() < 1e-12 * c.rhs, "{c:?}");
        let k = clarkson_classical(&f, &f, 1.3).unwrap();
        assert!(k.slack.abs() < 1e-12 * k.rhs);
        let neg = f.scale(num_complex::Complex64::new(-1.0, 0.0));
        let k = clarkson_classical(&f, &neg, 1.7).unwrap();
        assert!(k.slack.abs() < 1e-12 * k.rhs);
    }

    #[test]
    fn zero_g_gives_exponent_monotonicity() {
        let (f, _) = pair(2, 10);
        let zero = CirclePolynomial::from_real(&[0.0]);
        let c = clarkson_general(&f, &zero, 1.5, 3.0, 1.5).unwrap();
        assert!(c.slack >= 0.0);
        // lhs = 2^{1/r} ||F||, rhs = 2^{1/s'} ||F||
        assert!((c.lhs / c.rhs - 2f64.powf(1.0 / 3.0 - 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn random_pairs_hold() {
        for seed in 0..50 {
            let (f, g) = pair(seed, 64);
            let c = clarkson_general(&f, &g, 1.5, 3.0, 1.5).unwrap();
            assert!(c.slack >= -1e-9, "{c:?}");
        }
    }

    #[test]
    fn constraint_violations_are_named() {
        let (f, g) = pair(3, 4);
        let e = clarkson_general(&f, &g, 2.5, 3.0, 1.5).unwrap_err();
        assert!(e.to_string().contains("1 < p <= 2"));
        let e = clarkson_general(&f, &g, 1.5, 3.0, 1.6).unwrap_err();
        assert!(e.to_string().contains("s <= p"));
        let e = clarkson_general(&f, &g, 1.5, 1.4, 1.5).unwrap_err();
        assert!(e.to_string().contains("p <= r"));
        // r = 2 gives r' = 2 > s = 1.5
        let e = clarkson_general(&f, &g, 1.5, 2.0, 1.5).unwrap_err();
        assert!(e.to_string().contains("r' <= s"));
        assert!(clarkson_classical(&f, &g, 1.0).is_err());
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let (f, g) = pair(4, 32);
        // s near 1 forces r >= s' in the hundreds
        let s = 1.004;
        let c = clarkson_general(&f, &g, 1.05, conjugate(s) * 1.5, s).unwrap();
        assert!(c.lhs.is_finite() && c.rhs.is_finite() && c.slack >= -1e-9, "{c:?}");
        assert_eq!(power_sum_root(3.0, 4.0, 2.0), 5.0);
        assert_eq!(power_sum_root(0.0, 0.0, 700.0), 0.0);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(convexity_delta(2.0, 2.0).unwrap(), 1.0);
        assert!(convexity_delta(1e-9, 3.0).unwrap() < 1e-12);
        assert!(convexity_delta(1e-9, 1.5).unwrap() < 1e-12);
        assert_eq!(delta_with_exponent(0.7, 2.0), delta_with_exponent(0.7, conjugate(2.0)));
        assert!(convexity_delta(0.0, 2.0).is_err());
        assert!(convexity_delta(2.5, 2.0).is_err());
        assert!(convexity_delta(1.0, 1.0).is_err());
        for p in [1.2, 1.5, 2.0, 3.0, 6.0] {
            let mut prev = 0.0;
            for k in 1..=20 {
                let d = convexity_delta(k as f64 * 0.1, p).unwrap();
                assert!(d > prev && d <= 1.0);
                prev = d;
            }
        }
    }
}
