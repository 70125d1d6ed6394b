//! Generalized Riesz products built from L²-normalized factors.
//!
//! Factor `j` enters as `P_j(z^{N_j})`. Spacings follow the doubling rule
//! `N_1 = 1`, `N_{j+1} = 2 Σ_{i<=j} N_i deg P_i + 1`: the spectrum of the
//! partial product `|Π_{i<=j} P_i(z^{N_i})|²` lies in `[-S_j, S_j]` with
//! `S_j = Σ_{i<=j} N_i deg P_i`, and every nonzero frequency contributed by
//! the next factor is at least `N_{j+1} > 2 S_j` away. Fourier coefficients
//! inside `[-S_j, S_j]` therefore never change again, and the constant
//! term stays 1.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::gen_gauss_fresnel;
use crate::mahler::{mahler_quadrature_converged, mahler_roots};
use crate::norm::{l4_pow4_autocorrelation, lp_norm, REL_TOL};
use crate::poly::CirclePolynomial;

/// Largest partial-product degree [`RieszPlan::extend`] will build.
pub const MAX_PARTIAL_DEGREE: usize = 1_000_000;
/// Largest number of choice tuples [`dissociated_check`] will enumerate.
pub const MAX_TUPLES: u64 = 10_000_000;

const UNIT_NORM_TOL: f64 = 1e-12;
const PARTIAL_NORM_TOL: f64 = 1e-10;

pub fn dissociation_spacings(degrees: &[usize]) -> Result<Vec<usize>> {
    if degrees.is_empty() {
        return Err(Error::param("need at least one factor degree"));
    }
    let mut spacings = Vec::with_capacity(degrees.len());
    let mut spread: usize = 0;
    for (j, &d) in degrees.iter().enumerate() {
        let n = if j == 0 { 1 } else { 2 * spread + 1 };
        spacings.push(n);
        spread = n
            .checked_mul(d)
            .and_then(|x| x.checked_add(spread))
            .ok_or_else(|| Error::Capability("spacing overflow".into()))?;
    }
    Ok(spacings)
}

/// True iff every choice of one support exponent per factor gives a
/// distinct exponent sum `Σ N_j e_j`.
pub fn dissociated_check(factors: &[CirclePolynomial], spacings: &[usize]) -> Result<bool> {
    if factors.len() != spacings.len() {
        return Err(Error::param(format!(
            "{} factors but {} spacings",
            factors.len(),
            spacings.len()
        )));
    }
    let supports: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
                .map(|(e, _)| e)
                .collect()
        })
        .collect();
    let tuples = supports
        .iter()
        .try_fold(1u64, |acc, s| acc.checked_mul(s.len() as u64))
        .unwrap_or(u64::MAX);
    if tuples > MAX_TUPLES {
        return Err(Error::Capability(format!(
            "{tuples} choice tuples exceed the enumeration cap {MAX_TUPLES}"
        )));
    }
    let mut sums: Vec<u64> = vec![0];
    for (s, &n) in supports.iter().zip(spacings) {
        sums = sums
            .iter()
            .flat_map(|&acc| s.iter().map(move |&e| acc + (n * e) as u64))
            .collect();
    }
    let total = sums.len();
    sums.sort_unstable();
    sums.dedup();
    Ok(sums.len() == total)
}

/// Partial product `Π_{j<=k} P_j(z^{N_j})` with its factors and spacings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszPlan {
    pub factors: Vec<CirclePolynomial>,
    pub spacings: Vec<usize>,
    pub partial: CirclePolynomial,
}

/// Exported plan state. The partial product is rebuilt from the factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanState {
    pub depth: usize,
    pub spacings: Vec<usize>,
    pub factors: Vec<CirclePolynomial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub depth: usize,
    pub spacings: Vec<usize>,
    pub factor_degrees: Vec<usize>,
    pub partial_degree: usize,
    pub partial_support: usize,
    pub partial_l2_sq: f64,
}

impl Default for RieszPlan {
    fn default() -> Self {
        Self::new()
    }
}

impl RieszPlan {
    pub fn new() -> Self {
        Self {
            factors: Vec::new(),
            spacings: Vec::new(),
            partial: CirclePolynomial::constant(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn from_factors(factors: impl IntoIterator<Item = CirclePolynomial>) -> Result<Self> {
        factors.into_iter().try_fold(Self::new(), |plan, f| plan.extend(f))
    }

    pub fn depth(&self) -> usize {
        self.factors.len()
    }

    /// `Σ N_j deg P_j`, the largest exponent of the partial product.
    pub fn spread(&self) -> usize {
        self.factors.iter().zip(&self.spacings).map(|(f, n)| n * f.degree()).sum()
    }

    pub fn extend(&self, next: CirclePolynomial) -> Result<Self> {
        let norm = next.l2_norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::param(format!("factor has L2 norm {norm}, expected 1")));
        }
        let spacing = if self.factors.is_empty() { 1 } else { 2 * self.spread() + 1 };
        let degree = self.partial.degree() + spacing * next.degree();
        if degree > MAX_PARTIAL_DEGREE {
            return Err(Error::Capability(format!(
                "partial product degree {degree} exceeds cap {MAX_PARTIAL_DEGREE}"
            )));
        }
        let partial = self.partial.multiply(&next.substitute_power(spacing)?);
        let l2 = partial.l2_norm_sq();
        if (l2 - 1.0).abs() > PARTIAL_NORM_TOL {
            return Err(Error::Inconsistent(format!("partial product integrates |.|^2 to {l2}")));
        }
        let mut factors = self.factors.clone();
        factors.push(next);
        let mut spacings = self.spacings.clone();
        spacings.push(spacing);
        Ok(Self { factors, spacings, partial })
    }

    /// Plan truncated to its first `depth` factors.
    pub fn prefix(&self, depth: usize) -> Result<Self> {
        Self::from_factors(self.factors[..depth].iter().cloned())
    }

    pub fn state(&self) -> PlanState {
        PlanState { depth: self.depth(), spacings: self.spacings.clone(), factors: self.factors.clone() }
    }

    /// Rebuild a plan from exported state, checking the recorded spacings.
    pub fn from_state(state: &PlanState) -> Result<Self> {
        let plan = Self::from_factors(state.factors.iter().cloned())?;
        if plan.spacings != state.spacings || plan.depth() != state.depth {
            return Err(Error::Inconsistent("exported spacings do not follow the spacing rule".into()));
        }
        Ok(plan)
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            depth: self.depth(),
            spacings: self.spacings.clone(),
            factor_degrees: self.factors.iter().map(|f| f.degree()).collect(),
            partial_degree: self.partial.degree(),
            partial_support: self.partial.support_size(),
            partial_l2_sq: self.partial.l2_norm_sq(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub k: i64,
    /// Depth (1-based) where the coefficient first became nonzero.
    pub first_nonzero_depth: Option<usize>,
    pub value: Complex64,
    /// Largest change after the first nonzero depth.
    pub max_drift: f64,
    pub stable: bool,
}

/// Coefficients below this modulus count as zero.
pub const ZERO_COEFF_TOL: f64 = 1e-9;
/// Allowed drift of a coefficient once it is nonzero.
pub const STABILITY_TOL: f64 = 1e-10;

/// `|partial|²` Fourier coefficients at every depth `1..=plan.depth()`.
fn spectra_by_depth(plan: &RieszPlan) -> Result<Vec<(usize, Vec<Complex64>)>> {
    (1..=plan.depth())
        .map(|d| {
            let p = plan.prefix(d)?;
            Ok((p.partial.degree(), p.partial.squared_modulus_coeffs()))
        })
        .collect()
}

fn coeff_at(spec: &(usize, Vec<Complex64>), k: i64) -> Complex64 {
    let (deg, c) = spec;
    let deg = *deg as i64;
    if k.abs() > deg {
        Complex64::new(0.0, 0.0)
    } else {
        c[(k + deg) as usize]
    }
}

fn stability_of(spectra: &[(usize, Vec<Complex64>)], k: i64) -> StabilityRecord {
    let mut first = None;
    let mut value = Complex64::new(0.0, 0.0);
    let mut drift: f64 = 0.0;
    for (i, s) in spectra.iter().enumerate() {
        let v = coeff_at(s, k);
        match first {
            None if v.norm() > ZERO_COEFF_TOL => {
                first = Some(i + 1);
                value = v;
            }
            None => {}
            Some(_) => drift = drift.max((v - value).norm()),
        }
    }
    if first.is_none() {
        value = coeff_at(spectra.last().unwrap(), k);
    }
    StabilityRecord { k, first_nonzero_depth: first, value, max_drift: drift, stable: drift <= STABILITY_TOL }
}

/// Track the `k`-th Fourier coefficient of `|partial|²` across depths.
pub fn coefficient_stability(plan: &RieszPlan, k: i64) -> Result<StabilityRecord> {
    if plan.depth() == 0 {
        return Err(Error::param("plan depth must be at least 1"));
    }
    Ok(stability_of(&spectra_by_depth(plan)?, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySweep {
    pub exponents_checked: usize,
    pub unstable: Vec<i64>,
    pub max_drift: f64,
}

/// Stability of every exponent in `[-spread, spread]`.
pub fn coefficient_stability_all(plan: &RieszPlan) -> Result<StabilitySweep> {
    if plan.depth() == 0 {
        return Err(Error::param("plan depth must be at least 1"));
    }
    let spectra = spectra_by_depth(plan)?;
    let s = plan.spread() as i64;
    let records: Vec<StabilityRecord> = (-s..=s).into_par_iter().map(|k| stability_of(&spectra, k)).collect();
    Ok(StabilitySweep {
        exponents_checked: records.len(),
        unstable: records.iter().filter(|r| !r.stable).map(|r| r.k).collect(),
        max_drift: records.iter().map(|r| r.max_drift).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanMahler {
    /// `Π_j M(P_j)²`.
    pub product_formula: f64,
    /// `exp ∫ log |partial|² dz` by quadrature.
    pub direct: f64,
    pub abs_diff: f64,
    pub grid_m: usize,
    pub converged: bool,
}

pub fn mahler_of_plan(plan: &RieszPlan) -> Result<PlanMahler> {
    if plan.depth() == 0 {
        return Err(Error::param("plan depth must be at least 1"));
    }
    let product_formula = plan
        .factors
        .iter()
        .map(|f| mahler_roots(f).map(|m| m * m))
        .product::<Result<f64>>()?;
    let q = mahler_quadrature_converged(&plan.partial, REL_TOL)?;
    let direct = q.value * q.value;
    Ok(PlanMahler {
        product_formula,
        direct,
        abs_diff: (product_formula - direct).abs(),
        grid_m: q.grid_m,
        converged: q.converged,
    })
}

/// One row of the Gauss–Fresnel pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoRow {
    pub n: usize,
    /// `||P_n||_4^4 / n²` for the unnormalized polynomial.
    pub l4_ratio: f64,
    /// `||P̃_n||_1`.
    pub l1: f64,
    /// `|| |P̃_n| - 1 ||_2² = 2 - 2||P̃_n||_1`.
    pub flat2: f64,
    /// `M(P̃_n)`.
    pub mahler: f64,
}

impl DemoRow {
    pub const CSV_HEADER: &'static str = "n,l4_ratio,l1,flat2,mahler";

    pub fn csv(&self) -> String {
        format!("{},{},{},{},{}", self.n, self.l4_ratio, self.l1, self.flat2, self.mahler)
    }
}

/// L⁴, L¹ and Mahler measure of Gauss–Fresnel polynomials. Mahler
/// measure uses converged quadrature throughout so rows are comparable.
pub fn gauss_fresnel_mahler_demo(n_list: &[usize]) -> Result<Vec<DemoRow>> {
    n_list
        .par_iter()
        .map(|&n| {
            let p = gen_gauss_fresnel(n, false)?;
            let nf = n as f64;
            let l4_ratio = l4_pow4_autocorrelation(&p) / (nf * nf);
            let unit = p.normalized()?;
            let l1 = lp_norm(&unit, 1.0, None)?;
            let mahler = mahler_quadrature_converged(&unit, REL_TOL)?.value;
            Ok(DemoRow { n, l4_ratio, l1, flat2: 2.0 - 2.0 * l1, mahler })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(c: &[f64]) -> CirclePolynomial {
        CirclePolynomial::from_real(c).normalized().unwrap()
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(dissociation_spacings(&[1, 1]).unwrap(), vec![1, 3]);
        assert_eq!(dissociation_spacings(&[1]).unwrap(), vec![1]);
        assert_eq!(dissociation_spacings(&[2, 2]).unwrap(), vec![1, 5]);
        assert!(dissociation_spacings(&[]).is_err());
    }

    #[test]
    fn dissociation_examples() {
        let p = CirclePolynomial::from_real(&[1.0, 1.0]);
        assert!(dissociated_check(&[p.clone(), p.clone()], &[1, 3]).unwrap());
        assert!(!dissociated_check(&[p.clone(), p.clone()], &[1, 1]).unwrap());
        assert!(dissociated_check(&[p.clone(), p.clone()], &[1, 2]).unwrap());
        assert!(dissociated_check(std::slice::from_ref(&p), &[1, 2]).is_err());
    }

    #[test]
    fn empty_plan_extension() {
        let f = unit(&[1.0, -2.0, 0.5]);
        let plan = RieszPlan::new().extend(f.clone()).unwrap();
        assert_eq!(plan.partial, f);
        assert!((plan.partial.l2_norm_sq() - 1.0).abs() < 1e-12);
        assert!(RieszPlan::new().extend(CirclePolynomial::from_real(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn extension_spacings_follow_rule() {
        let plan = RieszPlan::from_factors([unit(&[1.0, 1.0]), unit(&[1.0, 1.0]), unit(&[1.0, 0.0, 1.0])]).unwrap();
        assert_eq!(plan.spacings, dissociation_spacings(&[1, 1, 2]).unwrap());
        assert!(dissociated_check(&plan.factors, &plan.spacings).unwrap());
    }

    #[test]
    fn state_round_trip() {
        let plan = RieszPlan::from_factors([unit(&[1.0, 2.0]), unit(&[3.0, 0.0, 1.0])]).unwrap();
        let json = serde_json::to_string(&plan.state()).unwrap();
        let back: PlanState = serde_json::from_str(&json).unwrap();
        assert_eq!(RieszPlan::from_state(&back).unwrap(), plan);
        let mut bad = plan.state();
        bad.spacings[1] = 4;
        assert!(RieszPlan::from_state(&bad).is_err());
    }

    #[test]
    fn stability_trivial_cases() {
        let plan = RieszPlan::from_factors([unit(&[1.0, 1.0]), unit(&[1.0, -1.0, 2.0])]).unwrap();
        let r0 = coefficient_stability(&plan, 0).unwrap();
        assert_eq!(r0.first_nonzero_depth, Some(1));
        assert!((r0.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(r0.stable);
        let far = coefficient_stability(&plan, plan.spread() as i64 + 5).unwrap();
        assert_eq!(far.first_nonzero_depth, None);
        let all = coefficient_stability_all(&plan).unwrap();
        assert!(all.unstable.is_empty());
        assert_eq!(all.exponents_checked, 2 * plan.spread() + 1);
    }

    #[test]
    fn mahler_of_monomial_plan() {
        let plan = RieszPlan::from_factors([CirclePolynomial::monomial(1)]).unwrap();
        let m = mahler_of_plan(&plan).unwrap();
        assert!((m.product_formula - 1.0).abs() < 1e-14);
        assert!((m.direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mahler_of_one_plus_z_plans() {
        for depth in 1..=3 {
            let plan = RieszPlan::from_factors(vec![unit(&[1.0, 1.0]); depth]).unwrap();
            let m = mahler_of_plan(&plan).unwrap();
            let expected = 0.5f64.powi(depth as i32);
            assert!((m.product_formula - expected).abs() < 1e-14);
            // roots on the circle slow the quadrature down
            assert!(m.abs_diff <= 1e-4 * m.product_formula, "{m:?}");
        }
    }

    #[test]
    fn mahler_of_random_plan() {
        let mut rng = crate::rng::rng_from_seed(7);
        let factors: Vec<_> = [8, 5, 8]
            .iter()
            .map(|&d| crate::generators::random_complex(d, &mut rng).normalized().unwrap())
            .collect();
        let plan = RieszPlan::from_factors(factors).unwrap();
        let m = mahler_of_plan(&plan).unwrap();
        assert!(m.abs_diff <= 1e-6 * m.product_formula, "{m:?}");
    }

    #[test]
    fn demo_single_term() {
        let rows = gauss_fresnel_mahler_demo(&[1]).unwrap();
        let r = &rows[0];
        assert!((r.l4_ratio - 1.0).abs() < 1e-15);
        assert!((r.l1 - 1.0).abs() < 1e-15);
        assert!((r.mahler - 1.0).abs() < 1e-15);
        assert!(r.flat2.abs() < 1e-14);
    }
}
