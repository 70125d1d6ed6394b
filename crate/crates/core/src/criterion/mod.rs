//! Littlewood's coefficient criterion and empirical gap probes.
//!
//! For coefficient magnitudes `a_1..a_n` (one-based weights) the criterion
//! `Σ a_m² <= (K/n²) Σ m² a_m²` holds exactly for `K >= K_min` with
//! `K_min = n² Σ a_m² / Σ m² a_m²`. Stored polynomials are zero-based, so
//! exponent `j` carries weight `(j + 1)²`; multiplying by `z` leaves `|P|`
//! unchanged on the circle, so the shift is harmless.

pub mod clarkson;
pub mod measure;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::norm::{check_alpha, lp_norm};
use crate::poly::CirclePolynomial;
use crate::rng::derive_seed;
use crate::sum::pairwise_sum;

pub use clarkson::{clarkson_classical, clarkson_general, conjugate, convexity_delta, ClarksonCheck};
pub use measure::{markov_bound_check, sublevel_bound_check, MarkovCheck, SublevelCheck};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub n: usize,
    pub k_min: f64,
    #[serde(default)]
    pub family_tag: String,
}

impl CriterionReport {
    pub fn satisfied_at(&self, k: f64) -> bool {
        self.k_min <= k
    }
}

/// `K_min = n² Σ a_m² / Σ m² a_m²` with `m = 1..n`.
pub fn minimal_k(magnitudes: &[f64]) -> Result<CriterionReport> {
    if magnitudes.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
        return Err(Error::param("magnitudes must be finite and nonnegative"));
    }
    if magnitudes.iter().all(|&a| a == 0.0) {
        return Err(Error::DegenerateInput("all magnitudes are zero".into()));
    }
    let n = magnitudes.len();
    // scale out the largest magnitude so squares neither overflow nor underflow
    let top = magnitudes.iter().copied().fold(0.0, f64::max);
    let sq: Vec<f64> = magnitudes.iter().map(|a| (a / top) * (a / top)).collect();
    let weighted: Vec<f64> = sq
        .iter()
        .enumerate()
        .map(|(i, s)| ((i + 1) as f64) * ((i + 1) as f64) * s)
        .collect();
    let nf = n as f64;
    Ok(CriterionReport {
        n,
        k_min: nf * nf * pairwise_sum(&sq) / pairwise_sum(&weighted),
        family_tag: String::new(),
    })
}

pub fn minimal_k_of(p: &CirclePolynomial) -> Result<CriterionReport> {
    let mags: Vec<f64> = p.coeffs().iter().map(|c| c.norm()).collect();
    minimal_k(&mags)
}

/// `6n² / ((n + 1)(2n + 1))`, the value of `K_min` for any unit-modulus
/// coefficient sequence.
pub fn unimodular_k_min(n: usize) -> f64 {
    let n = n as f64;
    6.0 * n * n / ((n + 1.0) * (2.0 * n + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Below2,
    Above2,
}

impl Side {
    pub fn of(alpha: f64) -> Result<Side> {
        check_alpha(alpha)?;
        if alpha < 2.0 {
            Ok(Side::Below2)
        } else if alpha > 2.0 {
            Ok(Side::Above2)
        } else {
            Err(Error::param("alpha = 2 gives a ratio identically 1; choose alpha != 2"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessVerdict {
    pub n: usize,
    pub alpha: f64,
    pub k_threshold: f64,
    pub k_min: f64,
    pub criterion_satisfied: bool,
    pub verdict: String,
    /// Direction the criterion predicts for `||P||_α / ||P||_2`, when it applies.
    pub predicted: Option<String>,
    /// Observed `||P̃||_α`.
    pub observed_ratio: f64,
    /// A single term is flat for every α; no flatness conclusion is drawn.
    pub degenerate_single_term: bool,
}

pub fn flatness_verdict(p: &CirclePolynomial, alpha: f64, k_threshold: f64) -> Result<FlatnessVerdict> {
    check_alpha(alpha)?;
    if !(k_threshold > 0.0) {
        return Err(Error::param(format!("K threshold {k_threshold} must be positive")));
    }
    let report = minimal_k_of(p)?;
    let unit = p.normalized()?;
    let observed_ratio = lp_norm(&unit, alpha, None)?;
    let satisfied = report.satisfied_at(k_threshold);
    let degenerate = p.support_size() == 1;
    let (verdict, predicted) = if satisfied {
        let predicted = if alpha < 2.0 {
            Some("ratio <= 1 - A(K, alpha) for all large n".to_string())
        } else if alpha > 2.0 {
            Some("ratio >= 1 + A(K, alpha) for all large n".to_string())
        } else {
            None
        };
        (
            "criterion satisfied: family cannot be L^alpha-flat".to_string(),
            if degenerate { None } else { predicted },
        )
    } else {
        ("criterion not satisfied at this threshold".to_string(), None)
    };
    Ok(FlatnessVerdict {
        n: p.len(),
        alpha,
        k_threshold,
        k_min: report.k_min,
        criterion_satisfied: satisfied,
        verdict,
        predicted,
        observed_ratio,
        degenerate_single_term: degenerate,
    })
}

/// One row of a gap sweep: `family,n,seed,alpha,ratio`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub family: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub alpha: f64,
    pub ratio: f64,
}

impl GapSample {
    pub const CSV_HEADER: &'static str = "family,n,seed,alpha,ratio";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.family,
            self.n,
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.alpha,
            self.ratio
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEstimate {
    pub alpha: f64,
    pub side: Side,
    /// `1 - max ratio` below 2, `min ratio - 1` above 2.
    pub empirical_a: f64,
    pub extreme_ratio: f64,
    pub sample_count: usize,
    pub n_range: (usize, usize),
    pub mean_ratio: f64,
    #[serde(skip)]
    pub samples: Vec<GapSample>,
}

/// Normalized `α`-ratios over `samples` draws per length. Random families
/// get the per-sample seed `derive_seed(template seed, n, index)`;
/// deterministic families are evaluated once per length.
pub fn estimate_gap(
    template: &GeneratorSpec,
    alpha: f64,
    n_list: &[usize],
    samples: usize,
) -> Result<GapEstimate> {
    let side = Side::of(alpha)?;
    if n_list.is_empty() || samples == 0 {
        return Err(Error::param("gap estimate needs a nonempty n list and samples >= 1"));
    }
    let random = template.seed.is_some();
    let jobs: Vec<(usize, Option<u64>)> = n_list
        .iter()
        .flat_map(|&n| {
            let count = if random { samples } else { 1 };
            (0..count as u64).map(move |i| {
                (n, template.seed.map(|s| derive_seed(s, n as u64, i)))
            })
        })
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let spec = template.at(n, seed);
            let p = spec.generate()?;
            let ratio = lp_norm(&p.normalized()?, alpha, None)?;
            Ok(GapSample {
                family: spec.family.to_string(),
                n,
                seed,
                alpha,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (extreme, empirical_a) = match side {
        Side::Below2 => {
            let m = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (m, 1.0 - m)
        }
        Side::Above2 => {
            let m = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            (m, m - 1.0)
        }
    };
    Ok(GapEstimate {
        alpha,
        side,
        empirical_a,
        extreme_ratio: extreme,
        sample_count: rows.len(),
        n_range: (
            *n_list.iter().min().unwrap(),
            *n_list.iter().max().unwrap(),
        ),
        mean_ratio: pairwise_sum(&ratios) / ratios.len() as f64,
        samples: rows,
    })
}
