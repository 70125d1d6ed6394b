//! Polynomial families: Littlewood, unimodular, Gauss–Fresnel, Blaschke
//! truncations, Liouville and monomials.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liouville::liouville_sieve;
use crate::poly::CirclePolynomial;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[serde(alias = "littlewood")]
    LittlewoodRandom,
    UnimodularPhases,
    GaussFresnel,
    Blaschke,
    Liouville,
    Monomial,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::LittlewoodRandom,
        Family::UnimodularPhases,
        Family::GaussFresnel,
        Family::Blaschke,
        Family::Liouville,
        Family::Monomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LittlewoodRandom => "littlewood-random",
            Family::UnimodularPhases => "unimodular-phases",
            Family::GaussFresnel => "gauss-fresnel",
            Family::Blaschke => "blaschke",
            Family::Liouville => "liouville",
            Family::Monomial => "monomial",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "littlewood" {
            return Ok(Family::LittlewoodRandom);
        }
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown family {s:?}; expected one of littlewood-random, unimodular-phases, \
                     gauss-fresnel, blaschke, liouville, monomial"
                ))
            })
    }
}

/// Recipe for one polynomial. Serializes as
/// `{family, n, seed, a, phases, normalized}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
    #[serde(default)]
    pub normalized: bool,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize) -> Self {
        Self {
            family,
            n,
            seed: None,
            a: None,
            phases: None,
            normalized: false,
        }
    }

    pub fn littlewood(n: usize, seed: u64) -> Self {
        Self {
            seed: Some(seed),
            ..Self::new(Family::LittlewoodRandom, n)
        }
    }

    pub fn blaschke(n: usize, a: f64) -> Self {
        Self {
            a: Some(a),
            ..Self::new(Family::Blaschke, n)
        }
    }

    pub fn with_normalized(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    /// Same recipe at a different length (and seed, for random families).
    pub fn at(&self, n: usize, seed: Option<u64>) -> Self {
        Self {
            n,
            seed: seed.or(self.seed),
            ..self.clone()
        }
    }

    /// Check that family-specific parameters are present exactly when needed.
    pub fn validate(&self) -> Result<()> {
        let needs_seed = self.family == Family::LittlewoodRandom;
        let needs_a = self.family == Family::Blaschke;
        let needs_phases = self.family == Family::UnimodularPhases;
        if needs_seed != self.seed.is_some() {
            return Err(Error::param(if needs_seed {
                "littlewood-random requires a seed".to_string()
            } else {
                format!("seed is only meaningful for littlewood-random, not {}", self.family)
            }));
        }
        if needs_a != self.a.is_some() {
            return Err(Error::param(if needs_a {
                "blaschke requires a with a in (0,1)".to_string()
            } else {
                format!("a is only meaningful for blaschke, not {}", self.family)
            }));
        }
        if needs_phases != self.phases.is_some() {
            return Err(Error::param(if needs_phases {
                "unimodular-phases requires phases".to_string()
            } else {
                format!("phases are only meaningful for unimodular-phases, not {}", self.family)
            }));
        }
        if let Some(a) = self.a {
            check_blaschke_a(a)?;
        }
        if let Some(ph) = &self.phases {
            if ph.len() != self.n {
                return Err(Error::param(format!(
                    "unimodular-phases needs n = {} phases, got {}",
                    self.n,
                    ph.len()
                )));
            }
        }
        Ok(())
    }

    pub fn generate(&self) -> Result<CirclePolynomial> {
        self.validate()?;
        let n = self.n;
        match self.family {
            Family::LittlewoodRandom => gen_littlewood(n, self.seed.unwrap_or(0), self.normalized),
            Family::UnimodularPhases => {
                gen_unimodular(self.phases.as_deref().unwrap_or(&[]), self.normalized)
            }
            Family::GaussFresnel => gen_gauss_fresnel(n, self.normalized),
            Family::Blaschke => {
                let p = gen_blaschke(n, self.a.unwrap_or(f64::NAN))?;
                if self.normalized {
                    p.normalized()
                } else {
                    Ok(p)
                }
            }
            Family::Liouville => gen_liouville(n, self.normalized),
            Family::Monomial => {
                check_len(n)?;
                Ok(CirclePolynomial::monomial(n - 1))
            }
        }
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidLength("length n must be at least 1".into()));
    }
    Ok(())
}

fn check_blaschke_a(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param(format!("blaschke parameter a = {a} must satisfy a in (0,1)")));
    }
    Ok(())
}

fn maybe_normalize(coeffs: Vec<Complex64>, normalized: bool) -> CirclePolynomial {
    let n = coeffs.len() as f64;
    let p = CirclePolynomial::new(coeffs);
    if normalized {
        p.scale(Complex64::new(1.0 / n.sqrt(), 0.0))
    } else {
        p
    }
}

/// Random `±1` signs. Sign `j` is `+1` when bit 0 of the `j`-th `next_u32`
/// draw is set.
pub fn random_signs(n: usize, seed: u64) -> Vec<i8> {
    let mut rng = rng_from_seed(seed);
    (0..n)
        .map(|_| if rng.next_u32() & 1 == 1 { 1 } else { -1 })
        .collect()
}

pub fn gen_littlewood(n: usize, seed: u64, normalized: bool) -> Result<CirclePolynomial> {
    check_len(n)?;
    let coeffs = random_signs(n, seed)
        .into_iter()
        .map(|s| Complex64::new(f64::from(s), 0.0))
        .collect();
    Ok(maybe_normalize(coeffs, normalized))
}

/// Coefficient `j` is `exp(i φ_j)`.
pub fn gen_unimodular(phases: &[f64], normalized: bool) -> Result<CirclePolynomial> {
    check_len(phases.len())?;
    let coeffs = phases.iter().map(|&ph| Complex64::from_polar(1.0, ph)).collect();
    Ok(maybe_normalize(coeffs, normalized))
}

/// Coefficient `j` is `exp(iπ j²/n)`, `j = 0..n-1`.
pub fn gen_gauss_fresnel(n: usize, normalized: bool) -> Result<CirclePolynomial> {
    check_len(n)?;
    let coeffs = (0..n as u128)
        .map(|j| {
            // phase j²/n is taken mod 2 exactly in integers before scaling
            let r = (j * j) % (2 * n as u128);
            Complex64::from_polar(1.0, PI * r as f64 / n as f64)
        })
        .collect();
    Ok(maybe_normalize(coeffs, normalized))
}

/// Truncated expansion of the Blaschke factor `(z - a)/(1 - a z)`:
/// `-a + Σ_{j=1}^{n-1} a^{j-1}(1 - a²) z^j`.
pub fn gen_blaschke(n: usize, a: f64) -> Result<CirclePolynomial> {
    check_blaschke_a(a)?;
    if n < 2 {
        return Err(Error::InvalidLength("blaschke family needs n >= 2".into()));
    }
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(Complex64::new(-a, 0.0));
    let mut pow = 1.0;
    for _ in 1..n {
        coeffs.push(Complex64::new(pow * (1.0 - a * a), 0.0));
        pow *= a;
    }
    Ok(CirclePolynomial::new(coeffs))
}

/// `Σ_{k=1}^{N} λ(k) z^{k-1}`.
pub fn gen_liouville(n: usize, normalized: bool) -> Result<CirclePolynomial> {
    check_len(n)?;
    let table = liouville_sieve(n)?;
    let coeffs = table
        .values()
        .iter()
        .map(|&l| Complex64::new(f64::from(l), 0.0))
        .collect();
    Ok(maybe_normalize(coeffs, normalized))
}

/// Complex Gaussian coefficients of degree `degree`. Test and sweep helper.
pub fn random_complex<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> CirclePolynomial {
    let coeffs = (0..=degree)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    CirclePolynomial::new(coeffs)
}
