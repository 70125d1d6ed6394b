//! Polynomials on the unit circle and exact coefficient algebra.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::sum::pairwise_sum_by;

/// Degree at which [`CirclePolynomial::autocorrelation`] switches from direct
/// summation to grid convolution.
pub const DIRECT_AUTOCORRELATION_MAX_DEGREE: usize = 2048;

/// A finitely supported coefficient sequence `a_0 + a_1 z + ... + a_d z^d`.
///
/// Trailing zero coefficients are trimmed on construction, so the top
/// coefficient is nonzero unless the polynomial is the constant `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct CirclePolynomial {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for CirclePolynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::param("coefficients must be finite"));
        }
        Ok(Self::new(coeffs))
    }
}

impl From<CirclePolynomial> for Vec<Complex64> {
    fn from(p: CirclePolynomial) -> Self {
        p.coeffs
    }
}

impl CirclePolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    /// Number of nonzero coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| **c != Complex64::new(0.0, 0.0)).count()
    }

    /// Sum of squared coefficient moduli; equals the squared L² norm on the circle.
    pub fn l2_norm_sq(&self) -> f64 {
        pairwise_sum_by(&self.coeffs, &|c: &Complex64| c.norm_sqr())
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `P / ||P||_2`.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// `P(ωz)`: coefficient `j` is multiplied by `ω^j`.
    pub fn rotate(&self, omega: Complex64) -> Self {
        let mut w = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * w);
            w *= omega;
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let out = (0..n)
            .map(|j| {
                self.coeffs.get(j).copied().unwrap_or(zero)
                    + other.coeffs.get(j).copied().unwrap_or(zero)
            })
            .collect();
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Horner evaluation at an arbitrary point.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Exact coefficient convolution. Zero coefficients of the sparser
    /// factor are skipped, so products with substituted factors stay cheap.
    pub fn multiply(&self, other: &Self) -> Self {
        let (dense, sparse) = if self.support_size() >= other.support_size() {
            (self, other)
        } else {
            (other, self)
        };
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (k, b) in sparse.coeffs.iter().enumerate() {
            if *b == zero {
                continue;
            }
            for (j, a) in dense.coeffs.iter().enumerate() {
                out[j + k] += a * b;
            }
        }
        Self::new(out)
    }

    /// `P(z^N)`.
    pub fn substitute_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("power substitution needs N >= 1"));
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; n * self.degree() + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[n * j] = *c;
        }
        Ok(Self::new(out))
    }

    /// Aperiodic autocorrelations `γ_k = Σ_j a_j conj(a_{j+k})` for
    /// `k = 0..=deg`. Negative lags are `conj(γ_k)` and are not stored.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        if self.degree() < DIRECT_AUTOCORRELATION_MAX_DEGREE {
            self.autocorrelation_direct()
        } else {
            self.autocorrelation_grid()
        }
    }

    pub fn autocorrelation_direct(&self) -> Vec<Complex64> {
        let a = &self.coeffs;
        let n = a.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n - k {
                    acc += a[j] * a[j + k].conj();
                }
                acc
            })
            .collect()
    }

    /// Autocorrelation through `|P|²` sampled on a grid of at least
    /// `2d + 1` points followed by a forward transform.
    pub fn autocorrelation_grid(&self) -> Vec<Complex64> {
        let d = self.degree();
        let m = (2 * d + 2).next_power_of_two().max(2);
        let mut vals = grid::evaluate_raw(&self.coeffs, m, 0.0);
        for v in vals.iter_mut() {
            *v = Complex64::new(v.norm_sqr(), 0.0);
        }
        grid::forward_in_place(&mut vals);
        let scale = 1.0 / m as f64;
        // |P|² = Σ_k γ_k z^{-k}, so γ_k sits at frequency -k.
        (0..=d)
            .map(|k| vals[(m - k) % m] * scale)
            .collect()
    }

    /// Fourier coefficients of `|P|²` for lags `-d..=d`, index `k + d`.
    pub fn squared_modulus_coeffs(&self) -> Vec<Complex64> {
        let g = self.autocorrelation();
        let d = self.degree();
        let mut out = Vec::with_capacity(2 * d + 1);
        // coefficient of z^k in |P|² is γ_{-k} = conj(γ_k) for k >= 0
        for k in (1..=d).rev() {
            out.push(g[k]);
        }
        for k in 0..=d {
            out.push(g[k].conj());
        }
        out
    }

    /// CSV with header `exponent,re,im`, one row per stored coefficient.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("exponent,re,im\n");
        for (j, c) in self.coeffs.iter().enumerate() {
            s.push_str(&format!("{j},{},{}\n", c.re, c.im));
        }
        s
    }
}

/// Multiply two polynomials.
pub fn multiply(p: &CirclePolynomial, q: &CirclePolynomial) -> CirclePolynomial {
    p.multiply(q)
}

/// A sequence with every entry exactly `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignSequence(Vec<i8>);

impl TryFrom<Vec<i8>> for SignSequence {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SignSequence> for Vec<i8> {
    fn from(s: SignSequence) -> Self {
        s.0
    }
}

impl SignSequence {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidLength("sign sequence must be nonempty".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::param(format!("sign entries must be +1 or -1, got {bad}")));
        }
        Ok(Self(signs))
    }

    /// Parse a comma separated list such as `1,-1,+1`.
    pub fn parse(s: &str) -> Result<Self> {
        let signs = s
            .split(',')
            .map(|t| match t.trim() {
                "1" | "+1" | "+" => Ok(1),
                "-1" | "-" => Ok(-1),
                other => Err(Error::param(format!("not a sign: {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(signs)
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// `b_j -> (-1)^j b_j`.
    pub fn alternated(&self) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(j, s)| if j % 2 == 1 { -s } else { *s })
                .collect(),
        )
    }

    pub fn to_polynomial(&self) -> CirclePolynomial {
        CirclePolynomial::new(self.0.iter().map(|&s| Complex64::new(f64::from(s), 0.0)).collect())
    }

    pub fn to_csv_row(&self) -> String {
        self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }
}
