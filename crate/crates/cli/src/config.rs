//! Resolved run configuration. The same JSON is accepted by `run --config`
//! and embedded in every report.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use flatlab_core::{GeneratorSpec, SignSequence};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Flatness,
    Criterion,
    Gap,
    Clarkson,
    Measure,
    BarkerSearch,
    BarkerProfile,
    BarkerFlatness,
    LiouvilleSweep,
    LiouvillePartial,
    LiouvilleTable,
    RieszDemo,
    RieszPlan,
}

impl Subcommand {
    /// Sweeps default to CSV, everything else to JSON.
    pub fn default_format(self) -> Format {
        match self {
            Subcommand::Gap | Subcommand::LiouvilleSweep | Subcommand::RieszDemo => Format::Csv,
            _ => Format::Json,
        }
    }
}

/// An exponent that may be `+∞` (written `inf`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(pub f64);

impl Alpha {
    pub fn finite(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "inf" | "sup" => Ok(Alpha(f64::INFINITY)),
            t => {
                let v: f64 = t.parse().map_err(|_| format!("cannot parse alpha '{t}'"))?;
                if v > 0.0 && v.is_finite() {
                    Ok(Alpha(v))
                } else {
                    Err(format!("alpha must be positive, got {t}"))
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AlphaRepr {
    Num(f64),
    Text(String),
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            AlphaRepr::Text("inf".into()).serialize(s)
        } else {
            AlphaRepr::Num(self.0).serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match AlphaRepr::deserialize(d)? {
            AlphaRepr::Num(v) => Alpha::from_str(&v.to_string()).map_err(serde::de::Error::custom),
            AlphaRepr::Text(t) => Alpha::from_str(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Subcommand-specific parameters. Unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SignSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_reduce: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_family: Option<FactorFamily>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FactorFamily {
    /// Complex Gaussian coefficients, L²-normalized.
    Random,
    /// Normalized Gauss–Fresnel polynomials of length `degree + 1`.
    GaussFresnel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub alphas: Vec<Alpha>,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    #[serde(default = "default_eps_ladder")]
    pub eps_ladder: Vec<f64>,
    /// Not embedded in reports: where a report lands does not change it.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    /// Destination of the binary Liouville table; not embedded either.
    #[serde(default, skip_serializing)]
    pub bits: Option<PathBuf>,
    pub format: Format,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Params,
}

pub fn default_oversample() -> usize {
    flatlab_core::grid::DEFAULT_OVERSAMPLE
}

pub fn default_eps_ladder() -> Vec<f64> {
    flatlab_core::norm::DEFAULT_EPS_LADDER.to_vec()
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            generator: None,
            alphas: Vec::new(),
            oversample: default_oversample(),
            eps_ladder: default_eps_ladder(),
            output: None,
            bits: None,
            format: subcommand.default_format(),
            seed: None,
            params: Params::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_parsing() {
        assert_eq!("1.5".parse::<Alpha>().unwrap(), Alpha(1.5));
        assert!("inf".parse::<Alpha>().unwrap().0.is_infinite());
        assert!("0".parse::<Alpha>().is_err());
        assert!("-1".parse::<Alpha>().is_err());
        assert!("x".parse::<Alpha>().is_err());
    }

    #[test]
    fn alpha_json() {
        let v = vec![Alpha(1.0), Alpha(f64::INFINITY)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.0,"inf"]"#);
        let back: Vec<Alpha> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn config_round_trip_drops_output() {
        let mut c = RunConfig::new(Subcommand::Flatness);
        c.output = Some("x.json".into());
        c.alphas = vec![Alpha(1.0)];
        let s = serde_json::to_string(&c).unwrap();
        assert!(!s.contains("x.json"));
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.output, None);
        assert_eq!(back.alphas, c.alphas);
    }

    #[test]
    fn unknown_fields_rejected() {
        let e = serde_json::from_str::<RunConfig>(r#"{"subcommand":"flatness","format":"json","bogus":1}"#);
        assert!(e.is_err());
    }
}
