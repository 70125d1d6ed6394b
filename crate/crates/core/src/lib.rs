//! Numerical laboratory for flatness of polynomials on the unit circle.
//!
//! The crate evaluates L^α flatness metrics and Mahler measure of analytic
//! polynomials, checks the Littlewood coefficient criterion and
//! Clarkson-type inequalities, searches Barker sequences, runs Liouville
//! exponential-sum experiments and builds generalized Riesz products.

pub mod barker;
pub mod criterion;
pub mod error;
pub mod generators;
pub mod grid;
pub mod liouville;
pub mod mahler;
pub mod norm;
pub mod poly;
pub mod riesz;
pub mod rng;
pub mod sum;

pub use error::{Error, Result};
pub use generators::{Family, GeneratorSpec};
pub use grid::EvaluationGrid;
pub use norm::FlatnessReport;
pub use poly::{CirclePolynomial, SignSequence};

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Version of the JSON report schemas.
pub const SCHEMA_VERSION: u32 = 1;
