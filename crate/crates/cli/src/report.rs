//! Report envelope and output writing.
//!
//! JSON reports are one pretty-printed object. CSV reports start with a
//! single `# ` line holding the envelope without its result, followed by a
//! header row and data rows.

use flatlab_core::rng::GENERATOR_NAME;
use flatlab_core::{SCHEMA_VERSION, TOOL_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub rng: String,
    pub seed: Option<u64>,
    pub grid_m: Option<usize>,
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

/// Output of one command before formatting.
pub struct Outcome {
    pub result: Value,
    pub grid_m: Option<usize>,
    /// Header and rows for CSV output, when the command has a tabular form.
    pub table: Option<(String, Vec<String>)>,
}

impl Outcome {
    pub fn json(result: Value) -> Self {
        Self { result, grid_m: None, table: None }
    }

    pub fn with_grid(mut self, m: Option<usize>) -> Self {
        self.grid_m = m;
        self
    }

    pub fn with_table(mut self, header: impl Into<String>, rows: Vec<String>) -> Self {
        self.table = Some((header.into(), rows));
        self
    }
}

fn envelope(config: &RunConfig, grid_m: Option<usize>, result: Option<Value>) -> Envelope {
    Envelope {
        schema_version: SCHEMA_VERSION,
        tool: "flatlab".into(),
        tool_version: TOOL_VERSION.into(),
        rng: GENERATOR_NAME.into(),
        seed: config.seed,
        grid_m,
        config: config.clone(),
        result,
    }
}

pub fn render(config: &RunConfig, outcome: Outcome) -> Result<String, String> {
    match config.format {
        Format::Json => {
            let env = envelope(config, outcome.grid_m, Some(outcome.result));
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| e.to_string())?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let (header, rows) = outcome
                .table
                .ok_or_else(|| format!("{:?} has no CSV form; use --format json", config.subcommand))?;
            let env = envelope(config, outcome.grid_m, None);
            let mut s = format!("# {}\n{header}\n", serde_json::to_string(&env).map_err(|e| e.to_string())?);
            for r in rows {
                s.push_str(&r);
                s.push('\n');
            }
            Ok(s)
        }
    }
}

/// Pull the run configuration out of a config file, a JSON report or a CSV
/// report.
pub fn extract_config(text: &str) -> Result<RunConfig, String> {
    let json = match text.strip_prefix("# ") {
        Some(rest) => rest.lines().next().unwrap_or_default(),
        None => text,
    };
    let v: Value = serde_json::from_str(json).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let cfg = match v.get("config") {
        Some(c) if v.get("schema_version").is_some() => c.clone(),
        _ => v,
    };
    serde_json::from_value(cfg).map_err(|e| format!("invalid run config: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Subcommand;
    use serde_json::json;

    #[test]
    fn json_report_embeds_config() {
        let c = RunConfig::new(Subcommand::Flatness);
        let s = render(&c, Outcome::json(json!({"x": 1})).with_grid(Some(64))).unwrap();
        let back = extract_config(&s).unwrap();
        assert_eq!(back, c);
        assert!(s.contains("\"grid_m\": 64"));
    }

    #[test]
    fn csv_report_round_trip() {
        let c = RunConfig::new(Subcommand::RieszDemo);
        let out = Outcome::json(json!([])).with_table("a,b", vec!["1,2".into(), "3,4".into()]);
        let s = render(&c, out).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(&lines[1..], &["a,b", "1,2", "3,4"]);
        assert_eq!(extract_config(&s).unwrap(), c);
    }

    #[test]
    fn csv_without_table_is_refused() {
        let mut c = RunConfig::new(Subcommand::Flatness);
        c.format = Format::Csv;
        assert!(render(&c, Outcome::json(json!({}))).is_err());
    }
}
