//! Resolved run configuration and the report envelopes the CLI emits.
//! Every report, JSON or CSV, carries the crate version and the full
//! configuration it was produced under, so a file on disk identifies its
//! own provenance and a rerun with the same configuration and seed
//! reproduces it byte for byte.

use crate::error::{Error, Result};
use crate::ntcore::is_prime;
use serde::Serialize;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Usage(format!(
                "unknown output format {other:?}; use csv or json"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// One resolved run: the subcommand plus every shared knob after flag,
/// config-file, and default resolution, embedded verbatim in each report.
/// `threads = 0` means one worker per core.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub sigma: f64,
    pub h_id: String,
    pub phi_id: String,
    #[serde(rename = "N_list")]
    pub n_list: Vec<u64>,
    pub c_max_multiplier: u64,
    pub epsilon: f64,
    pub k: u32,
    pub seed: u64,
    pub output_path: Option<String>,
    pub output_format: OutputFormat,
    pub offline: bool,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: String::new(),
            sigma: 1.0,
            h_id: "gaussian".into(),
            phi_id: "triangle".into(),
            n_list: vec![101],
            c_max_multiplier: 40,
            epsilon: 0.1,
            k: 2,
            seed: 0,
            output_path: None,
            output_format: OutputFormat::Json,
            offline: false,
            threads: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 2.0) {
            return Err(Error::Usage(format!(
                "sigma {} outside (0, 2)",
                self.sigma
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::Usage("no levels given".into()));
        }
        for &n in &self.n_list {
            if !is_prime(n) {
                return Err(Error::Usage(format!("level {n} is not prime")));
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    report: T,
}

/// Pretty JSON with a trailing newline. Field order is fixed by the
/// structs, so equal configuration and payload give equal bytes.
pub fn render_json<T: Serialize>(config: &RunConfig, report: T) -> Result<String> {
    let env = Envelope {
        version: VERSION,
        config,
        report,
    };
    let mut out = serde_json::to_string_pretty(&env)
        .map_err(|e| Error::Schema(format!("report serialization failed: {e}")))?;
    out.push('\n');
    Ok(out)
}

/// CSV with `# key = value` provenance lines above the header. Rows must
/// be flat structs; the header comes from the first row's field names.
pub fn render_csv<T: Serialize>(config: &RunConfig, rows: &[T]) -> Result<String> {
    let cfg = serde_json::to_string(config)
        .map_err(|e| Error::Schema(format!("config serialization failed: {e}")))?;
    let mut out = format!("# version = {VERSION}\n# config = {cfg}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Schema(format!("csv row serialization failed: {e}")))?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::Schema(format!("csv flush failed: {e}")))?;
    out.push_str(
        &String::from_utf8(body).map_err(|e| Error::Schema(format!("csv not utf-8: {e}")))?,
    );
    Ok(out)
}

/// Write to the given path, or stdout when none is set.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// Plot-ready row of the density sweep, one line per level.
#[derive(Debug, Clone, Serialize)]
pub struct DensityRow<'a> {
    #[serde(rename = "N")]
    pub n: u64,
    pub sigma: f64,
    pub h_id: &'a str,
    pub phi_id: &'a str,
    pub c_max: u64,
    pub density_value: f64,
    pub ks_prediction: f64,
    pub deviation: f64,
    pub tail_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_embeds_version_and_config_and_reproduces() {
        let cfg = RunConfig {
            subcommand: "density".into(),
            seed: 42,
            ..RunConfig::default()
        };
        #[derive(Serialize)]
        struct P {
            value: f64,
        }
        let a = render_json(&cfg, P { value: 1.5 }).unwrap();
        let b = render_json(&cfg, P { value: 1.5 }).unwrap();
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["config"]["seed"], 42);
        assert_eq!(v["config"]["subcommand"], "density");
        assert_eq!(v["config"]["N_list"][0], 101);
        assert_eq!(v["report"]["value"], 1.5);
    }

    #[test]
    fn csv_has_provenance_lines_and_spec_columns() {
        let cfg = RunConfig::default();
        let rows = [DensityRow {
            n: 101,
            sigma: 1.0,
            h_id: "gaussian",
            phi_id: "triangle",
            c_max: 4040,
            density_value: 1.49,
            ks_prediction: 1.5,
            deviation: 0.01,
            tail_bound: 0.002,
        }];
        let out = render_csv(&cfg, &rows).unwrap();
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# version = "));
        assert!(lines.next().unwrap().starts_with("# config = {"));
        assert_eq!(
            lines.next().unwrap(),
            "N,sigma,h_id,phi_id,c_max,density_value,ks_prediction,deviation,tail_bound"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 9);
        assert!(lines.next().is_none());
    }

    #[test]
    fn config_validation_and_format_parsing() {
        let mut cfg = RunConfig::default();
        cfg.validate().unwrap();
        cfg.sigma = 2.0;
        assert!(cfg.validate().is_err());
        cfg.sigma = 1.0;
        cfg.n_list = vec![100];
        assert!(cfg.validate().is_err());
        cfg.n_list.clear();
        assert!(cfg.validate().is_err());

        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("yaml".parse::<OutputFormat>().is_err());
        assert_eq!(OutputFormat::Csv.to_string(), "csv");
    }
}
