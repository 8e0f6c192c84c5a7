//! Run configuration: a single JSON document naming the experiment, its
//! parameters, and where to put results.

use std::path::PathBuf;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Experiment parameters; every field is optional and falls back to a
/// per-experiment default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub ell: Option<f64>,
    /// Support offset, or the interval start for the Gaussian and Anderson
    /// experiments.
    pub a: Option<f64>,
    pub s: Option<f64>,
    pub r: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    /// Graph spec: `path6`, `cycle8`, `grid3x3`, or `path:N` / `cycle:N` /
    /// `grid:RxC`.
    pub graph: Option<String>,
    /// Marginal law: `uniform`, `gaussian`, `exp`, or `truncgauss`.
    pub dist: Option<String>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Any of "csv", "json", "svg"; default csv + json.
    pub formats: Option<Vec<String>>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Config = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        if let Some(formats) = &config.output.formats {
            for f in formats {
                if !matches!(f.as_str(), "csv" | "json" | "svg") {
                    return Err(CliError::Config(format!("unknown output format `{f}`")));
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn formats(&self) -> Vec<String> {
        self.output
            .formats
            .clone()
            .unwrap_or_else(|| vec!["csv".to_string(), "json".to_string()])
    }

    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}
