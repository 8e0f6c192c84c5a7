//! Experiment runner for the conditional sample-mean regularity laboratory.
//!
//! A run is described by one JSON config (experiment name, parameters,
//! output spec); results land in per-experiment CSV / JSON files, with an
//! optional SVG plot. All randomness derives from the config seed, so
//! outputs are byte-identical across runs and worker counts.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod svg;

use std::path::PathBuf;

use config::Config;
use error::CliError;
use report::ResultTable;

pub struct RunOutput {
    pub table: ResultTable,
    pub files: Vec<PathBuf>,
}

/// Run the configured experiment and write the requested output files.
pub fn run_to_files(config: &Config) -> Result<RunOutput, CliError> {
    let table = experiments::run(config)?;
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    for format in config.formats() {
        match format.as_str() {
            "csv" => {
                let path = dir.join(format!("{}.csv", table.experiment));
                std::fs::write(&path, table.to_csv())?;
                files.push(path);
            }
            "json" => {
                let path = dir.join(format!("{}.json", table.experiment));
                let mut text = serde_json::to_string_pretty(&table.to_json())
                    .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
                text.push('\n');
                std::fs::write(&path, text)?;
                files.push(path);
            }
            "svg" => {
                if let Some(plot) = plot_for(&table) {
                    let path = dir.join(format!("{}.svg", table.experiment));
                    std::fs::write(&path, plot)?;
                    files.push(path);
                }
            }
            _ => unreachable!("formats validated at parse time"),
        }
    }
    Ok(RunOutput { table, files })
}

/// Estimate-versus-bound plot for experiments with a natural x axis.
fn plot_for(table: &ResultTable) -> Option<String> {
    let (x_name, series_spec): (&str, Vec<(&str, &str)>) = match table.experiment.as_str() {
        "verify-lemma" => (
            "r",
            vec![
                ("exact", "black"),
                ("empirical", "crimson"),
                ("bound_stated", "steelblue"),
                ("bound_proof", "seagreen"),
            ],
        ),
        "gaussian-strip" => ("s", vec![("quadrature", "black"), ("p_hat", "crimson")]),
        "fiber-oracle" => ("n", vec![("max_abs_err", "crimson")]),
        _ => return None,
    };
    let x_idx = table.column(x_name)?;
    let xs = table.numeric_column(x_idx);
    let series: Vec<svg::Series<'_>> = series_spec
        .into_iter()
        .filter_map(|(name, color)| {
            let idx = table.column(name)?;
            let ys = table.numeric_column(idx);
            Some(svg::Series {
                label: name,
                color,
                points: xs.iter().copied().zip(ys).collect(),
            })
        })
        .collect();
    if series.is_empty() || xs.len() < 2 {
        return None;
    }
    Some(svg::render(
        &table.experiment,
        x_name,
        "probability",
        &series,
    ))
}
