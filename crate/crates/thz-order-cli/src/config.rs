//! Flat `key = value` run configuration with `[section]` headers.
//!
//! The format is deliberately trivial — UTF-8 lines, one assignment per
//! line, full-line `#` comments — so any script can generate or grep it.
//! Units are carried in the key names (`center_frequency_thz`,
//! `element_spacing_um`, …) and converted here at the boundary; everything
//! past this module is plain SI. Unknown sections or keys are errors, not
//! warnings: a typo must not silently fall back to a default.

use std::path::{Path, PathBuf};
use thz_order::doa::AngleGrid;
use thz_order::experiment::{AbsorptionSource, TrialConfig};
use thz_order::{Error, Result};

/// A parsed run configuration: the trial parameters plus the two
/// presentation knobs (output directory, verbosity) that live outside
/// [`TrialConfig`].
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub trial: TrialConfig,
    pub output_dir: Option<PathBuf>,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trial: TrialConfig::default(),
            output_dir: None,
            verbose: false,
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

/// Parse the document into a [`RunConfig`], starting from the stock
/// defaults so a config file only needs to name what it changes.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut config = RunConfig::default();
    // The DOA scan grid is assembled from three scalar keys; collect them
    // and rebuild the grid once at the end.
    let mut scan = (
        config.trial.angle_grid.start(),
        config.trial.angle_grid.end(),
        config.trial.angle_grid.step(),
    );
    let mut spread_band: (Option<f64>, Option<f64>) = match config.trial.spread_band {
        Some((lo, hi)) => (Some(lo), Some(hi)),
        None => (None, None),
    };
    let mut section: Option<String> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = index + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(bad(
                    lineno,
                    format!("unknown section [{name}]; expected one of {}", SECTIONS.join(", ")),
                ));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(lineno, format!("expected `key = value`, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(bad(lineno, format!("key {key:?} has no value")));
        }
        let Some(section) = section.as_deref() else {
            return Err(bad(
                lineno,
                format!("key {key:?} appears before any [section] header"),
            ));
        };

        match (section, key) {
            ("pulse", "center_frequency_thz") => {
                config.trial.center_frequency = float(lineno, key, value)? * 1.0e12;
            }
            ("pulse", "power_w") => config.trial.power = float(lineno, key, value)?,
            ("pulse", "orders") => config.trial.orders = order_list(lineno, value)?,
            ("channel", "distance_m") => config.trial.distance = float(lineno, key, value)?,
            ("channel", "band_min_thz") => {
                config.trial.band.0 = float(lineno, key, value)? * 1.0e12;
            }
            ("channel", "band_max_thz") => {
                config.trial.band.1 = float(lineno, key, value)? * 1.0e12;
            }
            ("channel", "absorption") => {
                config.trial.absorption = AbsorptionSource::parse(value)?;
            }
            ("array", "num_elements") => {
                config.trial.num_elements = integer(lineno, key, value)?;
            }
            ("array", "element_spacing_um") => {
                config.trial.element_spacing = float(lineno, key, value)? * 1.0e-6;
            }
            ("array", "snapshot_duration_ps") => {
                config.trial.snapshot_duration = float(lineno, key, value)? * 1.0e-12;
            }
            ("doa", "true_angle_deg") => {
                config.trial.true_angle_deg = float(lineno, key, value)?;
            }
            ("doa", "scan_start_deg") => scan.0 = float(lineno, key, value)?,
            ("doa", "scan_end_deg") => scan.1 = float(lineno, key, value)?,
            ("doa", "scan_step_deg") => scan.2 = float(lineno, key, value)?,
            ("experiment", "trials_per_order") => {
                config.trial.trials_per_order = integer(lineno, key, value)?;
            }
            ("experiment", "base_seed") => {
                config.trial.base_seed = value.parse().map_err(|_| {
                    bad(lineno, format!("key {key:?}: {value:?} is not a u64"))
                })?;
            }
            ("experiment", "include_noise") => {
                config.trial.include_noise = boolean(lineno, key, value)?;
            }
            ("experiment", "spread_band_min_thz") => {
                spread_band.0 = Some(float(lineno, key, value)? * 1.0e12);
            }
            ("experiment", "spread_band_max_thz") => {
                spread_band.1 = Some(float(lineno, key, value)? * 1.0e12);
            }
            ("experiment", "output_dir") => config.output_dir = Some(PathBuf::from(value)),
            ("experiment", "verbose") => config.verbose = boolean(lineno, key, value)?,
            (section, key) => {
                return Err(bad(
                    lineno,
                    format!("unknown key {key:?} in section [{section}]"),
                ));
            }
        }
    }

    config.trial.angle_grid = AngleGrid::new(scan.0, scan.1, scan.2)?;
    config.trial.spread_band = match spread_band {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => {
            return Err(Error::Config(
                "spread_band_min_thz and spread_band_max_thz must be given together".into(),
            ));
        }
    };
    config.trial.validate()?;
    Ok(config)
}

const SECTIONS: &[&str] = &["pulse", "channel", "array", "doa", "experiment"];

fn bad(lineno: usize, message: String) -> Error {
    Error::Config(format!("line {lineno}: {message}"))
}

fn float(lineno: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| bad(lineno, format!("key {key:?}: {value:?} is not a number")))
}

fn integer(lineno: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| bad(lineno, format!("key {key:?}: {value:?} is not a count")))
}

fn boolean(lineno: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad(
            lineno,
            format!("key {key:?}: {value:?} is not `true` or `false`"),
        )),
    }
}

fn order_list(lineno: usize, value: &str) -> Result<Vec<u32>> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| bad(lineno, format!("orders entry {:?} is not an order", part.trim())))
        })
        .collect()
}
