//! Seeded Monte Carlo trials and true-positive-rate sweeps.
//!
//! One *trial* pushes a single pulse of known order through the full
//! receive chain — synthesis, DOA estimation, PSD reconstruction, spread,
//! classification — and scores whether the estimated order matches the
//! transmitted one. A *sweep* repeats `trials_per_order` trials for every
//! candidate order at each value of one swept variable (path length,
//! snapshot duration, or antenna count) and reports per-order and average
//! TPR.
//!
//! Reproducibility contract: every noise draw descends from the base seed
//! through [`trial_seed`], so any individual trial can be replayed in
//! isolation, and the entire report is a pure function of its
//! [`TrialConfig`] — independent of thread count or execution order.

use crate::array::{sample_covariance, ArrayConfig, SnapshotModel};
use crate::channel::{builtin_absorption_table, load_absorption_csv, AbsorptionTable, ChannelParams};
use crate::classifier::{
    build_reference_table, classify_order, estimate_psd, rms_spread_estimate,
    rms_spread_estimate_in_band, ClassificationResult, ReferenceTable,
};
use crate::doa::{estimate_doa, imusic_spectrum, AngleGrid};
use crate::pulse::{PulseSpec, DESCRIPTOR_RESOLUTION};
use crate::{
    Error, Result, DEFAULT_BAND, DEFAULT_DOA_DEG, DEFAULT_POWER, DEFAULT_SPACING,
    MIN_SNAPSHOT_DURATION,
};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::fmt;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Where the absorption table comes from: a bundled preset or a CSV on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsorptionSource {
    Builtin(String),
    File(PathBuf),
}

impl AbsorptionSource {
    /// Parse the `builtin:NAME` / `file:PATH` notation used on the command
    /// line and in config files.
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(name) = text.strip_prefix("builtin:") {
            Ok(AbsorptionSource::Builtin(name.to_string()))
        } else if let Some(path) = text.strip_prefix("file:") {
            Ok(AbsorptionSource::File(PathBuf::from(path)))
        } else {
            Err(Error::Config(format!(
                "absorption source {text:?} must start with \"builtin:\" or \"file:\""
            )))
        }
    }

    pub fn resolve(&self) -> Result<AbsorptionTable> {
        match self {
            AbsorptionSource::Builtin(name) => builtin_absorption_table(name),
            AbsorptionSource::File(path) => load_absorption_csv(path),
        }
    }
}

impl Default for AbsorptionSource {
    fn default() -> Self {
        AbsorptionSource::Builtin("summer-air".to_string())
    }
}

impl fmt::Display for AbsorptionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsorptionSource::Builtin(name) => write!(f, "builtin:{name}"),
            AbsorptionSource::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// Everything a trial depends on. Fields are public so sweeps can derive
/// variants; call [`TrialConfig::validate`] after hand-editing.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Candidate derivative orders, strictly ascending (default {1, 4, 10}).
    pub orders: Vec<u32>,
    /// Pulse center frequency f_c, Hz (known at the receiver).
    pub center_frequency: f64,
    /// Transmit power, W.
    pub power: f64,
    /// Link distance d_r, m.
    pub distance: f64,
    /// Snapshot duration ΔT, s.
    pub snapshot_duration: f64,
    /// Antenna elements N.
    pub num_elements: usize,
    /// Element pitch d_s, m.
    pub element_spacing: f64,
    /// Channel band, Hz.
    pub band: (f64, f64),
    /// DOA search grid.
    pub angle_grid: AngleGrid,
    /// Absorption table source.
    pub absorption: AbsorptionSource,
    /// True arrival angle, degrees.
    pub true_angle_deg: f64,
    /// Monte Carlo trials per candidate order.
    pub trials_per_order: usize,
    /// Base seed; per-trial seeds derive from it via [`trial_seed`].
    pub base_seed: u64,
    /// Disable to run the deterministic noiseless pipeline.
    pub include_noise: bool,
    /// Restrict the spread statistic to this band instead of the full grid
    /// (comparison mode; `None` is the standard full-band form).
    pub spread_band: Option<(f64, f64)>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            orders: vec![1, 4, 10],
            center_frequency: 6.0e12,
            power: DEFAULT_POWER,
            distance: 0.5,
            snapshot_duration: 16.0e-12,
            num_elements: 8,
            element_spacing: DEFAULT_SPACING,
            band: DEFAULT_BAND,
            angle_grid: AngleGrid::default_scan(),
            absorption: AbsorptionSource::default(),
            true_angle_deg: DEFAULT_DOA_DEG,
            trials_per_order: 200,
            base_seed: 0,
            include_noise: true,
            spread_band: None,
        }
    }
}

impl TrialConfig {
    /// Defaults with the three quantities that vary between experiments.
    pub fn new(center_frequency: f64, distance: f64, snapshot_duration: f64) -> Self {
        TrialConfig {
            center_frequency,
            distance,
            snapshot_duration,
            ..TrialConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() {
            return Err(Error::Config("candidate order set must not be empty".into()));
        }
        for w in self.orders.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "candidate orders must be strictly ascending ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for &n in &self.orders {
            if n == 0 || n > PulseSpec::MAX_ORDER {
                return Err(Error::Config(format!(
                    "candidate order {n} outside the supported 1..={}",
                    PulseSpec::MAX_ORDER
                )));
            }
        }
        if !(self.band.0 >= 0.0 && self.band.1 > self.band.0) {
            return Err(Error::Config(format!(
                "band [{:.3e}, {:.3e}] Hz is empty or negative",
                self.band.0, self.band.1
            )));
        }
        if !(self.band.0 < self.center_frequency && self.center_frequency < self.band.1) {
            return Err(Error::Config(format!(
                "center frequency {:.3e} Hz lies outside the band [{:.3e}, {:.3e}] Hz",
                self.center_frequency, self.band.0, self.band.1
            )));
        }
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::Config(format!(
                "transmit power must be positive and finite, got {}",
                self.power
            )));
        }
        if !(self.distance > 0.0) || !self.distance.is_finite() {
            return Err(Error::Config(format!(
                "link distance must be positive and finite, got {}",
                self.distance
            )));
        }
        if self.snapshot_duration < MIN_SNAPSHOT_DURATION {
            return Err(Error::Config(format!(
                "snapshot duration {:.3e} s is below the 2 ps minimum — a snapshot must \
                 span the whole received pulse, and the slowest supported pulse (order 10 \
                 at a 3 THz center) lasts just under 2 ps",
                self.snapshot_duration
            )));
        }
        if self.num_elements < 2 {
            return Err(Error::Config(format!(
                "array needs at least 2 elements, got {}",
                self.num_elements
            )));
        }
        if !(self.element_spacing > 0.0) || !self.element_spacing.is_finite() {
            return Err(Error::Config(format!(
                "element spacing must be positive and finite, got {}",
                self.element_spacing
            )));
        }
        if !(-90.0..=90.0).contains(&self.true_angle_deg) {
            return Err(Error::Config(format!(
                "true arrival angle {}° outside −90°..90°",
                self.true_angle_deg
            )));
        }
        if self.trials_per_order < 1 {
            return Err(Error::Config("trials per order must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.spread_band {
            if !(hi > lo) {
                return Err(Error::Config(format!(
                    "spread band [{lo:.3e}, {hi:.3e}] Hz is empty"
                )));
            }
        }
        Ok(())
    }
}

/// Derive the seed of one trial from its coordinates.
///
/// Each coordinate is folded into the state through a `splitmix64` step, so
/// nearby (sweep, order, trial) triples land on unrelated ChaCha streams.
/// The construction is part of the reproducibility contract: to replay trial
/// `t` of order `n` at sweep point `i`, feed this seed to a single run.
pub fn trial_seed(base_seed: u64, sweep_index: usize, order: u32, trial_index: usize) -> u64 {
    fn splitmix64(state: u64) -> u64 {
        let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut h = splitmix64(base_seed);
    h = splitmix64(h ^ sweep_index as u64);
    h = splitmix64(h ^ u64::from(order));
    h = splitmix64(h ^ trial_index as u64);
    h
}

/// A trial pipeline with all deterministic work done up front.
///
/// Building the runner performs the expensive parts — absorption resolution,
/// per-bin noise quadrature, reference spreads — once; [`TrialRunner::run`]
/// then only draws noise, scans angles and classifies, which is what makes
/// 200-trial sweep points affordable.
pub struct TrialRunner {
    model: SnapshotModel,
    array: ArrayConfig,
    angle_grid: AngleGrid,
    references: ReferenceTable,
    center_frequency: f64,
    spread_band: Option<(f64, f64)>,
    true_order: u32,
}

impl TrialRunner {
    pub fn new(config: &TrialConfig, true_order: u32) -> Result<Self> {
        config.validate()?;
        if true_order == 0 || true_order > PulseSpec::MAX_ORDER {
            return Err(Error::Config(format!(
                "transmitted order {true_order} outside the supported 1..={}",
                PulseSpec::MAX_ORDER
            )));
        }
        let table = config.absorption.resolve()?;
        let mut params = ChannelParams::new(config.distance, config.center_frequency)?;
        params.band = config.band;
        let grid = crate::array::build_frequency_grid(config.band, config.snapshot_duration)?;
        let array = ArrayConfig::new(config.num_elements, config.element_spacing)?;
        let spec = PulseSpec::new(true_order, config.center_frequency, config.power)?;
        let model = SnapshotModel::build(
            &spec,
            &params,
            &table,
            &array,
            config.true_angle_deg,
            &grid,
            config.include_noise,
        )?;
        let references = build_reference_table(
            &config.orders,
            config.center_frequency,
            config.band,
            DESCRIPTOR_RESOLUTION,
        )?;
        Ok(TrialRunner {
            model,
            array,
            angle_grid: config.angle_grid,
            references,
            center_frequency: config.center_frequency,
            spread_band: config.spread_band,
            true_order,
        })
    }

    pub fn true_order(&self) -> u32 {
        self.true_order
    }

    /// One seeded pass through the chain: synthesize, estimate the DOA,
    /// reconstruct the PSD, classify.
    pub fn run(&self, seed: u64) -> Result<ClassificationResult> {
        let snapshots = self.model.synthesize(1, seed)?;
        let covariances = sample_covariance(&snapshots)?;
        let spectrum = imusic_spectrum(
            &covariances,
            self.model.grid(),
            &self.angle_grid,
            &self.array,
        )?;
        let theta = estimate_doa(&spectrum);
        let psd = estimate_psd(&covariances, theta, &self.array, self.model.grid())?;
        let spread = match self.spread_band {
            Some(band) => rms_spread_estimate_in_band(&psd, self.center_frequency, band)?,
            None => rms_spread_estimate(&psd, self.center_frequency)?,
        };
        let mut result = classify_order(spread, &self.references)?;
        result.doa_estimate = Some(theta);
        Ok(result)
    }
}

/// One full trial from a bare config (building the pipeline each call).
/// Prefer a reused [`TrialRunner`] for repeated trials.
pub fn run_trial(config: &TrialConfig, true_order: u32, seed: u64) -> Result<ClassificationResult> {
    TrialRunner::new(config, true_order)?.run(seed)
}

/// The quantity a TPR sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SweepVariable {
    PathLength,
    SnapshotDuration,
    NumElements,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::PathLength => "path_length",
            SweepVariable::SnapshotDuration => "snapshot_duration",
            SweepVariable::NumElements => "num_elements",
        }
    }

    pub fn axis_label(&self) -> &'static str {
        match self {
            SweepVariable::PathLength => "path length (m)",
            SweepVariable::SnapshotDuration => "snapshot duration (s)",
            SweepVariable::NumElements => "antenna elements",
        }
    }

    /// Produce the config for one sweep point by substituting `value`.
    pub fn apply(&self, base: &TrialConfig, value: f64) -> Result<TrialConfig> {
        let mut config = base.clone();
        match self {
            SweepVariable::PathLength => config.distance = value,
            SweepVariable::SnapshotDuration => config.snapshot_duration = value,
            SweepVariable::NumElements => {
                if !(value.is_finite() && (value - value.round()).abs() < 1e-9 && value >= 2.0) {
                    return Err(Error::Config(format!(
                        "antenna count sweep value {value} is not an integer ≥ 2"
                    )));
                }
                config.num_elements = value.round() as usize;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Score of one candidate order at one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct OrderTally {
    pub order: u32,
    pub correct: usize,
    pub trials: usize,
}

impl OrderTally {
    pub fn tpr(&self) -> f64 {
        self.correct as f64 / self.trials as f64
    }
}

/// All per-order tallies at one value of the swept variable.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub tallies: Vec<OrderTally>,
}

impl SweepRow {
    /// Mean of the per-order TPRs.
    pub fn average_tpr(&self) -> f64 {
        self.tallies.iter().map(OrderTally::tpr).sum::<f64>() / self.tallies.len() as f64
    }

    pub fn tpr_for(&self, order: u32) -> Option<f64> {
        self.tallies
            .iter()
            .find(|t| t.order == order)
            .map(OrderTally::tpr)
    }
}

/// Complete result of a TPR sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TprReport {
    variable: SweepVariable,
    orders: Vec<u32>,
    rows: Vec<SweepRow>,
}

impl TprReport {
    pub fn variable(&self) -> SweepVariable {
        self.variable
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }
}

/// Run `trials_per_order` classifications per candidate order at every sweep
/// value.
///
/// Trials parallelize across seeds (behind the `parallel` feature); outcomes
/// are collected by trial index, so the report is identical however many
/// workers ran it.
pub fn tpr_sweep(
    config: &TrialConfig,
    variable: SweepVariable,
    values: &[f64],
) -> Result<TprReport> {
    config.validate()?;
    let mut rows = Vec::with_capacity(values.len());
    for (sweep_index, &value) in values.iter().enumerate() {
        let point = variable.apply(config, value)?;
        let mut tallies = Vec::with_capacity(point.orders.len());
        for &order in &point.orders {
            let runner = TrialRunner::new(&point, order)?;
            let trials = point.trials_per_order;
            let run_one = |t: usize| -> Result<bool> {
                let seed = trial_seed(point.base_seed, sweep_index, order, t);
                Ok(runner.run(seed)?.estimated_order == order)
            };
            #[cfg(feature = "parallel")]
            let outcomes: Vec<bool> = (0..trials)
                .into_par_iter()
                .map(run_one)
                .collect::<Result<_>>()?;
            #[cfg(not(feature = "parallel"))]
            let outcomes: Vec<bool> = (0..trials).map(run_one).collect::<Result<_>>()?;
            tallies.push(OrderTally {
                order,
                correct: outcomes.iter().filter(|&&ok| ok).count(),
                trials,
            });
        }
        rows.push(SweepRow { value, tallies });
    }
    Ok(TprReport {
        variable,
        orders: config.orders.clone(),
        rows,
    })
}

/// Write a report as `tpr_vs_<variable>.csv` plus a companion gnuplot script,
/// creating the directory if needed. Returns the two paths.
pub fn emit_report(report: &TprReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("tpr_vs_{}", report.variable().as_str());
    let csv_path = dir.join(format!("{stem}.csv"));
    let file = std::fs::File::create(&csv_path)?;
    let mut out = BufWriter::new(file);
    write!(out, "sweep_value")?;
    for order in report.orders() {
        write!(out, ",tpr_order_{order}")?;
    }
    writeln!(out, ",avg_tpr")?;
    for row in report.rows() {
        write!(out, "{}", row.value)?;
        for tally in &row.tallies {
            write!(out, ",{}", tally.tpr())?;
        }
        writeln!(out, ",{}", row.average_tpr())?;
    }
    out.flush()?;

    let gp_path = dir.join(format!("{stem}.gp"));
    let file = std::fs::File::create(&gp_path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# gnuplot script for {stem}.csv")?;
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set xlabel '{}'", report.variable().axis_label())?;
    writeln!(out, "set ylabel 'true positive rate'")?;
    writeln!(out, "set yrange [0:1.05]")?;
    writeln!(out, "set key bottom right")?;
    writeln!(out, "set grid")?;
    writeln!(out, "set term pngcairo size 900,540")?;
    writeln!(out, "set output '{stem}.png'")?;
    write!(out, "plot")?;
    for (i, order) in report.orders().iter().enumerate() {
        write!(
            out,
            " '{stem}.csv' using 1:{} with linespoints title 'order {order}',",
            i + 2
        )?;
    }
    writeln!(
        out,
        " '{stem}.csv' using 1:{} with linespoints lw 3 title 'average'",
        report.orders().len() + 2
    )?;
    out.flush()?;
    Ok((csv_path, gp_path))
}

/// One run of a sweep preset: which variable to sweep, over which values,
/// plus an optional distance override and a label for separating output
/// files when a preset expands to several runs.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub label: String,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub distance: Option<f64>,
}

/// Names accepted by [`sweep_preset`].
pub const SWEEP_PRESET_NAMES: &[&str] = &["fig5", "fig6", "fig8"];

/// The stock experiment layouts: a path-length sweep (`fig5`), a
/// snapshot-duration sweep run at both 50 cm and 75 cm (`fig6`), and an
/// antenna-count sweep (`fig8`).
pub fn sweep_preset(name: &str) -> Result<Vec<PresetRun>> {
    let ps = 1.0e-12;
    match name {
        "fig5" => Ok(vec![PresetRun {
            label: String::new(),
            variable: SweepVariable::PathLength,
            values: vec![0.01, 0.10, 0.25, 0.50, 0.75],
            distance: None,
        }]),
        "fig6" => Ok(vec![
            PresetRun {
                label: "50cm".into(),
                variable: SweepVariable::SnapshotDuration,
                values: vec![2.0 * ps, 4.0 * ps, 8.0 * ps, 16.0 * ps, 24.0 * ps, 32.0 * ps, 40.0 * ps, 48.0 * ps],
                distance: Some(0.50),
            },
            PresetRun {
                label: "75cm".into(),
                variable: SweepVariable::SnapshotDuration,
                values: vec![2.0 * ps, 4.0 * ps, 8.0 * ps, 16.0 * ps, 24.0 * ps, 32.0 * ps, 40.0 * ps, 48.0 * ps],
                distance: Some(0.75),
            },
        ]),
        "fig8" => Ok(vec![PresetRun {
            label: String::new(),
            variable: SweepVariable::NumElements,
            values: vec![4.0, 8.0, 16.0],
            distance: None,
        }]),
        other => Err(Error::Config(format!(
            "unknown sweep preset {other:?}; available: {}",
            SWEEP_PRESET_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn noiseless_config() -> TrialConfig {
        TrialConfig {
            distance: 0.01,
            snapshot_duration: 8.0e-12,
            include_noise: false,
            trials_per_order: 2,
            ..TrialConfig::default()
        }
    }

    #[test]
    fn noiseless_trials_classify_correctly() {
        let config = noiseless_config();
        for order in [1u32, 4, 10] {
            let result = run_trial(&config, order, 0).unwrap();
            assert_eq!(result.estimated_order, order, "order {order}");
            let doa = result.doa_estimate.unwrap();
            assert!(
                (doa - DEFAULT_DOA_DEG).abs() <= 0.025,
                "order {order}: DOA {doa}"
            );
        }
    }

    #[test]
    fn identical_seeds_reproduce_results() {
        let mut config = noiseless_config();
        config.include_noise = true;
        config.distance = 0.5;
        config.snapshot_duration = 2.0e-12;
        let a = run_trial(&config, 4, 77).unwrap();
        let b = run_trial(&config, 4, 77).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.measured_spread.to_bits(), b.measured_spread.to_bits());
    }

    #[test]
    fn trial_seeds_are_locally_unique() {
        let mut seen = HashSet::new();
        for sweep in 0..3usize {
            for order in [1u32, 4, 10] {
                for t in 0..10usize {
                    assert!(
                        seen.insert(trial_seed(42, sweep, order, t)),
                        "seed collision at ({sweep}, {order}, {t})"
                    );
                }
            }
        }
        // base seed matters
        assert_ne!(trial_seed(1, 0, 1, 0), trial_seed(2, 0, 1, 0));
    }

    #[test]
    fn noiseless_sweep_point_scores_perfectly() {
        let config = noiseless_config();
        let report = tpr_sweep(&config, SweepVariable::PathLength, &[0.01]).unwrap();
        assert_eq!(report.rows().len(), 1);
        let row = &report.rows()[0];
        assert_eq!(row.value, 0.01);
        for tally in &row.tallies {
            assert_eq!(tally.trials, 2);
            assert_eq!(tally.correct, 2, "order {}", tally.order);
        }
        assert_eq!(row.average_tpr(), 1.0);
        assert_eq!(row.tpr_for(4), Some(1.0));
        // determinism of the whole report
        let again = tpr_sweep(&config, SweepVariable::PathLength, &[0.01]).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn noisy_sweep_is_deterministic_and_accounted() {
        let mut config = TrialConfig::new(6.0e12, 0.5, 2.0e-12);
        config.trials_per_order = 3;
        let report = tpr_sweep(&config, SweepVariable::PathLength, &[0.25, 0.5]).unwrap();
        assert_eq!(report.rows().len(), 2);
        for row in report.rows() {
            let total: usize = row.tallies.iter().map(|t| t.trials).sum();
            assert_eq!(total, 9, "3 orders × 3 trials");
            for t in &row.tallies {
                assert!(t.correct <= t.trials);
            }
        }
        let again = tpr_sweep(&config, SweepVariable::PathLength, &[0.25, 0.5]).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn sweep_rejects_invalid_values() {
        let config = noiseless_config();
        let err = tpr_sweep(&config, SweepVariable::SnapshotDuration, &[1.0e-12]).unwrap_err();
        assert!(err.to_string().contains("2 ps"), "message: {err}");
        assert!(tpr_sweep(&config, SweepVariable::NumElements, &[3.5]).is_err());
        assert!(tpr_sweep(&config, SweepVariable::NumElements, &[1.0]).is_err());
        assert!(tpr_sweep(&config, SweepVariable::PathLength, &[-0.1]).is_err());
    }

    #[test]
    fn config_validation_catches_bad_fields() {
        let mut c = TrialConfig::default();
        c.orders = vec![];
        assert!(c.validate().is_err());
        c.orders = vec![4, 1];
        assert!(c.validate().is_err());
        c.orders = vec![1, 1];
        assert!(c.validate().is_err());
        c.orders = vec![1, 11];
        assert!(c.validate().is_err());
        let mut c = TrialConfig::default();
        c.trials_per_order = 0;
        assert!(c.validate().is_err());
        let mut c = TrialConfig::default();
        c.center_frequency = 20.0e12; // outside the band
        assert!(c.validate().is_err());
        let mut c = TrialConfig::default();
        c.spread_band = Some((5.0e12, 4.0e12));
        assert!(c.validate().is_err());
        assert!(TrialConfig::default().validate().is_ok());
    }

    #[test]
    fn report_csv_layout_and_round_trip() {
        let config = TrialConfig {
            trials_per_order: 1,
            ..noiseless_config()
        };
        let report = tpr_sweep(&config, SweepVariable::PathLength, &[0.01, 0.02]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let nested = dir.path().join("out").join("runs");
        let (csv, gp) = emit_report(&report, &nested).unwrap();
        assert_eq!(csv.file_name().unwrap(), "tpr_vs_path_length.csv");

        let text = std::fs::read_to_string(&csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("sweep_value,tpr_order_1,tpr_order_4,tpr_order_10,avg_tpr")
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 2);
        for (row_text, row) in rows.iter().zip(report.rows()) {
            let cols: Vec<f64> = row_text.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[0], row.value);
            for (i, tally) in row.tallies.iter().enumerate() {
                assert_eq!(cols[i + 1], tally.tpr());
            }
            assert_eq!(cols[4], row.average_tpr());
        }

        let script = std::fs::read_to_string(&gp).unwrap();
        assert!(script.contains("tpr_vs_path_length.csv"));
        assert!(script.contains("path length (m)"));
    }

    #[test]
    fn empty_report_emits_header_only() {
        let config = noiseless_config();
        let report = tpr_sweep(&config, SweepVariable::NumElements, &[]).unwrap();
        assert!(report.rows().is_empty());
        let dir = tempfile::tempdir().unwrap();
        let (csv, _) = emit_report(&report, dir.path()).unwrap();
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn preset_catalog_matches_standard_layouts() {
        let fig5 = sweep_preset("fig5").unwrap();
        assert_eq!(fig5.len(), 1);
        assert_eq!(fig5[0].variable, SweepVariable::PathLength);
        assert_eq!(fig5[0].values, vec![0.01, 0.10, 0.25, 0.50, 0.75]);

        let fig6 = sweep_preset("fig6").unwrap();
        assert_eq!(fig6.len(), 2);
        assert_eq!(fig6[0].distance, Some(0.50));
        assert_eq!(fig6[1].distance, Some(0.75));
        for run in &fig6 {
            assert_eq!(run.variable, SweepVariable::SnapshotDuration);
            assert_eq!(run.values.first().copied(), Some(2.0e-12));
            assert_eq!(run.values.last().copied(), Some(48.0e-12));
        }
        assert_ne!(fig6[0].label, fig6[1].label);

        let fig8 = sweep_preset("fig8").unwrap();
        assert_eq!(fig8[0].values, vec![4.0, 8.0, 16.0]);

        let err = sweep_preset("fig9").unwrap_err().to_string();
        assert!(err.contains("fig5") && err.contains("fig6") && err.contains("fig8"));
    }

    #[test]
    fn absorption_source_parse_display_round_trip() {
        let b = AbsorptionSource::parse("builtin:summer-air").unwrap();
        assert_eq!(b, AbsorptionSource::Builtin("summer-air".into()));
        assert!(b.resolve().is_ok());
        assert_eq!(b.to_string(), "builtin:summer-air");

        let f = AbsorptionSource::parse("file:/tmp/table.csv").unwrap();
        assert_eq!(f, AbsorptionSource::File(PathBuf::from("/tmp/table.csv")));
        assert_eq!(f.to_string(), "file:/tmp/table.csv");

        assert!(AbsorptionSource::parse("summer-air").is_err());
        assert!(AbsorptionSource::parse("builtin:mars-winter").unwrap().resolve().is_err());
    }
}
