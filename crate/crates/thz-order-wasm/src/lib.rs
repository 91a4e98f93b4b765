//! Browser bindings for the interactive demo page.
//!
//! Three operations back the three panels of `www/index.html`: a pulse
//! explorer, a single-trial classifier, and the absorption-spectrum viewer.
//! Each returns one JSON string so the JS side stays a thin canvas renderer
//! with no knowledge of the library types. The JSON builders are plain Rust
//! functions, so the whole crate is testable on the host target; only the
//! `#[wasm_bindgen]` shims are wasm-specific.

use thz_order::array::{build_frequency_grid, sample_covariance, ArrayConfig, SnapshotModel};
use thz_order::channel::{builtin_absorption_table, ChannelParams};
use thz_order::classifier::{
    build_reference_table, classify_order, estimate_psd, rms_spread_estimate,
};
use thz_order::doa::{estimate_doa, imusic_spectrum};
use thz_order::experiment::TrialConfig;
use thz_order::pulse::{PulseSpec, DESCRIPTOR_RESOLUTION};
use thz_order::DEFAULT_BAND;
use wasm_bindgen::prelude::*;

const THZ: f64 = 1.0e12;

/// Pulse descriptors plus a normalized PSD curve for one (order, f_c).
#[wasm_bindgen]
pub fn pulse_descriptor(order: u32, center_frequency_thz: f64) -> Result<String, JsValue> {
    pulse_descriptor_json(order, center_frequency_thz).map_err(|e| JsValue::from_str(&e))
}

/// One seeded classification trial at f_c = 6 THz with the builtin
/// absorption preset; returns the decision, the DOA estimate, the
/// per-candidate distances and the reconstructed PSD.
#[wasm_bindgen]
pub fn classify_pulse(
    order: u32,
    distance_cm: f64,
    snapshot_duration_ps: f64,
    seed: u32,
    include_noise: bool,
) -> Result<String, JsValue> {
    classify_pulse_json(order, distance_cm, snapshot_duration_ps, seed, include_noise)
        .map_err(|e| JsValue::from_str(&e))
}

/// The builtin molecular absorption spectrum, decimated for plotting.
#[wasm_bindgen]
pub fn absorption_curve() -> Result<String, JsValue> {
    absorption_curve_json().map_err(|e| JsValue::from_str(&e))
}

fn pulse_descriptor_json(order: u32, center_frequency_thz: f64) -> Result<String, String> {
    let fc = center_frequency_thz * THZ;
    let spec = PulseSpec::new(order, fc, 1.0e-6).map_err(|e| e.to_string())?;
    let band = spec.half_power_band().map_err(|e| e.to_string())?;
    let spread = spec
        .analytic_rms_spread(DEFAULT_BAND.0, DEFAULT_BAND.1)
        .map_err(|e| e.to_string())?;

    let points = 401usize;
    let (f_start, f_stop) = (0.5 * THZ, 10.5 * THZ);
    let step = (f_stop - f_start) / (points - 1) as f64;
    let frequencies: Vec<f64> = (0..points).map(|i| (f_start + i as f64 * step) / THZ).collect();
    let mut psd: Vec<f64> = frequencies.iter().map(|&f| spec.psd(f * THZ)).collect();
    let peak = psd.iter().cloned().fold(f64::MIN, f64::max);
    for v in &mut psd {
        *v /= peak;
    }

    Ok(serde_json::json!({
        "order": order,
        "center_frequency_thz": center_frequency_thz,
        "sigma_ps": spec.sigma() * 1.0e12,
        "f_low_thz": band.f_low / THZ,
        "f_high_thz": band.f_high / THZ,
        "bandwidth_3db_thz": band.bandwidth_3db / THZ,
        "rms_spread_thz": spread / THZ,
        "psd": { "frequency_thz": frequencies, "normalized": psd },
    })
    .to_string())
}

fn classify_pulse_json(
    order: u32,
    distance_cm: f64,
    snapshot_duration_ps: f64,
    seed: u32,
    include_noise: bool,
) -> Result<String, String> {
    let mut config = TrialConfig::new(
        6.0 * THZ,
        distance_cm / 100.0,
        snapshot_duration_ps * 1.0e-12,
    );
    config.include_noise = include_noise;
    config.validate().map_err(|e| e.to_string())?;
    if order == 0 || order > PulseSpec::MAX_ORDER {
        return Err(format!("order {order} outside the supported 1..=10"));
    }

    // The same chain TrialRunner uses, kept explicit here so the demo can
    // also hand the reconstructed PSD to the page.
    let classify = || -> thz_order::Result<serde_json::Value> {
        let table = config.absorption.resolve()?;
        let mut params = ChannelParams::new(config.distance, config.center_frequency)?;
        params.band = config.band;
        let grid = build_frequency_grid(config.band, config.snapshot_duration)?;
        let array = ArrayConfig::new(config.num_elements, config.element_spacing)?;
        let spec = PulseSpec::new(order, config.center_frequency, config.power)?;
        let model = SnapshotModel::build(
            &spec,
            &params,
            &table,
            &array,
            config.true_angle_deg,
            &grid,
            config.include_noise,
        )?;
        let covariances = sample_covariance(&model.synthesize(1, u64::from(seed))?)?;
        let spectrum = imusic_spectrum(&covariances, &grid, &config.angle_grid, &array)?;
        let theta = estimate_doa(&spectrum);
        let psd = estimate_psd(&covariances, theta, &array, &grid)?;
        let spread = rms_spread_estimate(&psd, config.center_frequency)?;
        let references = build_reference_table(
            &config.orders,
            config.center_frequency,
            config.band,
            DESCRIPTOR_RESOLUTION,
        )?;
        let result = classify_order(spread, &references)?;

        let peak = psd.values().iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        Ok(serde_json::json!({
            "true_order": order,
            "estimated_order": result.estimated_order,
            "correct": result.estimated_order == order,
            "measured_spread_thz": result.measured_spread / THZ,
            "doa_estimate_deg": theta,
            "true_angle_deg": config.true_angle_deg,
            "candidates": result
                .distances
                .iter()
                .map(|(n, d)| serde_json::json!({ "order": n, "distance_thz": d / THZ }))
                .collect::<Vec<_>>(),
            "psd": {
                "frequency_thz": grid.bins().iter().map(|f| f / THZ).collect::<Vec<_>>(),
                "normalized": psd.values().iter().map(|v| v / peak).collect::<Vec<_>>(),
            },
        }))
    };
    classify().map(|v| v.to_string()).map_err(|e| e.to_string())
}

fn absorption_curve_json() -> Result<String, String> {
    let table = builtin_absorption_table("summer-air").map_err(|e| e.to_string())?;
    let samples: Vec<(f64, f64)> = table.samples().collect();
    // every 5th point is plenty for a screen-width plot
    let decimated: Vec<&(f64, f64)> = samples.iter().step_by(5).collect();
    Ok(serde_json::json!({
        "frequency_thz": decimated.iter().map(|(f, _)| f / THZ).collect::<Vec<_>>(),
        "k_per_m": decimated.iter().map(|(_, k)| k).collect::<Vec<_>>(),
    })
    .to_string())
}
