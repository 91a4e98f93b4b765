//! Acceptance gate: one test per deliverable claim, each ending in a single
//! `criterion N PASS — …` line (visible with `--nocapture`; failures panic
//! with the same wording). Expensive Monte Carlo points are computed once and
//! shared between criteria through `OnceLock` caches.

use std::sync::OnceLock;
use std::time::{Duration, Instant};
use thz_order::array::{build_frequency_grid, sample_covariance, ArrayConfig, SnapshotModel};
use thz_order::channel::{builtin_absorption_table, channel_response, ChannelParams};
use thz_order::classifier::estimate_psd;
use thz_order::experiment::{
    emit_report, run_trial, tpr_sweep, trial_seed, SweepVariable, TrialConfig, TrialRunner,
};
use thz_order::pulse::PulseSpec;
use thz_order::{DEFAULT_BAND, DEFAULT_DOA_DEG, DEFAULT_SPACING};

/// Published pulse descriptors: (order, f_l, f_h, B_3dB, Γ), all in THz,
/// for the [1, 10] THz evaluation band. The implementation must land within
/// 1% of every entry.
const EXPECTED_3THZ: [(u32, f64, f64, f64, f64); 10] = [
    (1, 1.444, 4.909, 3.464, 1.451),
    (2, 1.850, 4.324, 2.473, 1.038),
    (3, 2.045, 4.071, 2.026, 0.855),
    (4, 2.164, 3.922, 1.757, 0.744),
    (5, 2.248, 3.821, 1.573, 0.666),
    (6, 2.310, 3.747, 1.437, 0.609),
    (7, 2.359, 3.690, 1.331, 0.564),
    (8, 2.398, 3.644, 1.245, 0.528),
    (9, 2.431, 3.606, 1.174, 0.498),
    (10, 2.459, 3.574, 1.114, 0.472),
];
const EXPECTED_6THZ: [(u32, f64, f64, f64, f64); 10] = [
    (1, 2.889, 9.819, 6.929, 2.119),
    (2, 3.701, 8.649, 4.947, 1.809),
    (3, 4.090, 8.142, 4.052, 1.597),
    (4, 4.329, 7.844, 3.515, 1.436),
    (5, 4.496, 7.643, 3.147, 1.309),
    (6, 4.620, 7.495, 2.874, 1.207),
    (7, 4.718, 7.381, 2.662, 1.124),
    (8, 4.797, 7.289, 2.491, 1.054),
    (9, 4.863, 7.213, 2.349, 0.995),
    (10, 4.919, 7.149, 2.229, 0.945),
];

const THZ: f64 = 1.0e12;

#[test]
fn criterion_1_descriptor_table_reproduction() {
    let mut max_rel = 0.0f64;
    for (fc, expected) in [(3.0 * THZ, &EXPECTED_3THZ), (6.0 * THZ, &EXPECTED_6THZ)] {
        for &(order, f_l, f_h, b_3db, gamma) in expected.iter() {
            let spec = PulseSpec::new(order, fc, 1.0e-6).unwrap();
            let band = spec.half_power_band().unwrap();
            let spread = spec
                .analytic_rms_spread(DEFAULT_BAND.0, DEFAULT_BAND.1)
                .unwrap();
            for (computed, reference) in [
                (band.f_low, f_l * THZ),
                (band.f_high, f_h * THZ),
                (band.bandwidth_3db, b_3db * THZ),
                (spread, gamma * THZ),
            ] {
                let rel = (computed - reference).abs() / reference;
                max_rel = max_rel.max(rel);
                assert!(
                    rel <= 0.01,
                    "criterion 1 FAIL — order {order} at {:.0} THz: computed {computed:.4e} \
                     vs published {reference:.4e} ({:.2}% off)",
                    fc / THZ,
                    rel * 100.0
                );
            }
        }
    }
    println!(
        "criterion 1 PASS — descriptor table: 20 rows × 4 columns within 1% \
         (max relative error {:.2e})"
        , max_rel
    );
}

struct NoiselessRun {
    fc: f64,
    distance: f64,
    order: u32,
    estimated: u32,
    doa: f64,
}

struct NoiselessBlock {
    runs: Vec<NoiselessRun>,
    elapsed: Duration,
}

/// The shared noiseless campaign: N = 8, ΔT = 8 ps, θ = 15.7125°, over
/// d_r ∈ {1, 10, 50} cm × f_c ∈ {3, 6} THz × n ∈ {1, 4, 10} × 50 seeds.
fn noiseless_block() -> &'static NoiselessBlock {
    static BLOCK: OnceLock<NoiselessBlock> = OnceLock::new();
    BLOCK.get_or_init(|| {
        let start = Instant::now();
        let mut runs = Vec::with_capacity(900);
        for fc in [3.0 * THZ, 6.0 * THZ] {
            for distance in [0.01, 0.10, 0.50] {
                for order in [1u32, 4, 10] {
                    let mut config = TrialConfig::new(fc, distance, 8.0e-12);
                    config.include_noise = false;
                    config.trials_per_order = 50;
                    let runner = TrialRunner::new(&config, order).unwrap();
                    for trial in 0..50 {
                        let seed = trial_seed(config.base_seed, 0, order, trial);
                        let result = runner.run(seed).unwrap();
                        runs.push(NoiselessRun {
                            fc,
                            distance,
                            order,
                            estimated: result.estimated_order,
                            doa: result.doa_estimate.unwrap(),
                        });
                    }
                }
            }
        }
        NoiselessBlock {
            runs,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_2_noiseless_classification_is_perfect() {
    let block = noiseless_block();
    assert_eq!(block.runs.len(), 900);
    for run in &block.runs {
        assert_eq!(
            run.estimated, run.order,
            "criterion 2 FAIL — order {} misread as {} at fc {:.0} THz, d {} m",
            run.order,
            run.estimated,
            run.fc / THZ,
            run.distance
        );
    }
    assert!(
        block.elapsed < Duration::from_secs(60),
        "criterion 2 FAIL — campaign took {:?}, budget is one minute",
        block.elapsed
    );
    println!(
        "criterion 2 PASS — noiseless pipeline: 900/900 trials classified correctly in {:.1?}",
        block.elapsed
    );
}

#[test]
fn criterion_3_doa_within_tolerance_every_trial() {
    let block = noiseless_block();
    let mut worst = 0.0f64;
    for run in &block.runs {
        let err = (run.doa - DEFAULT_DOA_DEG).abs();
        worst = worst.max(err);
        assert!(
            err <= 0.025,
            "criterion 3 FAIL — DOA {:.4}° (error {err:.4}°) at fc {:.0} THz, d {} m",
            run.doa,
            run.fc / THZ,
            run.distance
        );
    }
    println!(
        "criterion 3 PASS — DOA within 0.025° of {DEFAULT_DOA_DEG}° in all 900 trials \
         (worst error {worst:.4}°)"
    );
}

#[test]
fn criterion_4_covariance_convergence() {
    let table = builtin_absorption_table("summer-air").unwrap();
    let params = ChannelParams::new(0.10, 6.0 * THZ).unwrap();
    let grid = build_frequency_grid(DEFAULT_BAND, 2.0e-12).unwrap();
    let array = ArrayConfig::new(8, DEFAULT_SPACING).unwrap();
    let spec = PulseSpec::new(4, 6.0 * THZ, 1.0e-6).unwrap();
    let model =
        SnapshotModel::build(&spec, &params, &table, &array, DEFAULT_DOA_DEG, &grid, true).unwrap();

    let snapshots = model.synthesize(1000, 4242).unwrap();
    let sample = sample_covariance(&snapshots).unwrap();
    let analytic = model.analytic_covariances().unwrap();

    // Mid-band bin (5.5 THz) where signal and noise both contribute.
    let bin = 9;
    let r_hat = sample.bin(bin);
    let r = analytic.bin(bin);
    let rel = r_hat.sub(r).frobenius_norm() / r.frobenius_norm();
    assert!(
        rel <= 0.05,
        "criterion 4 FAIL — K=1000 Frobenius relative error {rel:.4} > 0.05"
    );
    println!(
        "criterion 4 PASS — covariance convergence: K=1000 Frobenius relative error {rel:.4} \
         ≤ 0.05 at the {:.1} THz bin",
        grid.bins()[bin] / THZ
    );
}

struct NoisyPoint {
    avg: f64,
    per_order: Vec<(u32, f64)>,
}

/// One 200-trial-per-order Monte Carlo point at f_c = 6 THz with the builtin
/// absorption preset.
fn measure_point(num_elements: usize, snapshot_duration: f64, distance: f64) -> NoisyPoint {
    let mut config = TrialConfig::new(6.0 * THZ, distance, snapshot_duration);
    config.num_elements = num_elements;
    let report = tpr_sweep(&config, SweepVariable::PathLength, &[distance]).unwrap();
    let row = &report.rows()[0];
    NoisyPoint {
        avg: row.average_tpr(),
        per_order: row.tallies.iter().map(|t| (t.order, t.tpr())).collect(),
    }
}

/// The flagship point (N = 8, ΔT = 16 ps, d_r = 50 cm) feeds three different
/// checks, so compute it once.
fn flagship_point() -> &'static NoisyPoint {
    static POINT: OnceLock<NoisyPoint> = OnceLock::new();
    POINT.get_or_init(|| measure_point(8, 16.0e-12, 0.50))
}

#[test]
fn criterion_5_noisy_tpr_at_16ps_and_distance_ordering() {
    let at_50cm = flagship_point();
    let at_75cm = measure_point(8, 16.0e-12, 0.75);
    assert!(
        at_50cm.avg >= 0.95,
        "criterion 5 FAIL — average TPR {:.3} at 16 ps / 50 cm, need ≥ 0.95 (per-order {:?})",
        at_50cm.avg,
        at_50cm.per_order
    );
    assert!(
        at_50cm.avg >= at_75cm.avg,
        "criterion 5 FAIL — average TPR {:.3} at 50 cm below {:.3} at 75 cm",
        at_50cm.avg,
        at_75cm.avg
    );
    println!(
        "criterion 5 PASS — noisy regime: average TPR {:.3} at 16 ps / 50 cm (≥ 0.95) and \
         ≥ {:.3} at 75 cm",
        at_50cm.avg, at_75cm.avg
    );
}

#[test]
fn criterion_6_antenna_count_insensitivity() {
    let avg_4 = measure_point(4, 16.0e-12, 0.50).avg;
    let avg_8 = flagship_point().avg;
    let avg_16 = measure_point(16, 16.0e-12, 0.50).avg;
    let lo = avg_4.min(avg_8).min(avg_16);
    let hi = avg_4.max(avg_8).max(avg_16);
    assert!(
        hi - lo <= 0.05,
        "criterion 6 FAIL — average TPR spans {:.3}..{:.3} over N ∈ {{4, 8, 16}}, \
         more than 5 points",
        lo,
        hi
    );
    println!(
        "criterion 6 PASS — antenna-count insensitivity: average TPR {avg_4:.3} / {avg_8:.3} / \
         {avg_16:.3} for N = 4 / 8 / 16 (span {:.1} points ≤ 5)",
        (hi - lo) * 100.0
    );
}

#[test]
fn criterion_7_property_suite_spot_checks() {
    // Normalization to 1e-6 for every order at both tabulated centers.
    for fc in [3.0 * THZ, 6.0 * THZ] {
        for order in 1..=10u32 {
            let spec = PulseSpec::new(order, fc, 1.0e-6).unwrap();
            let intervals = 8192;
            let h = 5.0 * fc / intervals as f64;
            let mut sum = spec.psd(0.0) + spec.psd(5.0 * fc);
            for i in 1..intervals {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += w * spec.psd(i as f64 * h);
            }
            let integral = sum * h / 3.0;
            let rel = (integral - 1.0e-6).abs() / 1.0e-6;
            assert!(
                rel <= 1.0e-6,
                "criterion 7 FAIL — normalization off by {rel:.2e} for order {order}"
            );
        }
    }

    // Strict spread monotonicity in order at both centers.
    for fc in [3.0 * THZ, 6.0 * THZ] {
        let mut previous = f64::INFINITY;
        for order in 1..=10u32 {
            let spread = PulseSpec::new(order, fc, 1.0e-6)
                .unwrap()
                .analytic_rms_spread(DEFAULT_BAND.0, DEFAULT_BAND.1)
                .unwrap();
            assert!(
                spread < previous,
                "criterion 7 FAIL — spread not decreasing at order {order}"
            );
            previous = spread;
        }
    }

    // Noiseless PSD recovery to 1e-9 at one representative operating point.
    {
        let table = builtin_absorption_table("summer-air").unwrap();
        let params = ChannelParams::new(0.10, 6.0 * THZ).unwrap();
        let grid = build_frequency_grid(DEFAULT_BAND, 8.0e-12).unwrap();
        let array = ArrayConfig::new(8, DEFAULT_SPACING).unwrap();
        let spec = PulseSpec::new(4, 6.0 * THZ, 1.0e-6).unwrap();
        let model =
            SnapshotModel::build(&spec, &params, &table, &array, DEFAULT_DOA_DEG, &grid, false)
                .unwrap();
        let covariances = sample_covariance(&model.synthesize(1, 7).unwrap()).unwrap();
        let psd = estimate_psd(&covariances, DEFAULT_DOA_DEG, &array, &grid).unwrap();
        let peak = psd.values().iter().cloned().fold(0.0, f64::max);
        for (&f, &est) in grid.bins().iter().zip(psd.values()) {
            let exact = spec.psd(f) * channel_response(f, &params, &table).unwrap().norm_sqr();
            assert!(
                (est - exact).abs() <= 1.0e-9 * exact.max(peak * 1.0e-12),
                "criterion 7 FAIL — PSD recovery off at {f:.3e} Hz"
            );
        }
    }

    // Power-scale invariance of the decision statistic.
    {
        let mut config = TrialConfig::new(6.0 * THZ, 0.01, 2.0e-12);
        config.include_noise = false;
        let low = run_trial(&config, 4, 0).unwrap();
        config.power *= 1.0e4;
        let high = run_trial(&config, 4, 0).unwrap();
        assert_eq!(low.estimated_order, high.estimated_order);
        let rel = (low.measured_spread - high.measured_spread).abs() / low.measured_spread;
        assert!(
            rel <= 1.0e-12,
            "criterion 7 FAIL — spread moved by {rel:.2e} under power scaling"
        );
    }

    // Seed determinism: two full sweep runs emit bit-identical CSVs.
    {
        let mut config = TrialConfig::new(6.0 * THZ, 0.25, 2.0e-12);
        config.trials_per_order = 3;
        let dir = tempfile::tempdir().unwrap();
        let mut csv_bytes = Vec::new();
        for run in ["a", "b"] {
            let report = tpr_sweep(&config, SweepVariable::PathLength, &[0.1, 0.25]).unwrap();
            let (csv, _) = emit_report(&report, &dir.path().join(run)).unwrap();
            csv_bytes.push(std::fs::read(csv).unwrap());
        }
        assert_eq!(
            csv_bytes[0], csv_bytes[1],
            "criterion 7 FAIL — sweep CSVs differ between identical runs"
        );
    }

    println!(
        "criterion 7 PASS — properties: normalization ≤ 1e-6, spread monotone in order, \
         noiseless PSD recovery ≤ 1e-9, power-scale invariance ≤ 1e-12, bit-identical sweep reruns"
    );
}

/// The snapshot-duration trend with the documented slack: lengthening the
/// snapshot from 2 ps to 16 ps must not cost average TPR (small dips allowed).
#[test]
fn experiment_invariant_snapshot_duration_trend() {
    let short = measure_point(8, 2.0e-12, 0.50);
    let long = flagship_point();
    assert!(
        long.avg >= short.avg - 0.02,
        "trend FAIL — average TPR {:.3} at 16 ps vs {:.3} at 2 ps",
        long.avg,
        short.avg
    );
    println!(
        "trend PASS — average TPR {:.3} at 16 ps ≥ {:.3} − 0.02 at 2 ps (d_r = 50 cm)",
        long.avg, short.avg
    );
}
