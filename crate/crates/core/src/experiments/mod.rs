//! Reproducible runners for each experiment.
//!
//! Every runner is a pure function of its arguments. Per-run seeds come
//! from [`derive_seed`], keyed on values (not positions), so adding a delay
//! or a reset value to a sweep leaves the other entries untouched.

mod difference;
mod injection;
mod reconstruction;
mod reset;
mod sweep;

pub use difference::{envelope_roughness, run_difference_analysis, DifferenceAnalysis};
pub use injection::{force_with_recorded_train, run_fixed_injection, InjectionRun, INJECTION_START};
pub use reconstruction::{
    forcing_schedule, match_orbits, reconstruct_with_schedule, run_reconstruction, MatchReport, Reconstruction,
    RECONSTRUCTION_RETRIES,
};
pub use reset::{
    diagnose_regime, run_reset_experiment, run_reset_scan, Regime, RegimeDiagnostics, ResetRun, ResetScanEntry,
    ResetScanReport, ALTERNATION_BAND, DIAGNOSTIC_WINDOW, RESET_SCAN_STEPS, SCAN_RANGE,
};
pub use sweep::{run_reliability_sweep, sweep_run_length, ReliabilityReport, SweepConfig, TauCounts};

use crate::analysis::Detector;
use crate::control::{ControlledRunConfig, FeedbackConnection, ResetPolicy, DEFAULT_CONTROL_ON};
use crate::error::Result;

/// Connection weight used by every feedback experiment.
pub const FEEDBACK_WEIGHT: f64 = 0.3;

/// Steps between a spike and the earliest spike its delayed feedback can
/// trigger, on top of the connection delay: one for the drive to reach `u`,
/// one for the threshold test to emit.
pub const FEEDBACK_LOOP_LATENCY: usize = 2;

/// Period of the spike pattern stabilized by a feedback connection with the
/// given delay.
pub fn loop_period(delay: usize) -> usize {
    delay + FEEDBACK_LOOP_LATENCY
}

pub const DEFAULT_RUN_STEPS: usize = 5000;
pub const LONG_RUN_STEPS: usize = 10_000;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `index` of the ensemble labelled `key` under `master`.
///
/// `key` is the ensemble's defining value (a delay, or the bit pattern of a
/// reset value), hashed in sequence with the master seed and the index.
pub fn derive_seed(master: u64, key: u64, index: u64) -> u64 {
    mix(mix(mix(master) ^ key) ^ index)
}

/// Standard single-connection feedback run starting from a random IC.
pub fn feedback_config(delay: usize, seed: u64, total_steps: usize, reset: ResetPolicy) -> Result<ControlledRunConfig> {
    let config = ControlledRunConfig {
        total_steps,
        control_on: DEFAULT_CONTROL_ON,
        feedback: vec![FeedbackConnection::new(FEEDBACK_WEIGHT, delay)?],
        reset,
        rng_seed: seed,
        ..ControlledRunConfig::default()
    };
    config.validate()?;
    Ok(config)
}

/// Detector for a feedback run with the given connection delay.
pub fn feedback_detector(delay: usize) -> Detector {
    Detector::new(loop_period(delay)).from_step(DEFAULT_CONTROL_ON)
}
