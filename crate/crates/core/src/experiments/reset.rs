//! Reset-mechanism experiments: relative reset and the reset-value scan.

use std::fmt;

use rayon::prelude::*;

use crate::analysis::{classify_run, StabilizationVerdict, VerdictKind};
use crate::control::{run_controlled, ResetPolicy, RunRecord, DEFAULT_CONTROL_ON};
use crate::error::{Error, Result};
use crate::model::NdsParams;

use super::{derive_seed, feedback_config, feedback_detector};

const STANDARD_DELAY: usize = 100;

/// Width of the band below the threshold in which the neuron settles into
/// a two-valued `u` alternation.
pub const ALTERNATION_BAND: f64 = 0.035;

/// Range of reset values the scan accepts.
pub const SCAN_RANGE: (f64, f64) = (-2.0, 0.1);

/// Default horizon of a scan run; deep reset values stabilize late.
pub const RESET_SCAN_STEPS: usize = 20_000;

/// Steps after the transient that [`diagnose_regime`] inspects in a scan.
/// Near-threshold runs spiral outwards and eventually escape, so the
/// diagnostics look at a bounded stretch rather than the whole run.
pub const DIAGNOSTIC_WINDOW: usize = 4000;

/// Roughly one revolution of the x-y rotation, 2*pi/sqrt(b*c) steps.
const ROTATION_WINDOW: usize = 210;

#[derive(Debug, Clone)]
pub struct ResetRun {
    pub record: RunRecord,
    pub verdict: StabilizationVerdict,
}

/// Standard feedback run (delay 100, weight 0.3) under `policy`.
pub fn run_reset_experiment(policy: ResetPolicy, seed: u64, total_steps: usize) -> Result<ResetRun> {
    let config = feedback_config(STANDARD_DELAY, seed, total_steps, policy)?;
    let record = run_controlled(&config)?;
    let verdict = classify_run(&record, &feedback_detector(STANDARD_DELAY));
    Ok(ResetRun { record, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Reset above threshold: `u` pinned, spike every step, x-y spiral.
    AboveThreshold2D,
    /// Reset just below threshold: `u` flips between two values.
    NearThresholdAlternating,
    ChaoticStabilizing,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::AboveThreshold2D => "above-threshold-2D",
            Regime::NearThresholdAlternating => "near-threshold-alternating",
            Regime::ChaoticStabilizing => "chaotic-stabilizing",
        }
    }

    /// Regime predicted from where the reset value sits relative to `theta`.
    pub fn for_reset_value(eta0: f64, theta: f64) -> Self {
        if eta0 > theta {
            Regime::AboveThreshold2D
        } else if eta0 >= theta - ALTERNATION_BAND {
            Regime::NearThresholdAlternating
        } else {
            Regime::ChaoticStabilizing
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Measurements taken on the post-transient part of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDiagnostics {
    pub constant_u: bool,
    pub spikes_every_step: bool,
    /// Per-revolution maximum of the x-y radius never shrinks.
    pub radius_non_decreasing: bool,
    /// `u` splits into two clusters and switches between them on most steps.
    pub two_valued_alternation: bool,
    pub xy_oscillating: bool,
}

impl RegimeDiagnostics {
    pub fn measured_regime(&self) -> Regime {
        if self.constant_u && self.spikes_every_step {
            Regime::AboveThreshold2D
        } else if self.two_valued_alternation && self.xy_oscillating {
            Regime::NearThresholdAlternating
        } else {
            Regime::ChaoticStabilizing
        }
    }
}

fn two_cluster_alternation(us: &[f64]) -> bool {
    if us.len() < 4 {
        return false;
    }
    let mut sorted = us.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (split, gap) = sorted
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i + 1, w[1] - w[0]))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two values");
    if gap <= 0.0 {
        return false;
    }
    let low_spread = sorted[split - 1] - sorted[0];
    let high_spread = sorted[sorted.len() - 1] - sorted[split];
    if gap < low_spread.max(high_spread) {
        return false;
    }
    let boundary = sorted[split - 1];
    let switches = us.windows(2).filter(|w| (w[0] > boundary) != (w[1] > boundary)).count();
    switches as f64 >= 0.75 * (us.len() - 1) as f64
}

/// Diagnostics over steps `[from, from + len)`, clipped to the record.
pub fn diagnose_regime(record: &RunRecord, from: usize, len: usize) -> RegimeDiagnostics {
    let traj = &record.trajectory;
    let start = from.min(traj.len());
    let end = from.saturating_add(len).min(traj.len());
    let post = &traj.states[start..end];
    let us: Vec<f64> = post.iter().map(|s| s.u).collect();

    let constant_u = !us.is_empty() && us.iter().all(|&u| u == us[0]);
    let spikes_every_step = end > start + 1 && traj.spikes[start + 1..end].iter().all(|&s| s);

    let radii: Vec<f64> = post
        .chunks(ROTATION_WINDOW)
        .filter(|c| c.len() == ROTATION_WINDOW)
        .map(|c| c.iter().map(|s| s.x.hypot(s.y)).fold(0.0, f64::max))
        .collect();
    let radius_non_decreasing = radii.len() >= 2 && radii.windows(2).all(|w| w[1] >= w[0]);

    let sign_changes = post.windows(2).filter(|w| (w[0].x < 0.0) != (w[1].x < 0.0)).count();

    RegimeDiagnostics {
        constant_u,
        spikes_every_step,
        radius_non_decreasing,
        two_valued_alternation: two_cluster_alternation(&us),
        xy_oscillating: sign_changes >= 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResetScanEntry {
    pub eta0: f64,
    /// Regime implied by the reset value's position relative to threshold.
    pub regime: Regime,
    /// Diagnostics of the first initial condition's run.
    pub diagnostics: RegimeDiagnostics,
    pub stabilized: usize,
    pub diverged: usize,
    pub unresolved: usize,
    pub reliability: f64,
    /// Mean spike-stabilization time over stabilized runs.
    pub mean_stabilization_time: Option<f64>,
}

impl ResetScanEntry {
    pub fn diagnostics_agree(&self) -> bool {
        self.diagnostics.measured_regime() == self.regime
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResetScanReport {
    /// One entry per scanned value, in the order given.
    pub entries: Vec<ResetScanEntry>,
    pub seed: u64,
}

impl ResetScanReport {
    pub fn entry(&self, eta0: f64) -> Option<&ResetScanEntry> {
        self.entries.iter().find(|e| e.eta0 == eta0)
    }
}

/// Scans fixed reset values, `ics_per_value` feedback runs each.
pub fn run_reset_scan(
    values: &[f64],
    ics_per_value: usize,
    seed: u64,
    total_steps: usize,
    parallelism: usize,
) -> Result<ResetScanReport> {
    if values.is_empty() || ics_per_value == 0 {
        return Err(Error::invalid(
            "reset scan needs at least one value and one initial condition",
        ));
    }
    if let Some(v) = values.iter().find(|v| !(SCAN_RANGE.0..=SCAN_RANGE.1).contains(*v)) {
        return Err(Error::invalid(format!(
            "reset value {v} outside [{}, {}]",
            SCAN_RANGE.0, SCAN_RANGE.1
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|v| (0..ics_per_value).map(move |i| (v, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let theta = NdsParams::default().theta;
    let transient = DEFAULT_CONTROL_ON + 1000;

    let runs: Vec<Result<(StabilizationVerdict, Option<RegimeDiagnostics>)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, i)| {
                let eta0 = values[v];
                let run_seed = derive_seed(seed, eta0.to_bits(), i as u64);
                let run = run_reset_experiment(ResetPolicy::Fixed(eta0), run_seed, total_steps)?;
                let diagnostics = (i == 0).then(|| diagnose_regime(&run.record, transient, DIAGNOSTIC_WINDOW));
                Ok((run.verdict, diagnostics))
            })
            .collect()
    });

    let mut entries = Vec::with_capacity(values.len());
    let mut runs = runs.into_iter();
    for &eta0 in values {
        let mut entry = ResetScanEntry {
            eta0,
            regime: Regime::for_reset_value(eta0, theta),
            diagnostics: RegimeDiagnostics {
                constant_u: false,
                spikes_every_step: false,
                radius_non_decreasing: false,
                two_valued_alternation: false,
                xy_oscillating: false,
            },
            stabilized: 0,
            diverged: 0,
            unresolved: 0,
            reliability: 0.0,
            mean_stabilization_time: None,
        };
        let mut time_sum = 0.0;
        for _ in 0..ics_per_value {
            let (verdict, diagnostics) = runs.next().expect("one result per job")?;
            if let Some(d) = diagnostics {
                entry.diagnostics = d;
            }
            match verdict.kind() {
                VerdictKind::Stabilized => {
                    entry.stabilized += 1;
                    time_sum += verdict.spike_stabilization_time().unwrap_or(0) as f64;
                }
                VerdictKind::Diverged => entry.diverged += 1,
                VerdictKind::Unresolved => entry.unresolved += 1,
            }
        }
        entry.reliability = entry.stabilized as f64 / ics_per_value as f64;
        entry.mean_stabilization_time = (entry.stabilized > 0).then(|| time_sum / entry.stabilized as f64);
        entries.push(entry);
    }
    Ok(ResetScanReport { entries, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_boundaries() {
        let theta = -0.01;
        assert_eq!(Regime::for_reset_value(0.1, theta), Regime::AboveThreshold2D);
        assert_eq!(Regime::for_reset_value(-0.005, theta), Regime::AboveThreshold2D);
        assert_eq!(Regime::for_reset_value(-0.01, theta), Regime::NearThresholdAlternating);
        assert_eq!(Regime::for_reset_value(-0.02, theta), Regime::NearThresholdAlternating);
        assert_eq!(Regime::for_reset_value(-0.045, theta), Regime::NearThresholdAlternating);
        assert_eq!(Regime::for_reset_value(-0.05, theta), Regime::ChaoticStabilizing);
        assert_eq!(Regime::for_reset_value(-2.0, theta), Regime::ChaoticStabilizing);
    }

    #[test]
    fn alternation_detector() {
        let alt: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { -0.02 } else { 0.27 + i as f64 * 1e-4 })
            .collect();
        assert!(two_cluster_alternation(&alt));
        let ramp: Vec<f64> = (0..100).map(|i| -0.045 + (i % 9) as f64 * 0.004).collect();
        assert!(!two_cluster_alternation(&ramp));
        assert!(!two_cluster_alternation(&[0.1; 50]));
    }

    #[test]
    fn scan_rejects_out_of_range() {
        assert!(run_reset_scan(&[0.2], 1, 0, 3000, 1).is_err());
        assert!(run_reset_scan(&[-2.5], 1, 0, 3000, 1).is_err());
        assert!(run_reset_scan(&[], 1, 0, 3000, 1).is_err());
    }
}
