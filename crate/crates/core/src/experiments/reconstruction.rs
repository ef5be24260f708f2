//! Re-creating a feedback-stabilized orbit by open-loop forcing.
//!
//! The stabilized spike pattern is turned into input schedules that deliver
//! exactly the drive the feedback loop delivered, tiled with the orbit's
//! period from control onset to the end of the run. A second neuron, started
//! from a different initial condition and with no feedback, is driven by
//! those schedules; its orbit is then compared with the original.

use crate::analysis::{classify_run, Detector, StabilizationVerdict};
use crate::control::{run_controlled, ControlledRunConfig, InputSchedule, RunRecord};
use crate::error::{Error, Result};

use super::{derive_seed, feedback_config, feedback_detector, LONG_RUN_STEPS};
use crate::control::ResetPolicy;

pub const RECONSTRUCTION_RETRIES: usize = 16;
const MATCH_TOLERANCE: f64 = 1e-6;

/// Aligned comparison of two periodic orbits over their final period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchReport {
    pub period: usize,
    /// Steps by which the forced run lags the original after alignment.
    pub shift: usize,
    pub max_u_distance: f64,
    pub max_state_distance: f64,
}

impl MatchReport {
    pub fn is_match(&self) -> bool {
        self.max_u_distance < MATCH_TOLERANCE
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub feedback: RunRecord,
    pub feedback_verdict: StabilizationVerdict,
    pub forced: RunRecord,
    pub forced_verdict: StabilizationVerdict,
    pub report: MatchReport,
    /// Feedback runs tried before one stabilized (1 = first seed worked).
    pub attempts: usize,
}

/// One schedule per feedback connection, reproducing that connection's
/// drive over the final period of the run, tiled from control onset.
///
/// The final period is used rather than the detected onset: the spike-level
/// verdict only checks a finite window, and the pattern can still slip by a
/// step after it.
pub fn forcing_schedule(record: &RunRecord, verdict: &StabilizationVerdict) -> Result<Vec<InputSchedule>> {
    let period = verdict
        .period()
        .ok_or_else(|| Error::ReconstructionFailed("source run is not stabilized".into()))?;
    let config = &record.config;
    let spikes = &record.trajectory.spikes;
    let len = spikes.len();
    let end = config.control_off.unwrap_or(config.total_steps).min(config.total_steps);
    config
        .feedback
        .iter()
        .map(|connection| {
            if len < period + connection.delay {
                return Err(Error::ReconstructionFailed(
                    "run shorter than one period plus the delay".into(),
                ));
            }
            let phases: Vec<usize> = (len - period..len)
                .filter(|&t| spikes[t - connection.delay])
                .map(|t| t % period)
                .collect();
            let times = (config.control_on..end)
                .filter(|t| phases.contains(&(t % period)))
                .collect();
            InputSchedule::new(times, connection.weight)
        })
        .collect()
}

/// Best alignment of the last period of `original` against `forced`.
///
/// Candidate shifts are those under which the two spike patterns agree over
/// the compared period; among them the one with the smallest `u` distance
/// wins.
pub fn match_orbits(original: &RunRecord, forced: &RunRecord, period: usize) -> Option<MatchReport> {
    let a = &original.trajectory;
    let b = &forced.trajectory;
    if a.len() < 2 * period || b.len() < 2 * period {
        return None;
    }
    let end_a = a.len();
    let end_b = b.len();
    let mut best: Option<MatchReport> = None;
    for shift in 0..period {
        let pair = |i: usize| (end_a - period + i, end_b - period + i - shift);
        let spikes_agree = (0..period).all(|i| {
            let (ia, ib) = pair(i);
            a.spikes[ia] == b.spikes[ib]
        });
        if !spikes_agree {
            continue;
        }
        let mut max_u = 0.0f64;
        let mut max_state = 0.0f64;
        for i in 0..period {
            let (ia, ib) = pair(i);
            let (sa, sb) = (a.states[ia], b.states[ib]);
            max_u = max_u.max((sa.u - sb.u).abs());
            max_state = max_state
                .max((sa.x - sb.x).abs())
                .max((sa.y - sb.y).abs())
                .max((sa.u - sb.u).abs());
        }
        if best.is_none_or(|r| max_u < r.max_u_distance) {
            best = Some(MatchReport {
                period,
                shift,
                max_u_distance: max_u,
                max_state_distance: max_state,
            });
        }
    }
    best
}

/// Drives a feedback-free copy of `original` (fresh IC from `forcing_seed`)
/// with `schedules` and compares the resulting orbit.
pub fn reconstruct_with_schedule(
    original: &RunRecord,
    verdict: &StabilizationVerdict,
    schedules: Vec<InputSchedule>,
    forcing_seed: u64,
    detector: &Detector,
) -> Result<(RunRecord, StabilizationVerdict, MatchReport)> {
    let period = verdict
        .period()
        .ok_or_else(|| Error::ReconstructionFailed("source run is not stabilized".into()))?;
    let config = ControlledRunConfig {
        feedback: Vec::new(),
        inputs: schedules,
        rng_seed: forcing_seed,
        ..original.config.clone()
    };
    let forced = run_controlled(&config)?;
    let forced_verdict = classify_run(&forced, detector);
    if !forced_verdict.is_stabilized() {
        return Err(Error::ReconstructionFailed(format!(
            "forced run did not stabilize ({:?})",
            forced_verdict.kind()
        )));
    }
    let report = match_orbits(original, &forced, period).unwrap_or(MatchReport {
        period,
        shift: 0,
        max_u_distance: f64::INFINITY,
        max_state_distance: f64::INFINITY,
    });
    Ok((forced, forced_verdict, report))
}

/// Stabilizes an orbit with delayed feedback, then re-creates it by forcing.
///
/// Feedback runs are retried with derived seeds until one stabilizes, up to
/// [`RECONSTRUCTION_RETRIES`].
pub fn run_reconstruction(tau: usize, seed: u64) -> Result<Reconstruction> {
    let detector = feedback_detector(tau);
    for attempt in 0..RECONSTRUCTION_RETRIES {
        let run_seed = derive_seed(seed, tau as u64, attempt as u64);
        let config = feedback_config(tau, run_seed, LONG_RUN_STEPS, ResetPolicy::default())?;
        let feedback = run_controlled(&config)?;
        let feedback_verdict = classify_run(&feedback, &detector);
        if !feedback_verdict.is_stabilized() {
            continue;
        }
        let schedules = forcing_schedule(&feedback, &feedback_verdict)?;
        let forcing_seed = derive_seed(run_seed, u64::MAX, 0);
        let (forced, forced_verdict, report) =
            reconstruct_with_schedule(&feedback, &feedback_verdict, schedules, forcing_seed, &detector)?;
        return Ok(Reconstruction {
            feedback,
            feedback_verdict,
            forced,
            forced_verdict,
            report,
            attempts: attempt + 1,
        });
    }
    Err(Error::ReconstructionFailed(format!(
        "no feedback run stabilized within {RECONSTRUCTION_RETRIES} seeds"
    )))
}
