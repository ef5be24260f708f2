//! Replacing the feedback signal with a fixed value delivered once per period.

use crate::analysis::{classify_run, Detector, StabilizationVerdict};
use crate::control::{
    run_controlled, ControlledRunConfig, FixedInjection, InjectionMode, InputSchedule, RunRecord, DEFAULT_CONTROL_ON,
};
use crate::error::{Error, Result};

use super::FEEDBACK_WEIGHT;

/// Injection steps are counted from here, so phase 3 with period 100 fires
/// at 1003, 1103, ...
pub const INJECTION_START: usize = 1000;

#[derive(Debug, Clone)]
pub struct InjectionRun {
    pub record: RunRecord,
    pub verdict: StabilizationVerdict,
}

fn injection_detector(period: usize) -> Detector {
    Detector::new(period).from_step(DEFAULT_CONTROL_ON)
}

/// Assign-mode injection of `value` into `u`, no feedback connection.
/// Candidate orbit periods are multiples of the injection period.
pub fn run_fixed_injection(
    value: f64,
    phase: usize,
    period: usize,
    seed: u64,
    total_steps: usize,
) -> Result<InjectionRun> {
    if total_steps <= INJECTION_START {
        return Err(Error::invalid(format!("total_steps must exceed {INJECTION_START}")));
    }
    let config = ControlledRunConfig {
        total_steps,
        injections: vec![FixedInjection {
            value,
            phase,
            period,
            start_time: INJECTION_START,
            end_time: None,
            mode: InjectionMode::AssignToU,
        }],
        rng_seed: seed,
        ..ControlledRunConfig::default()
    };
    let record = run_controlled(&config)?;
    let verdict = classify_run(&record, &injection_detector(period));
    Ok(InjectionRun { record, verdict })
}

/// Feeds the final period of an injection run's spike pattern, tiled over the
/// whole controlled interval, to a neuron with neither feedback nor
/// injection. Each recorded spike contributes the feedback weight.
pub fn force_with_recorded_train(source: &InjectionRun, seed: u64, total_steps: usize) -> Result<InjectionRun> {
    let orbit_period = match source.verdict {
        StabilizationVerdict::Stabilized { period, .. } => period,
        _ => return Err(Error::invalid("source injection run is not stabilized")),
    };
    let base_period = source
        .record
        .config
        .injections
        .first()
        .map_or(orbit_period, |inj| inj.period);
    let spikes = &source.record.trajectory.spikes;
    let len = spikes.len();
    let phases: Vec<usize> = (len - orbit_period..len)
        .filter(|&t| spikes[t])
        .map(|t| t % orbit_period)
        .collect();
    let times = (DEFAULT_CONTROL_ON..total_steps)
        .filter(|t| phases.contains(&(t % orbit_period)))
        .collect();
    let config = ControlledRunConfig {
        total_steps,
        inputs: vec![InputSchedule::new(times, FEEDBACK_WEIGHT)?],
        rng_seed: seed,
        ..ControlledRunConfig::default()
    };
    let record = run_controlled(&config)?;
    let verdict = classify_run(&record, &injection_detector(base_period));
    Ok(InjectionRun { record, verdict })
}
