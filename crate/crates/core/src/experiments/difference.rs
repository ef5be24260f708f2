use crate::analysis::{
    classify_run, difference_pattern, xy_plane_pairs, DifferenceSeries, Selector, StabilizationVerdict,
};
use crate::control::{run_controlled, ResetPolicy, RunRecord, DEFAULT_CONTROL_ON};
use crate::error::{Error, Result};

use super::{feedback_config, feedback_detector, loop_period};

/// Lag differences of one feedback run.
#[derive(Debug, Clone)]
pub struct DifferenceAnalysis {
    pub record: RunRecord,
    pub verdict: StabilizationVerdict,
    pub lag: usize,
    pub x: DifferenceSeries,
    pub y: DifferenceSeries,
    pub u: DifferenceSeries,
    pub xy_plane: DifferenceSeries,
    /// Signed `(dx, dy)` pairs aligned with `xy_plane.values`.
    pub xy_pairs: Vec<(f64, f64)>,
    pub xyz: DifferenceSeries,
}

impl DifferenceAnalysis {
    pub fn from_record(record: RunRecord, verdict: StabilizationVerdict, lag: usize) -> Self {
        let traj = &record.trajectory;
        let series = |sel| difference_pattern(traj, sel, lag);
        let (x, y, u) = (series(Selector::X), series(Selector::Y), series(Selector::U));
        let xy_plane = series(Selector::XyPlane);
        let xyz = series(Selector::XyzEuclidean);
        let xy_pairs = xy_plane_pairs(traj, lag);
        Self {
            record,
            verdict,
            lag,
            x,
            y,
            u,
            xy_plane,
            xy_pairs,
            xyz,
        }
    }

    pub fn scalar_series(&self) -> [&DifferenceSeries; 3] {
        [&self.x, &self.y, &self.u]
    }
}

/// Feedback run with delay `tau` and its lag differences. The lag is the
/// detected orbit period, or the loop period when the run did not stabilize.
pub fn run_difference_analysis(tau: usize, seed: u64, total_steps: usize) -> Result<DifferenceAnalysis> {
    if total_steps <= DEFAULT_CONTROL_ON + 2 * tau {
        return Err(Error::invalid("total_steps must exceed control onset plus two delays"));
    }
    let config = feedback_config(tau, seed, total_steps, ResetPolicy::default())?;
    let record = run_controlled(&config)?;
    let verdict = classify_run(&record, &feedback_detector(tau));
    let lag = verdict.period().unwrap_or_else(|| loop_period(tau));
    if record.len() <= lag {
        return Err(Error::invalid("run diverged before one lag elapsed"));
    }
    Ok(DifferenceAnalysis::from_record(record, verdict, lag))
}

/// Mean absolute second difference of the log10 envelope of a decaying
/// difference series, where the envelope is the maximum over consecutive
/// blocks of `block` values. Only blocks from `from_step` until the envelope
/// first falls below `floor` are used. Smaller means smoother decay.
pub fn envelope_roughness(series: &DifferenceSeries, block: usize, from_step: usize, floor: f64) -> Option<f64> {
    let start = from_step.saturating_sub(series.lag);
    let envelope: Vec<f64> = series.values[start.min(series.values.len())..]
        .chunks(block)
        .map(|chunk| chunk.iter().copied().fold(0.0, f64::max))
        .take_while(|&m| m >= floor)
        .map(f64::log10)
        .collect();
    if envelope.len() < 3 {
        return None;
    }
    let n = envelope.len() - 2;
    let total: f64 = envelope.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]).abs()).sum();
    Some(total / n as f64)
}
