//! Spike-train periodicity, lag differences and run classification.
//!
//! Two levels of stabilization are tracked:
//!
//! * spike-level: the binary spike pattern repeats exactly with the candidate
//!   period over a verification window, and the window holds at least one
//!   spike (a silent neuron is not an orbit);
//! * full: the lag-period sup-norm distance of `(x, y, u)` stays below a
//!   tolerance over a verification window.

use crate::control::RunRecord;
use crate::model::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTrain {
    pub times: Vec<usize>,
    pub horizon: usize,
}

impl SpikeTrain {
    pub fn new(times: Vec<usize>, horizon: usize) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(times.last().is_none_or(|&t| t < horizon));
        Self { times, horizon }
    }

    pub fn to_pattern(&self) -> Vec<bool> {
        let mut pattern = vec![false; self.horizon];
        for &t in &self.times {
            pattern[t] = true;
        }
        pattern
    }
}

pub fn extract_spikes(trajectory: &Trajectory) -> SpikeTrain {
    spike_train_from_pattern(&trajectory.spikes)
}

pub fn spike_train_from_pattern(pattern: &[bool]) -> SpikeTrain {
    let times = pattern
        .iter()
        .enumerate()
        .filter_map(|(t, &s)| s.then_some(t))
        .collect();
    SpikeTrain::new(times, pattern.len())
}

/// Finds the earliest window start `t* >= from` such that for every `s` in
/// `[t*, t* + window)`, `s` spikes iff `s + period` spikes, with at least one
/// spike in the window. Returns the first spike at or after `t*`, i.e. the
/// onset of the periodic pattern.
///
/// # Panics
///
/// If `period` is zero or `window < 2 * period`.
pub fn spike_periodicity(train: &SpikeTrain, period: usize, window: usize, from: usize) -> Option<usize> {
    pattern_periodicity(&train.to_pattern(), period, window, from)
}

/// [`spike_periodicity`] on a dense spike pattern.
pub fn pattern_periodicity(pattern: &[bool], period: usize, window: usize, from: usize) -> Option<usize> {
    assert!(period > 0, "period must be positive");
    assert!(window >= 2 * period, "window must cover at least two periods");
    let horizon = pattern.len();
    // Every s + period must be inside the pattern: t* <= horizon - window - period.
    let last = horizon.checked_sub(window + period)?;
    if from > last {
        return None;
    }
    let mismatch = |s: usize| pattern[s] != pattern[s + period];

    let mut mismatches = (from..from + window).filter(|&s| mismatch(s)).count();
    let mut spikes = pattern[from..from + window].iter().filter(|&&b| b).count();
    let mut start = from;
    loop {
        if mismatches == 0 && spikes > 0 {
            return (start..start + window).find(|&s| pattern[s]);
        }
        if start >= last {
            return None;
        }
        let leaving = start;
        let entering = start + window;
        mismatches = mismatches + mismatch(entering) as usize - mismatch(leaving) as usize;
        spikes = spikes + pattern[entering] as usize - pattern[leaving] as usize;
        start += 1;
    }
}

/// Sup-norm of the lag-`lag` difference of the state at step `t`.
fn lag_distance(trajectory: &Trajectory, t: usize, lag: usize) -> f64 {
    let now = trajectory.states[t];
    let then = trajectory.states[t - lag];
    (now.x - then.x)
        .abs()
        .max((now.y - then.y).abs())
        .max((now.u - then.u).abs())
}

/// Earliest `t* >= lag` such that the lag distance stays below `epsilon`
/// for every `s` in `[t*, t* + window)`.
pub fn full_stabilization(trajectory: &Trajectory, lag: usize, epsilon: f64, window: usize) -> Option<usize> {
    full_stabilization_from(trajectory, lag, epsilon, window, 0)
}

pub fn full_stabilization_from(
    trajectory: &Trajectory,
    lag: usize,
    epsilon: f64,
    window: usize,
    from: usize,
) -> Option<usize> {
    assert!(lag > 0 && window >= lag, "require lag > 0 and window >= lag");
    let mut run = 0usize;
    for t in from.max(lag)..trajectory.len() {
        if lag_distance(trajectory, t, lag) < epsilon {
            run += 1;
            if run == window {
                return Some(t + 1 - window);
            }
        } else {
            run = 0;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    X,
    Y,
    U,
    /// Planar norm of the (x, y) difference.
    XyPlane,
    /// Euclidean norm of the (x, y, u) difference.
    XyzEuclidean,
}

impl Selector {
    pub fn name(&self) -> &'static str {
        match self {
            Selector::X => "x",
            Selector::Y => "y",
            Selector::U => "u",
            Selector::XyPlane => "xy-plane",
            Selector::XyzEuclidean => "xyz-euclidean",
        }
    }
}

/// `values[i]` is the difference at step `lag + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    pub variable: Selector,
    pub lag: usize,
    pub values: Vec<f64>,
}

impl DifferenceSeries {
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.lag).and_then(|i| self.values.get(i).copied())
    }

    /// First step from which every remaining value is below `threshold`.
    pub fn settles_below(&self, threshold: f64) -> Option<usize> {
        let tail = self.values.iter().rev().take_while(|&&v| v < threshold).count();
        (tail > 0).then(|| self.lag + self.values.len() - tail)
    }
}

/// # Panics
///
/// If the trajectory is not longer than `lag`.
pub fn difference_pattern(trajectory: &Trajectory, variable: Selector, lag: usize) -> DifferenceSeries {
    assert!(trajectory.len() > lag, "trajectory must be longer than the lag");
    let values = (lag..trajectory.len())
        .map(|t| {
            let now = trajectory.states[t];
            let then = trajectory.states[t - lag];
            let (dx, dy, du) = (now.x - then.x, now.y - then.y, now.u - then.u);
            match variable {
                Selector::X => dx.abs(),
                Selector::Y => dy.abs(),
                Selector::U => du.abs(),
                Selector::XyPlane => dx.hypot(dy),
                Selector::XyzEuclidean => (dx * dx + dy * dy + du * du).sqrt(),
            }
        })
        .collect();
    DifferenceSeries { variable, lag, values }
}

/// Signed `(dx, dy)` lag differences, for plotting the planar spiral.
pub fn xy_plane_pairs(trajectory: &Trajectory, lag: usize) -> Vec<(f64, f64)> {
    (lag..trajectory.len())
        .map(|t| {
            let now = trajectory.states[t];
            let then = trajectory.states[t - lag];
            (now.x - then.x, now.y - then.y)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Stabilized,
    Diverged,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizationVerdict {
    Stabilized {
        period: usize,
        spike_time: usize,
        full_time: Option<usize>,
    },
    Diverged {
        step: usize,
    },
    Unresolved,
}

impl StabilizationVerdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            StabilizationVerdict::Stabilized { .. } => VerdictKind::Stabilized,
            StabilizationVerdict::Diverged { .. } => VerdictKind::Diverged,
            StabilizationVerdict::Unresolved => VerdictKind::Unresolved,
        }
    }

    pub fn is_stabilized(&self) -> bool {
        self.kind() == VerdictKind::Stabilized
    }

    pub fn period(&self) -> Option<usize> {
        match *self {
            StabilizationVerdict::Stabilized { period, .. } => Some(period),
            _ => None,
        }
    }

    pub fn spike_stabilization_time(&self) -> Option<usize> {
        match *self {
            StabilizationVerdict::Stabilized { spike_time, .. } => Some(spike_time),
            _ => None,
        }
    }

    pub fn full_stabilization_time(&self) -> Option<usize> {
        match *self {
            StabilizationVerdict::Stabilized { full_time, .. } => full_time,
            _ => None,
        }
    }
}

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_MAX_MULTIPLE: usize = 10;
pub const DEFAULT_WINDOW_PERIODS: usize = 2;

/// Settings for [`classify_run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detector {
    /// Candidate periods are `m * base_period` for `m` in `1..=max_multiple`.
    pub base_period: usize,
    pub epsilon: f64,
    /// Verification window, in multiples of the candidate period.
    pub window_periods: usize,
    pub max_multiple: usize,
    /// Spike-level search starts here (typically when control switches on).
    pub search_from: usize,
}

impl Detector {
    pub fn new(base_period: usize) -> Self {
        Self {
            base_period,
            epsilon: DEFAULT_EPSILON,
            window_periods: DEFAULT_WINDOW_PERIODS,
            max_multiple: DEFAULT_MAX_MULTIPLE,
            search_from: 0,
        }
    }

    pub fn from_step(mut self, step: usize) -> Self {
        self.search_from = step;
        self
    }
}

pub fn classify_run(record: &RunRecord, detector: &Detector) -> StabilizationVerdict {
    if let Some(step) = record.diverged_at {
        return StabilizationVerdict::Diverged { step };
    }
    classify_trajectory(&record.trajectory, detector)
}

pub fn classify_trajectory(trajectory: &Trajectory, detector: &Detector) -> StabilizationVerdict {
    assert!(detector.base_period > 0 && detector.window_periods >= 2);
    for m in 1..=detector.max_multiple {
        let period = m * detector.base_period;
        let window = detector.window_periods * period;
        if let Some(spike_time) = pattern_periodicity(&trajectory.spikes, period, window, detector.search_from) {
            let full_time = full_stabilization(trajectory, period, detector.epsilon, window);
            return StabilizationVerdict::Stabilized {
                period,
                spike_time,
                full_time,
            };
        }
    }
    StabilizationVerdict::Unresolved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NdsState;

    fn tile(offsets: &[usize], period: usize, horizon: usize) -> SpikeTrain {
        let times = (0..horizon).filter(|t| offsets.contains(&(t % period))).collect();
        SpikeTrain::new(times, horizon)
    }

    #[test]
    fn extract_examples() {
        let traj = Trajectory {
            states: vec![NdsState::default(); 5],
            spikes: vec![false, true, false, false, true],
            start_time: 0,
        };
        assert_eq!(extract_spikes(&traj), SpikeTrain::new(vec![1, 4], 5));
        let silent = Trajectory {
            spikes: vec![false; 5],
            ..traj
        };
        assert!(extract_spikes(&silent).times.is_empty());
    }

    #[test]
    fn periodic_train_detected_from_start() {
        let train = tile(&[3, 38, 62, 82], 100, 2000);
        assert_eq!(spike_periodicity(&train, 100, 200, 0), Some(3));
        assert_eq!(spike_periodicity(&train, 100, 200, 4), Some(38));
    }

    #[test]
    fn empty_train_is_not_periodic() {
        let train = SpikeTrain::new(vec![], 2000);
        assert_eq!(spike_periodicity(&train, 100, 200, 0), None);
    }

    #[test]
    fn five_period_train() {
        let offsets = [3, 84, 103, 194, 203, 286, 303, 384, 403, 494];
        let train = tile(&offsets, 500, 6000);
        assert_eq!(spike_periodicity(&train, 100, 200, 0), None);
        assert!(spike_periodicity(&train, 500, 1000, 0).is_some());
    }

    #[test]
    fn periodicity_after_transient() {
        let mut times: Vec<usize> = vec![5, 17, 40, 41, 77];
        times.extend((300..3000).filter(|t| t % 50 == 7));
        let train = SpikeTrain::new(times, 3000);
        assert_eq!(spike_periodicity(&train, 50, 100, 0), Some(307));
    }

    #[test]
    fn full_stabilization_examples() {
        let states: Vec<NdsState> = (0..1000)
            .map(|t| {
                let phase = (t % 25) as f64;
                NdsState::new(phase.sin(), phase.cos(), phase * 0.01)
            })
            .collect();
        let traj = Trajectory {
            spikes: vec![false; states.len()],
            states,
            start_time: 0,
        };
        assert_eq!(full_stabilization(&traj, 25, 1e-6, 50), Some(25));
        assert_eq!(full_stabilization(&traj, 24, 1e-6, 50), None);
    }

    #[test]
    fn difference_examples() {
        let ramp = Trajectory {
            states: (0..100).map(|t| NdsState::new(t as f64, 1.0, -1.0)).collect(),
            spikes: vec![false; 100],
            start_time: 0,
        };
        let dx = difference_pattern(&ramp, Selector::X, 10);
        assert_eq!(dx.values.len(), 90);
        assert!(dx.values.iter().all(|&v| v == 10.0));
        let dy = difference_pattern(&ramp, Selector::Y, 10);
        assert!(dy.values.iter().all(|&v| v == 0.0));
        let e = difference_pattern(&ramp, Selector::XyzEuclidean, 10);
        assert!(e.values.iter().all(|&v| v == 10.0));
        assert_eq!(dx.at(10), Some(10.0));
        assert_eq!(dx.at(9), None);
        assert_eq!(dy.settles_below(1e-6), Some(10));
        assert_eq!(dx.settles_below(1e-6), None);
    }

    #[test]
    fn xy_pairs_are_signed() {
        let traj = Trajectory {
            states: (0..20).map(|t| NdsState::new(-(t as f64), t as f64, 0.0)).collect(),
            spikes: vec![false; 20],
            start_time: 0,
        };
        let pairs = xy_plane_pairs(&traj, 5);
        assert!(pairs.iter().all(|&(dx, dy)| dx == -5.0 && dy == 5.0));
        let plane = difference_pattern(&traj, Selector::XyPlane, 5);
        assert!(plane.values.iter().all(|&v| (v - 50f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn detector_picks_smallest_multiple() {
        let train = tile(&[3, 84, 103, 194, 203, 286, 303, 384, 403, 494], 500, 8000);
        let traj = Trajectory {
            states: vec![NdsState::default(); 8000],
            spikes: train.to_pattern(),
            start_time: 0,
        };
        let verdict = classify_trajectory(&traj, &Detector::new(100));
        assert_eq!(verdict.period(), Some(500));
        assert_eq!(verdict.spike_stabilization_time(), Some(3));
        // Constant state: fully stable from the first comparable index.
        assert_eq!(verdict.full_stabilization_time(), Some(500));
    }
}
