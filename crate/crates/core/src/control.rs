//! Drive composition and controlled runs.
//!
//! The drive applied on the transition out of step `t` is
//! `D(t) = F(t) + I(t)` (plus any add-mode injections), where `F` sums
//! delayed copies of the neuron's own spikes and `I` sums external input
//! schedules. Drive is zero outside the `[control_on, control_off)` window.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{step_with_reset, Escape, NdsParams, NdsState, Trajectory};

/// Time-delayed self-feedback connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackConnection {
    pub weight: f64,
    pub delay: usize,
}

impl FeedbackConnection {
    pub fn new(weight: f64, delay: usize) -> Result<Self> {
        if delay == 0 {
            return Err(Error::invalid("feedback delay must be at least 1"));
        }
        if !weight.is_finite() {
            return Err(Error::invalid("feedback weight must be finite"));
        }
        Ok(Self { weight, delay })
    }
}

/// External spike train; every listed step contributes `amplitude` to the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSchedule {
    spike_times: Vec<usize>,
    pub amplitude: f64,
}

impl InputSchedule {
    pub fn new(spike_times: Vec<usize>, amplitude: f64) -> Result<Self> {
        if spike_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("input spike times must be strictly increasing"));
        }
        if !amplitude.is_finite() {
            return Err(Error::invalid("input amplitude must be finite"));
        }
        Ok(Self { spike_times, amplitude })
    }

    pub fn spike_times(&self) -> &[usize] {
        &self.spike_times
    }

    pub fn contains(&self, t: usize) -> bool {
        self.spike_times.binary_search(&t).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectionMode {
    /// Overwrite `u` after the step's update, before the next threshold test.
    AssignToU,
    /// Add the value to D(t).
    AddToDrive,
}

/// A fixed value delivered once per `period`, at steps where
/// `(t - start_time) % period == phase`, for `t` in `[start_time, end_time)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedInjection {
    pub value: f64,
    pub phase: usize,
    pub period: usize,
    pub start_time: usize,
    pub end_time: Option<usize>,
    pub mode: InjectionMode,
}

impl FixedInjection {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(Error::invalid("injection period must be positive"));
        }
        if self.phase >= self.period {
            return Err(Error::invalid("injection phase must be below the period"));
        }
        if let Some(end) = self.end_time {
            if end <= self.start_time {
                return Err(Error::invalid("injection end_time must follow start_time"));
            }
        }
        if !self.value.is_finite() {
            return Err(Error::invalid("injection value must be finite"));
        }
        Ok(())
    }

    pub fn fires_at(&self, t: usize) -> bool {
        t >= self.start_time
            && self.end_time.is_none_or(|end| t < end)
            && (t - self.start_time) % self.period == self.phase
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetPolicy {
    /// `u' = value`
    Fixed(f64),
    /// `u' = u + value`
    Relative(f64),
}

impl ResetPolicy {
    pub fn value(&self) -> f64 {
        match *self {
            ResetPolicy::Fixed(v) | ResetPolicy::Relative(v) => v,
        }
    }

    pub fn is_relative(&self) -> bool {
        matches!(self, ResetPolicy::Relative(_))
    }
}

impl Default for ResetPolicy {
    fn default() -> Self {
        ResetPolicy::Fixed(NdsParams::default().eta0)
    }
}

pub fn apply_reset(policy: ResetPolicy, u: f64) -> f64 {
    match policy {
        ResetPolicy::Fixed(value) => value,
        ResetPolicy::Relative(value) => u + value,
    }
}

/// Half-width of the default random initial-condition box.
pub const DEFAULT_IC_HALF_WIDTH: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Fixed(NdsState),
    /// Each component drawn uniformly from `[-half_width, half_width]`
    /// using the run's `rng_seed`.
    Random {
        half_width: f64,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Random {
            half_width: DEFAULT_IC_HALF_WIDTH,
        }
    }
}

impl InitialCondition {
    pub fn resolve(&self, seed: u64) -> NdsState {
        match *self {
            InitialCondition::Fixed(state) => state,
            InitialCondition::Random { half_width } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = || rng.gen_range(-half_width..=half_width);
                let x = draw();
                let y = draw();
                let u = draw();
                NdsState::new(x, y, u)
            }
        }
    }
}

pub const DEFAULT_CONTROL_ON: usize = 1001;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledRunConfig {
    pub params: NdsParams,
    pub initial: InitialCondition,
    pub total_steps: usize,
    pub control_on: usize,
    pub control_off: Option<usize>,
    pub feedback: Vec<FeedbackConnection>,
    pub inputs: Vec<InputSchedule>,
    pub injections: Vec<FixedInjection>,
    pub reset: ResetPolicy,
    pub rng_seed: u64,
}

impl Default for ControlledRunConfig {
    fn default() -> Self {
        Self {
            params: NdsParams::default(),
            initial: InitialCondition::default(),
            total_steps: 5000,
            control_on: DEFAULT_CONTROL_ON,
            control_off: None,
            feedback: Vec::new(),
            inputs: Vec::new(),
            injections: Vec::new(),
            reset: ResetPolicy::default(),
            rng_seed: 0,
        }
    }
}

impl ControlledRunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.total_steps == 0 {
            return Err(Error::invalid("total_steps must be at least 1"));
        }
        // Control may start after the run ends; it then never switches on.
        if self.control_off.is_some_and(|off| off < self.control_on) {
            return Err(Error::invalid("control_off must not precede control_on"));
        }
        if self.feedback.iter().any(|c| c.delay == 0) {
            return Err(Error::invalid("feedback delay must be at least 1"));
        }
        for injection in &self.injections {
            injection.validate()?;
        }
        if !self.reset.value().is_finite() {
            return Err(Error::invalid("reset value must be finite"));
        }
        if let InitialCondition::Random { half_width } = self.initial {
            if half_width < 0.0 || !half_width.is_finite() {
                return Err(Error::invalid("initial-condition half-width must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn control_active(&self, t: usize) -> bool {
        t >= self.control_on && self.control_off.is_none_or(|off| t < off)
    }

    pub fn initial_state(&self) -> NdsState {
        self.initial.resolve(self.rng_seed)
    }
}

/// `F(t) = sum_j w_j * gamma(t - tau_j)`; spikes before step 0 count as zero.
pub fn feedback_drive(spikes: &[bool], connections: &[FeedbackConnection], t: usize, active: bool) -> f64 {
    if !active {
        return 0.0;
    }
    connections
        .iter()
        .filter(|c| c.delay >= 1 && t >= c.delay && spikes.get(t - c.delay).copied().unwrap_or(false))
        .map(|c| c.weight)
        .sum()
}

/// `I(t)`: sum of amplitudes of the schedules that contain `t`.
pub fn input_drive(schedules: &[InputSchedule], t: usize) -> f64 {
    schedules.iter().filter(|s| s.contains(t)).map(|s| s.amplitude).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: ControlledRunConfig,
    pub trajectory: Trajectory,
    /// `drives[t]` is the D(t) applied on the transition out of step `t`.
    pub drives: Vec<f64>,
    pub spike_times: Vec<usize>,
    /// Step at which the divergence bound was exceeded, if it was.
    pub diverged_at: Option<usize>,
}

impl RunRecord {
    pub fn diverged(&self) -> bool {
        self.diverged_at.is_some()
    }

    pub fn len(&self) -> usize {
        self.trajectory.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.is_empty()
    }
}

fn total_drive(config: &ControlledRunConfig, spikes: &[bool], t: usize) -> f64 {
    if !config.control_active(t) {
        return 0.0;
    }
    let injected: f64 = config
        .injections
        .iter()
        .filter(|inj| inj.mode == InjectionMode::AddToDrive && inj.fires_at(t))
        .map(|inj| inj.value)
        .sum();
    feedback_drive(spikes, &config.feedback, t, true) + input_drive(&config.inputs, t) + injected
}

/// Iterates the map under the configured drive and reset policy.
///
/// Divergence does not return an error: the record is truncated at the last
/// in-bound state and `diverged_at` is set.
pub fn run_controlled(config: &ControlledRunConfig) -> Result<RunRecord> {
    config.validate()?;
    let initial = config.initial_state();
    let steps = config.total_steps;
    let mut trajectory = Trajectory::with_capacity(initial, steps + 1);
    let mut drives = Vec::with_capacity(steps + 1);
    let mut diverged_at = None;
    let mut state = initial;
    let reset = config.reset;

    for t in 0..steps {
        let drive = total_drive(config, &trajectory.spikes, t);
        drives.push(drive);
        let step = step_with_reset(state, &config.params, drive, |u| apply_reset(reset, u));
        let (mut next, spike) = match step {
            Ok(ok) => ok,
            Err(Escape { .. }) => {
                diverged_at = Some(t + 1);
                break;
            }
        };
        let next_t = t + 1;
        for inj in &config.injections {
            if inj.mode == InjectionMode::AssignToU && inj.fires_at(next_t) {
                next.u = inj.value;
            }
        }
        if !next.within(config.params.divergence_bound) {
            diverged_at = Some(next_t);
            break;
        }
        trajectory.push(next, spike);
        state = next;
    }
    if diverged_at.is_none() {
        drives.push(total_drive(config, &trajectory.spikes, steps));
    }
    debug_assert_eq!(drives.len(), trajectory.len());

    let spike_times = trajectory
        .spikes
        .iter()
        .enumerate()
        .filter_map(|(t, &s)| s.then_some(t))
        .collect();
    Ok(RunRecord {
        config: config.clone(),
        trajectory,
        drives,
        spike_times,
        diverged_at,
    })
}
