//! The discrete neuron map and free-running trajectories.
//!
//! One step of the map advances `(x, y, u)` from `t` to `t + 1`:
//!
//! ```text
//! x' = x + b(-y - u)
//! y' = y + c(x + a y)
//! u' = eta0                              if u > theta   (spike)
//! u' = u + d(v - u x + k u) + D(t)       otherwise
//! ```
//!
//! The spike `gamma(t + 1)` is emitted on the same transition that performs
//! the reset, so a single threshold test drives both.

use crate::error::{Error, Result};

pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdsParams {
    pub a: f64,
    pub v: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: f64,
    /// Firing threshold on `u`.
    pub theta: f64,
    /// Reset value assigned to `u` after a spike.
    pub eta0: f64,
    /// Any state component whose magnitude exceeds this is treated as an
    /// escape to infinity.
    pub divergence_bound: f64,
}

impl Default for NdsParams {
    fn default() -> Self {
        Self {
            a: 0.002,
            v: 0.002,
            b: 0.03,
            c: 0.03,
            d: 0.8,
            k: -0.057,
            theta: -0.01,
            eta0: -1.0,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
        }
    }
}

impl NdsParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a", self.a),
            ("v", self.v),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("k", self.k),
            ("theta", self.theta),
            ("eta0", self.eta0),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::invalid(format!("parameter {name} must be finite")));
            }
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return Err(Error::invalid("divergence_bound must be positive"));
        }
        Ok(())
    }

    /// The non-reset increment of `u`, excluding the drive.
    #[inline]
    pub fn u_increment(&self, x: f64, u: f64) -> f64 {
        self.d * (self.v - u * x + self.k * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NdsState {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

impl NdsState {
    pub const fn new(x: f64, y: f64, u: f64) -> Self {
        Self { x, y, u }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.u.is_finite()
    }

    pub fn within(&self, bound: f64) -> bool {
        // Written so that NaN fails the check.
        self.x.abs() <= bound && self.y.abs() <= bound && self.u.abs() <= bound
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.u]
    }
}

/// Raised by a single step whose result leaves the divergence bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Escape {
    pub state: NdsState,
}

/// One map step with an arbitrary reset rule.
///
/// `reset` receives the pre-reset `u` and returns the post-reset value. The
/// drive only enters the non-reset branch.
#[inline]
pub fn step_with_reset(
    state: NdsState,
    params: &NdsParams,
    drive: f64,
    reset: impl FnOnce(f64) -> f64,
) -> std::result::Result<(NdsState, bool), Escape> {
    let NdsState { x, y, u } = state;
    let next_x = x + params.b * (-y - u);
    let next_y = y + params.c * (x + params.a * y);
    let (next_u, spike) = if u > params.theta {
        (reset(u), true)
    } else {
        (u + params.u_increment(x, u) + drive, false)
    };
    let next = NdsState::new(next_x, next_y, next_u);
    if next.within(params.divergence_bound) {
        Ok((next, spike))
    } else {
        Err(Escape { state: next })
    }
}

/// One map step with the fixed reset `u' = params.eta0`.
pub fn nds_step(state: NdsState, params: &NdsParams, drive: f64) -> std::result::Result<(NdsState, bool), Escape> {
    step_with_reset(state, params, drive, |_| params.eta0)
}

/// States and spike outputs of one run.
///
/// `spikes[t]` is the output emitted by the transition into `states[t]`;
/// `spikes[0]` is always `false`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<NdsState>,
    pub spikes: Vec<bool>,
    pub start_time: usize,
}

impl Trajectory {
    pub fn with_capacity(initial: NdsState, capacity: usize) -> Self {
        let mut states = Vec::with_capacity(capacity);
        let mut spikes = Vec::with_capacity(capacity);
        states.push(initial);
        spikes.push(false);
        Self {
            states,
            spikes,
            start_time: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn push(&mut self, state: NdsState, spike: bool) {
        self.states.push(state);
        self.spikes.push(spike);
    }

    pub fn last(&self) -> Option<&NdsState> {
        self.states.last()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.x)
    }

    pub fn us(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.u)
    }

    pub fn spike_count(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }
}

/// Runs the map for `steps` transitions with no drive.
pub fn run_free(params: &NdsParams, initial: NdsState, steps: usize) -> Result<Trajectory> {
    run_free_driven(params, initial, steps, |_| 0.0)
}

/// Runs the map for `steps` transitions; `drive(t)` supplies D(t).
pub fn run_free_driven(
    params: &NdsParams,
    initial: NdsState,
    steps: usize,
    mut drive: impl FnMut(usize) -> f64,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    params.validate()?;
    if !initial.is_finite() {
        return Err(Error::invalid("initial state must be finite"));
    }
    let mut trajectory = Trajectory::with_capacity(initial, steps + 1);
    let mut state = initial;
    for t in 0..steps {
        match nds_step(state, params, drive(t)) {
            Ok((next, spike)) => {
                trajectory.push(next, spike);
                state = next;
            }
            Err(Escape { state }) => return Err(Error::Diverged { step: t + 1, state }),
        }
    }
    Ok(trajectory)
}
