//! Flat `key = value` configuration files.
//!
//! ```text
//! # reset value for the scan below
//! eta0 = -1.59
//! tau_list = 50, 100, 250
//! ```
//!
//! Blank lines and `#` comments are ignored; a later line overrides an
//! earlier one. Unknown keys are an error.

use crate::control::{
    ControlledRunConfig, FeedbackConnection, InitialCondition, ResetPolicy, DEFAULT_CONTROL_ON, DEFAULT_IC_HALF_WIDTH,
};
use crate::error::{Error, Result};
use crate::model::{NdsParams, NdsState};
use crate::rossler::DEFAULT_DT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResetKind {
    #[default]
    Fixed,
    Relative,
}

/// Every knob the command-line tool exposes, with the model's defaults.
///
/// `None` means "use the subcommand's own default".
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub params: NdsParams,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub u0: Option<f64>,
    pub half_width: f64,
    pub steps: Option<usize>,
    pub control_on: usize,
    pub control_off: Option<usize>,
    pub tau: usize,
    pub weight: f64,
    pub reset: ResetKind,
    pub seed: u64,
    pub ics: Option<usize>,
    pub tau_list: Vec<usize>,
    pub eta0_list: Vec<f64>,
    pub parallel: usize,
    pub injection_value: f64,
    pub injection_phase: usize,
    pub injection_period: usize,
    /// Time step of the continuous reference integration.
    pub dt: f64,
}

/// Reset values covered by the default scan.
pub const DEFAULT_ETA0_LIST: [f64; 13] = [
    0.1, 0.0, -0.005, -0.02, -0.045, -0.05, -0.5, -1.0, -1.2, -1.4, -1.59, -1.8, -2.0,
];

impl Default for Settings {
    fn default() -> Self {
        Self {
            params: NdsParams::default(),
            x0: None,
            y0: None,
            u0: None,
            half_width: DEFAULT_IC_HALF_WIDTH,
            steps: None,
            control_on: DEFAULT_CONTROL_ON,
            control_off: None,
            tau: 100,
            weight: 0.3,
            reset: ResetKind::Fixed,
            seed: 0,
            ics: None,
            tau_list: vec![50, 100, 250, 500, 1000],
            eta0_list: DEFAULT_ETA0_LIST.to_vec(),
            parallel: 1,
            injection_value: 1.0,
            injection_phase: 3,
            injection_period: 100,
            dt: DEFAULT_DT,
        }
    }
}

/// Keys accepted in a config file; some have a longer alias.
pub const KEYS: &[&str] = &[
    "a",
    "v",
    "b",
    "c",
    "d",
    "k",
    "theta",
    "eta0",
    "divergence_bound",
    "x0",
    "y0",
    "u0",
    "half_width",
    "steps",
    "control_on",
    "control_off",
    "tau",
    "weight",
    "reset",
    "seed",
    "ics",
    "tau_list",
    "eta0_list",
    "parallel",
    "injection_value",
    "injection_phase",
    "injection_period",
    "dt",
];

fn canonical(key: &str) -> Option<&'static str> {
    let key = match key {
        "total_steps" => "steps",
        "rng_seed" => "seed",
        "ics_per_tau" => "ics",
        "tau_values" => "tau_list",
        "parallelism" => "parallel",
        other => other,
    };
    KEYS.iter().copied().find(|k| *k == key)
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config_value(key, format!("cannot parse `{value}`")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| number(key, s))
        .collect()
}

impl Settings {
    /// Sets one key from its textual value. Accepts the aliases of [`KEYS`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let Some(key) = canonical(key) else {
            return Err(Error::config_value(key, "unknown key"));
        };
        let value = value.trim();
        let p = &mut self.params;
        match key {
            "a" => p.a = number(key, value)?,
            "v" => p.v = number(key, value)?,
            "b" => p.b = number(key, value)?,
            "c" => p.c = number(key, value)?,
            "d" => p.d = number(key, value)?,
            "k" => p.k = number(key, value)?,
            "theta" => p.theta = number(key, value)?,
            "eta0" => p.eta0 = number(key, value)?,
            "divergence_bound" => p.divergence_bound = number(key, value)?,
            "x0" => self.x0 = Some(number(key, value)?),
            "y0" => self.y0 = Some(number(key, value)?),
            "u0" => self.u0 = Some(number(key, value)?),
            "half_width" => self.half_width = number(key, value)?,
            "steps" => self.steps = Some(number(key, value)?),
            "control_on" => self.control_on = number(key, value)?,
            "control_off" => self.control_off = Some(number(key, value)?),
            "tau" => self.tau = number(key, value)?,
            "weight" => self.weight = number(key, value)?,
            "reset" => {
                self.reset = match value {
                    "fixed" => ResetKind::Fixed,
                    "relative" => ResetKind::Relative,
                    _ => return Err(Error::config_value(key, "expected `fixed` or `relative`")),
                }
            }
            "seed" => self.seed = number(key, value)?,
            "ics" => self.ics = Some(number(key, value)?),
            "tau_list" => self.tau_list = list(key, value)?,
            "eta0_list" => self.eta0_list = list(key, value)?,
            "parallel" => self.parallel = number(key, value)?,
            "injection_value" => self.injection_value = number(key, value)?,
            "injection_phase" => self.injection_phase = number(key, value)?,
            "injection_period" => self.injection_period = number(key, value)?,
            "dt" => self.dt = number(key, value)?,
            _ => unreachable!("every key in KEYS is handled"),
        }
        Ok(())
    }

    /// Domain checks; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let finite = [
            ("a", p.a),
            ("v", p.v),
            ("b", p.b),
            ("c", p.c),
            ("d", p.d),
            ("k", p.k),
            ("theta", p.theta),
            ("eta0", p.eta0),
            ("weight", self.weight),
            ("injection_value", self.injection_value),
        ];
        for (key, value) in finite {
            if !value.is_finite() {
                return Err(Error::config_value(key, "must be finite"));
            }
        }
        for (key, value) in [("x0", self.x0), ("y0", self.y0), ("u0", self.u0)] {
            if value.is_some_and(|v| !v.is_finite()) {
                return Err(Error::config_value(key, "must be finite"));
            }
        }
        let positive = |key: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::config_value(key, "must be positive"))
            }
        };
        positive("divergence_bound", p.divergence_bound > 0.0)?;
        positive("half_width", self.half_width >= 0.0 && self.half_width.is_finite())?;
        positive("steps", self.steps != Some(0))?;
        positive("tau", self.tau > 0)?;
        positive("ics", self.ics != Some(0))?;
        positive("parallel", self.parallel > 0)?;
        positive("injection_period", self.injection_period > 0)?;
        positive("dt", self.dt > 0.0 && self.dt.is_finite())?;
        if self.tau_list.is_empty() || self.tau_list.contains(&0) {
            return Err(Error::config_value("tau_list", "needs at least one positive delay"));
        }
        if self.eta0_list.is_empty() || self.eta0_list.iter().any(|v| !v.is_finite()) {
            return Err(Error::config_value("eta0_list", "needs at least one finite value"));
        }
        if self.injection_phase >= self.injection_period {
            return Err(Error::config_value(
                "injection_phase",
                "must be less than injection_period",
            ));
        }
        if let Some(off) = self.control_off {
            if off < self.control_on {
                return Err(Error::config_value("control_off", "must not precede control_on"));
            }
        }
        Ok(())
    }

    pub fn reset_policy(&self) -> ResetPolicy {
        match self.reset {
            ResetKind::Fixed => ResetPolicy::Fixed(self.params.eta0),
            ResetKind::Relative => ResetPolicy::Relative(self.params.eta0),
        }
    }

    /// A fixed IC when any of `x0`, `y0`, `u0` is set (missing ones are 0),
    /// otherwise a random one drawn from the seed.
    pub fn initial_condition(&self) -> InitialCondition {
        if self.x0.is_none() && self.y0.is_none() && self.u0.is_none() {
            InitialCondition::Random {
                half_width: self.half_width,
            }
        } else {
            InitialCondition::Fixed(NdsState::new(
                self.x0.unwrap_or(0.0),
                self.y0.unwrap_or(0.0),
                self.u0.unwrap_or(0.0),
            ))
        }
    }

    pub fn steps_or(&self, default: usize) -> usize {
        self.steps.unwrap_or(default)
    }

    /// Run configuration without any control input.
    pub fn base_config(&self, default_steps: usize) -> ControlledRunConfig {
        let total_steps = self.steps_or(default_steps);
        ControlledRunConfig {
            params: self.params,
            initial: self.initial_condition(),
            total_steps,
            control_on: self.control_on,
            control_off: self.control_off,
            reset: self.reset_policy(),
            rng_seed: self.seed,
            ..ControlledRunConfig::default()
        }
    }

    /// Run configuration with one feedback connection of delay `tau`.
    pub fn feedback_config(&self, default_steps: usize) -> Result<ControlledRunConfig> {
        Ok(ControlledRunConfig {
            feedback: vec![FeedbackConnection::new(self.weight, self.tau)?],
            ..self.base_config(default_steps)
        })
    }
}

/// Parses a config document on top of the defaults.
pub fn parse_config(text: &str) -> Result<Settings> {
    let mut settings = Settings::default();
    apply_config(&mut settings, text)?;
    settings.validate()?;
    Ok(settings)
}

/// Applies a config document on top of `settings` without validating.
pub fn apply_config(settings: &mut Settings, text: &str) -> Result<()> {
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("expected `key = value`, found `{line}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("invalid key `{key}`"),
            });
        }
        if canonical(key).is_none() {
            return Err(Error::ConfigSyntax {
                line: line_no,
                message: format!("unknown key `{key}`"),
            });
        }
        settings.set(key, value)?;
    }
    Ok(())
}
