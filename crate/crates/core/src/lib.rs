//! A discrete-time chaotic spiking neuron derived from the Rössler system,
//! and the experiments that stabilize its orbits with delayed self-feedback.
//!
//! - [`model`]: the map, single steps and free runs.
//! - [`control`]: feedback, input schedules, injections and reset policies.
//! - [`analysis`]: spike periodicity, lag differences and run verdicts.
//! - [`experiments`]: seeded, reproducible experiment runners.
//! - [`config`] and [`output`]: config files and CSV serialization.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod experiments;
pub mod model;
pub mod output;
pub mod rossler;

pub use analysis::{classify_run, Detector, StabilizationVerdict, VerdictKind};
pub use control::{run_controlled, ControlledRunConfig, FeedbackConnection, InitialCondition, ResetPolicy, RunRecord};
pub use error::{Error, Result};
pub use model::{nds_step, run_free, NdsParams, NdsState, Trajectory};
