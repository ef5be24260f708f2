use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::analysis::{classify_run, StabilizationVerdict, VerdictKind};
use crate::control::{run_controlled, ControlledRunConfig, FeedbackConnection};
use crate::error::{Error, Result};

use super::reconstruction::reconstruct_with_schedule;
use super::{derive_seed, feedback_detector, forcing_schedule, loop_period, FEEDBACK_WEIGHT};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub tau_values: Vec<usize>,
    pub ics_per_tau: usize,
    /// Template for every run: parameters, reset policy, IC distribution and
    /// control onset are taken from here. A feedback connection in the
    /// template supplies the weight; its delay is replaced per entry.
    pub base: ControlledRunConfig,
    pub seed: u64,
    /// Worker threads; does not affect the result.
    pub parallelism: usize,
    /// Also re-create each stabilized orbit by open-loop forcing and count
    /// the successful reconstructions.
    pub measure_forcing: bool,
}

impl SweepConfig {
    /// Desk-scale sweep: five delays, 200 initial conditions each.
    pub fn desk_scale(seed: u64) -> Self {
        Self {
            tau_values: vec![50, 100, 250, 500, 1000],
            ics_per_tau: 200,
            base: ControlledRunConfig::default(),
            seed,
            parallelism: 1,
            measure_forcing: false,
        }
    }

    /// Every delay in `[50, 1000]` with 2000 initial conditions each.
    pub fn full_scale(seed: u64) -> Self {
        Self {
            tau_values: (50..=1000).collect(),
            ics_per_tau: 2000,
            ..Self::desk_scale(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_values.is_empty() {
            return Err(Error::invalid("tau_values must not be empty"));
        }
        if self.tau_values.contains(&0) {
            return Err(Error::invalid("tau values must be positive"));
        }
        if self.ics_per_tau == 0 {
            return Err(Error::invalid("ics_per_tau must be at least 1"));
        }
        self.base.validate()
    }

    fn weight(&self) -> f64 {
        self.base.feedback.first().map_or(FEEDBACK_WEIGHT, |c| c.weight)
    }
}

/// Horizon of a sweep entry: room for ~20 loop periods of transient after
/// control starts plus two verification windows.
pub fn sweep_run_length(control_on: usize, delay: usize) -> usize {
    let window = 2 * loop_period(delay);
    (control_on + 20 * delay + 2 * window).max(super::DEFAULT_RUN_STEPS)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TauCounts {
    pub stabilized: usize,
    pub diverged: usize,
    pub unresolved: usize,
    /// Stabilized runs that also reached full (state-level) stabilization.
    pub fully_stabilized: usize,
    /// Stabilized runs whose orbit was re-created by forcing; only counted
    /// when the sweep asks for it.
    pub forcing_reconstructed: Option<usize>,
    pub mean_spike_stabilization: Option<f64>,
}

impl TauCounts {
    pub fn total(&self) -> usize {
        self.stabilized + self.diverged + self.unresolved
    }

    pub fn reliability(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.stabilized as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityReport {
    pub per_tau: BTreeMap<usize, TauCounts>,
    pub overall_reliability: f64,
    pub seed: u64,
}

impl ReliabilityReport {
    fn sum(&self, f: impl Fn(&TauCounts) -> usize) -> usize {
        self.per_tau.values().map(f).sum()
    }

    pub fn total_runs(&self) -> usize {
        self.sum(TauCounts::total)
    }

    pub fn totals(&self) -> TauCounts {
        let forcing = self
            .per_tau
            .values()
            .map(|c| c.forcing_reconstructed)
            .sum::<Option<usize>>();
        let stabilized = self.sum(|c| c.stabilized);
        let weighted: f64 = self
            .per_tau
            .values()
            .filter_map(|c| c.mean_spike_stabilization.map(|m| m * c.stabilized as f64))
            .sum();
        TauCounts {
            stabilized,
            diverged: self.sum(|c| c.diverged),
            unresolved: self.sum(|c| c.unresolved),
            fully_stabilized: self.sum(|c| c.fully_stabilized),
            forcing_reconstructed: forcing,
            mean_spike_stabilization: (stabilized > 0).then(|| weighted / stabilized as f64),
        }
    }

    pub fn full_reliability(&self) -> f64 {
        let totals = self.totals();
        totals.fully_stabilized as f64 / totals.total().max(1) as f64
    }

    pub fn forcing_reliability(&self) -> Option<f64> {
        let totals = self.totals();
        totals
            .forcing_reconstructed
            .map(|n| n as f64 / totals.total().max(1) as f64)
    }
}

struct Outcome {
    verdict: StabilizationVerdict,
    forced: bool,
}

fn run_entry(config: &SweepConfig, delay: usize, index: usize) -> Result<Outcome> {
    let seed = derive_seed(config.seed, delay as u64, index as u64);
    let run_config = ControlledRunConfig {
        total_steps: sweep_run_length(config.base.control_on, delay),
        feedback: vec![FeedbackConnection::new(config.weight(), delay)?],
        rng_seed: seed,
        ..config.base.clone()
    };
    let record = run_controlled(&run_config)?;
    let detector = feedback_detector(delay).from_step(config.base.control_on);
    let verdict = classify_run(&record, &detector);
    let forced = match verdict {
        StabilizationVerdict::Stabilized { .. } if config.measure_forcing => {
            let schedule = forcing_schedule(&record, &verdict)?;
            let forcing_seed = derive_seed(seed, u64::MAX, 0);
            reconstruct_with_schedule(&record, &verdict, schedule, forcing_seed, &detector)
                .map(|(_, _, report)| report.is_match())
                .unwrap_or(false)
        }
        _ => false,
    };
    Ok(Outcome { verdict, forced })
}

/// Runs every `(delay, initial condition)` pair and tallies verdicts.
///
/// Unresolved and diverged runs both count against reliability.
pub fn run_reliability_sweep(config: &SweepConfig) -> Result<ReliabilityReport> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .tau_values
        .iter()
        .flat_map(|&tau| (0..config.ics_per_tau).map(move |i| (tau, i)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<Outcome>> =
        pool.install(|| jobs.par_iter().map(|&(tau, i)| run_entry(config, tau, i)).collect());

    let mut per_tau: BTreeMap<usize, TauCounts> = BTreeMap::new();
    let mut spike_sums: BTreeMap<usize, f64> = BTreeMap::new();
    for (&(tau, _), outcome) in jobs.iter().zip(outcomes) {
        let outcome = outcome?;
        let counts = per_tau.entry(tau).or_insert_with(|| TauCounts {
            forcing_reconstructed: config.measure_forcing.then_some(0),
            ..TauCounts::default()
        });
        match outcome.verdict.kind() {
            VerdictKind::Stabilized => {
                counts.stabilized += 1;
                if outcome.verdict.full_stabilization_time().is_some() {
                    counts.fully_stabilized += 1;
                }
                *spike_sums.entry(tau).or_default() += outcome.verdict.spike_stabilization_time().unwrap_or(0) as f64;
            }
            VerdictKind::Diverged => counts.diverged += 1,
            VerdictKind::Unresolved => counts.unresolved += 1,
        }
        if outcome.forced {
            if let Some(n) = counts.forcing_reconstructed.as_mut() {
                *n += 1;
            }
        }
    }
    for (tau, counts) in per_tau.iter_mut() {
        if counts.stabilized > 0 {
            counts.mean_spike_stabilization = Some(spike_sums[tau] / counts.stabilized as f64);
        }
    }
    let stabilized: usize = per_tau.values().map(|c| c.stabilized).sum();
    let total: usize = per_tau.values().map(TauCounts::total).sum();
    Ok(ReliabilityReport {
        per_tau,
        overall_reliability: stabilized as f64 / total as f64,
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_length_formula() {
        assert_eq!(sweep_run_length(1001, 100), 5000);
        assert_eq!(sweep_run_length(1001, 1000), 1001 + 20_000 + 4 * 1002);
    }

    #[test]
    fn single_run_report() {
        let config = SweepConfig {
            tau_values: vec![100],
            ics_per_tau: 1,
            ..SweepConfig::desk_scale(42)
        };
        let a = run_reliability_sweep(&config).unwrap();
        let b = run_reliability_sweep(&config).unwrap();
        assert_eq!(a.total_runs(), 1);
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut config = SweepConfig::desk_scale(1);
        config.tau_values.clear();
        assert!(run_reliability_sweep(&config).is_err());
        let mut config = SweepConfig::desk_scale(1);
        config.ics_per_tau = 0;
        assert!(run_reliability_sweep(&config).is_err());
    }
}
