//! Command-line front end. Flags override config-file values, which
//! override the built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{classify_run, Detector, StabilizationVerdict};
use crate::config::{apply_config, ResetKind, Settings};
use crate::control::{run_controlled, FixedInjection, InjectionMode, RunRecord};
use crate::error::{Error, Result};
use crate::experiments::{
    derive_seed, forcing_schedule, loop_period, reconstruct_with_schedule, run_reliability_sweep, run_reset_scan,
    DifferenceAnalysis, SweepConfig, INJECTION_START,
};
use crate::output;
use crate::rossler::{rossler_integrate, RosslerParams};

#[derive(Debug, Parser)]
#[command(name = "nds", version, about = "Chaotic spiking neuron experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Uncontrolled run of the map.
    FreeRun,
    /// Feedback-controlled run with delay --tau.
    Stabilize,
    /// Lag differences of a feedback-controlled run.
    DiffAnalysis,
    /// Stabilize with feedback, then re-create the orbit by forcing.
    Reconstruct,
    /// Reliability over delays and initial conditions.
    Sweep,
    /// Fixed-value injection instead of feedback.
    Inject,
    /// Feedback run under the chosen reset policy.
    ResetRun,
    /// Regime and reliability over a list of reset values.
    ResetScan,
    /// Continuous Rössler reference trajectory.
    RosslerRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResetArg {
    Fixed,
    Relative,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Config file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tau: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub weight: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta0: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub reset: Option<ResetArg>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ics: Option<usize>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub tau_list: Option<Vec<usize>>,
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta0_list: Option<Vec<f64>>,
    /// Worker threads for sweeps; results do not depend on it.
    #[arg(long, global = true)]
    pub parallel: Option<usize>,
    /// Exit with status 1 when a single run diverges.
    #[arg(long, global = true)]
    pub strict: bool,
}

impl Options {
    fn apply(&self, s: &mut Settings) {
        if let Some(v) = self.seed {
            s.seed = v;
        }
        if let Some(v) = self.tau {
            s.tau = v;
        }
        if let Some(v) = self.weight {
            s.weight = v;
        }
        if let Some(v) = self.eta0 {
            s.params.eta0 = v;
        }
        if let Some(v) = self.reset {
            s.reset = match v {
                ResetArg::Fixed => ResetKind::Fixed,
                ResetArg::Relative => ResetKind::Relative,
            };
        }
        if let Some(v) = self.steps {
            s.steps = Some(v);
        }
        if let Some(v) = self.ics {
            s.ics = Some(v);
        }
        if let Some(v) = &self.tau_list {
            s.tau_list = v.clone();
        }
        if let Some(v) = &self.eta0_list {
            s.eta0_list = v.clone();
        }
        if let Some(v) = self.parallel {
            s.parallel = v;
        }
    }
}

/// Loads the config file (if any) and applies the flags on top.
pub fn resolve_settings(options: &Options) -> Result<Settings> {
    let mut settings = Settings::default();
    if let Some(path) = &options.config {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        apply_config(&mut settings, &text)?;
    }
    options.apply(&mut settings);
    settings.validate()?;
    Ok(settings)
}

/// Usage and configuration problems exit with 2, everything else with 1.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::ConfigSyntax { .. } | Error::ConfigValue { .. } | Error::InvalidArgument(_) => 2,
        _ => 1,
    }
}

enum Outcome {
    Done,
    Diverged(usize),
}

fn describe(verdict: &StabilizationVerdict) -> String {
    match *verdict {
        StabilizationVerdict::Stabilized {
            period,
            spike_time,
            full_time,
        } => {
            let full = full_time.map_or_else(|| "none".to_string(), |t| t.to_string());
            format!("stabilized period={period} spike_time={spike_time} full_time={full}")
        }
        StabilizationVerdict::Diverged { step } => format!("diverged step={step}"),
        StabilizationVerdict::Unresolved => "unresolved".to_string(),
    }
}

fn single_run(record: &RunRecord, out: &Path) -> Result<Outcome> {
    output::emit_run_csv(record, out)?;
    println!("wrote {} ({} steps)", out.display(), record.len());
    Ok(match record.diverged_at {
        Some(step) => Outcome::Diverged(step),
        None => Outcome::Done,
    })
}

fn feedback_detector(s: &Settings) -> Detector {
    Detector::new(loop_period(s.tau)).from_step(s.control_on)
}

fn execute(command: Command, s: &Settings, out: &Path) -> Result<Outcome> {
    match command {
        Command::FreeRun => single_run(&run_controlled(&s.base_config(5000))?, out),
        Command::Stabilize | Command::ResetRun => {
            let default_steps = if command == Command::ResetRun { 10_000 } else { 5000 };
            let record = run_controlled(&s.feedback_config(default_steps)?)?;
            println!("{}", describe(&classify_run(&record, &feedback_detector(s))));
            single_run(&record, out)
        }
        Command::DiffAnalysis => {
            let record = run_controlled(&s.feedback_config(5000)?)?;
            let verdict = classify_run(&record, &feedback_detector(s));
            println!("{}", describe(&verdict));
            let lag = verdict.period().unwrap_or_else(|| loop_period(s.tau));
            if record.len() <= lag {
                return Err(Error::invalid("run too short for one lag"));
            }
            let diverged = record.diverged_at;
            let analysis = DifferenceAnalysis::from_record(record, verdict, lag);
            output::emit_difference_csv(&analysis, out)?;
            println!("wrote {} (lag {lag})", out.display());
            Ok(diverged.map_or(Outcome::Done, Outcome::Diverged))
        }
        Command::Reconstruct => {
            let record = run_controlled(&s.feedback_config(10_000)?)?;
            let detector = feedback_detector(s);
            let verdict = classify_run(&record, &detector);
            println!("feedback: {}", describe(&verdict));
            let schedules = forcing_schedule(&record, &verdict)?;
            let forcing_seed = derive_seed(s.seed, u64::MAX, 0);
            let (forced, forced_verdict, report) =
                reconstruct_with_schedule(&record, &verdict, schedules, forcing_seed, &detector)?;
            println!("forced: {}", describe(&forced_verdict));
            println!(
                "match={} shift={} max_u_distance={:e}",
                report.is_match(),
                report.shift,
                report.max_u_distance
            );
            output::emit_run_csv(&record, out)?;
            let forced_out = output::forced_path(out);
            output::emit_run_csv(&forced, &forced_out)?;
            println!("wrote {} and {}", out.display(), forced_out.display());
            Ok(Outcome::Done)
        }
        Command::Sweep => {
            let mut base = s.base_config(5000);
            base.feedback = s.feedback_config(5000)?.feedback;
            let config = SweepConfig {
                tau_values: s.tau_list.clone(),
                ics_per_tau: s.ics.unwrap_or(200),
                base,
                seed: s.seed,
                parallelism: s.parallel,
                measure_forcing: false,
            };
            let report = run_reliability_sweep(&config)?;
            output::emit_reliability_report(&report, out)?;
            println!(
                "runs={} reliability={}",
                report.total_runs(),
                report.overall_reliability
            );
            println!("wrote {}", out.display());
            Ok(Outcome::Done)
        }
        Command::Inject => {
            let mut config = s.base_config(30_000);
            config.injections = vec![FixedInjection {
                value: s.injection_value,
                phase: s.injection_phase,
                period: s.injection_period,
                start_time: INJECTION_START,
                end_time: None,
                mode: InjectionMode::AssignToU,
            }];
            let record = run_controlled(&config)?;
            let detector = Detector::new(s.injection_period).from_step(s.control_on);
            println!("{}", describe(&classify_run(&record, &detector)));
            single_run(&record, out)
        }
        Command::ResetScan => {
            let report = run_reset_scan(
                &s.eta0_list,
                s.ics.unwrap_or(100),
                s.seed,
                s.steps_or(crate::experiments::RESET_SCAN_STEPS),
                s.parallel,
            )?;
            for e in &report.entries {
                println!("eta0={} regime={} reliability={}", e.eta0, e.regime, e.reliability);
            }
            output::emit_reset_scan(&report, out)?;
            println!("wrote {}", out.display());
            Ok(Outcome::Done)
        }
        Command::RosslerRef => {
            let initial = [s.x0.unwrap_or(1.0), s.y0.unwrap_or(1.0), s.u0.unwrap_or(1.0)];
            let points = rossler_integrate(initial, &RosslerParams::default(), s.dt, s.steps_or(50_000))?;
            output::emit_rossler_csv(&points, s.dt, out)?;
            println!("wrote {} ({} points)", out.display(), points.len());
            Ok(Outcome::Done)
        }
    }
}

fn default_out(command: Command) -> &'static str {
    match command {
        Command::FreeRun => "free_run.csv",
        Command::Stabilize => "stabilize.csv",
        Command::DiffAnalysis => "diff_analysis.csv",
        Command::Reconstruct => "reconstruct.csv",
        Command::Sweep => "sweep.csv",
        Command::Inject => "inject.csv",
        Command::ResetRun => "reset_run.csv",
        Command::ResetScan => "reset_scan.csv",
        Command::RosslerRef => "rossler_ref.csv",
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let settings = match resolve_settings(&cli.options) {
        Ok(s) => s,
        // Any failure to assemble the settings, including an unreadable
        // config file, is a configuration error.
        Err(err) => {
            eprintln!("error: {err}");
            return 2;
        }
    };
    let out = cli
        .options
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(default_out(cli.command)));
    match execute(cli.command, &settings, &out) {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::Diverged(step)) => {
            eprintln!("warning: run diverged at step {step}");
            u8::from(cli.options.strict)
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
