//! Delayed self-feedback switched on at step 1001 locks the spike train
//! onto a periodic orbit.
//!
//! cargo run --release --example feedback_stabilization -- [tau] [seed]

use nds::analysis::classify_run;
use nds::control::{run_controlled, ResetPolicy};
use nds::experiments::{feedback_config, feedback_detector, loop_period, DEFAULT_RUN_STEPS};

fn main() -> nds::Result<()> {
    let mut args = std::env::args().skip(1);
    let tau = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let config = feedback_config(tau, seed, DEFAULT_RUN_STEPS, ResetPolicy::default())?;
    let record = run_controlled(&config)?;
    let verdict = classify_run(&record, &feedback_detector(tau));
    println!("delay {tau}, loop period {}", loop_period(tau));
    println!("{verdict:?}");
    if let Some(period) = verdict.period() {
        let start = record.len() - period;
        let spikes: Vec<usize> = (start..record.len())
            .filter(|&t| record.trajectory.spikes[t])
            .map(|t| t - start)
            .collect();
        println!("spike phases in the final period: {spikes:?}");
    }
    Ok(())
}
