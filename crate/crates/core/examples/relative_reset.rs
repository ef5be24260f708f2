//! Fixed versus relative reset under the same feedback: mean spike-level
//! and state-level stabilization times over an ensemble.
//!
//! cargo run --release --example relative_reset -- [seeds]

use nds::control::ResetPolicy;
use nds::experiments::{run_reset_experiment, LONG_RUN_STEPS};

fn mean(values: &[usize]) -> f64 {
    values.iter().sum::<usize>() as f64 / values.len().max(1) as f64
}

fn main() -> nds::Result<()> {
    let seeds = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100u64);
    for policy in [ResetPolicy::Fixed(-1.0), ResetPolicy::Relative(-1.0)] {
        let (mut spike, mut full, mut failed) = (Vec::new(), Vec::new(), 0);
        for seed in 0..seeds {
            let run = run_reset_experiment(policy, seed, LONG_RUN_STEPS)?;
            match (
                run.verdict.spike_stabilization_time(),
                run.verdict.full_stabilization_time(),
            ) {
                (Some(s), f) => {
                    spike.push(s);
                    full.extend(f);
                }
                (None, _) => failed += 1,
            }
        }
        println!(
            "{policy:?}: mean spike time {:.0} ({} runs), mean full time {:.0} ({} runs), {failed} not stabilized",
            mean(&spike),
            spike.len(),
            mean(&full),
            full.len()
        );
    }
    Ok(())
}
