//! Replaces feedback with a fixed value written into u once every 100
//! steps. Orbits still form, slower and sometimes with a multiple of the
//! injection period. Replaying such a spike train at feedback strength, with
//! no injection, does not stabilize anything.
//!
//! cargo run --release --example fixed_injection -- [seeds]

use nds::experiments::{force_with_recorded_train, run_fixed_injection};

fn main() -> nds::Result<()> {
    let seeds = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20u64);
    let mut longest = None;
    for seed in 0..seeds {
        let run = run_fixed_injection(1.0, 3, 100, seed, 30_000)?;
        println!("seed {seed:>3}: {:?}", run.verdict);
        if run.verdict.period().is_some_and(|p| p >= 200) && longest.is_none() {
            longest = Some(run);
        }
    }
    match longest {
        Some(source) => {
            let forced = force_with_recorded_train(&source, 99, 30_000)?;
            println!(
                "replaying a period-{} train: {:?}",
                source.verdict.period().unwrap_or(0),
                forced.verdict
            );
        }
        None => println!("no multi-period orbit among these seeds"),
    }
    Ok(())
}
