//! Uncontrolled chaotic spiking from a seeded random initial condition.
//!
//! cargo run --release --example free_run -- [seed] [out.csv]

use std::path::Path;

use nds::control::{run_controlled, ControlledRunConfig};
use nds::output::emit_run_csv;

fn main() -> nds::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let config = ControlledRunConfig {
        total_steps: 100_000,
        rng_seed: seed,
        ..ControlledRunConfig::default()
    };
    let record = run_controlled(&config)?;
    let traj = &record.trajectory;
    let max_abs = traj
        .states
        .iter()
        .flat_map(|s| s.as_array())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    println!("initial state: {:?}", traj.states[0]);
    println!(
        "steps: {}  spikes: {}  max |component|: {max_abs:.3}",
        traj.len() - 1,
        traj.spike_count()
    );
    match record.diverged_at {
        Some(step) => println!("escaped at step {step}"),
        None => println!("stayed bounded"),
    }
    if let Some(out) = args.next() {
        emit_run_csv(&record, Path::new(&out))?;
        println!("wrote {out}");
    }
    Ok(())
}
