//! Fraction of initial conditions whose spike train stabilizes, per delay.
//!
//! cargo run --release --example reliability_sweep -- [ics_per_tau] [out.csv]

use std::path::Path;

use nds::experiments::{run_reliability_sweep, SweepConfig};
use nds::output::emit_reliability_report;

fn main() -> nds::Result<()> {
    let mut args = std::env::args().skip(1);
    let ics = args.next().and_then(|s| s.parse().ok()).unwrap_or(40);
    let config = SweepConfig {
        ics_per_tau: ics,
        parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SweepConfig::desk_scale(2024)
    };
    let report = run_reliability_sweep(&config)?;
    for (tau, c) in &report.per_tau {
        println!(
            "tau {tau:>5}: {:>4} stabilized, {:>3} diverged, {:>3} unresolved, mean spike time {:.0}",
            c.stabilized,
            c.diverged,
            c.unresolved,
            c.mean_spike_stabilization.unwrap_or(f64::NAN)
        );
    }
    println!(
        "overall {:.4} (state-level {:.4})",
        report.overall_reliability,
        report.full_reliability()
    );
    if let Some(out) = args.next() {
        emit_reliability_report(&report, Path::new(&out))?;
        println!("wrote {out}");
    }
    Ok(())
}
