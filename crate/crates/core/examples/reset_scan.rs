//! Scans fixed reset values and reports the regime each one falls into,
//! the measured diagnostics of one run, and the stabilization reliability.
//!
//! cargo run --release --example reset_scan -- [ics_per_value]

use nds::experiments::{run_reset_scan, RESET_SCAN_STEPS};

fn main() -> nds::Result<()> {
    let ics = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let values = nds::config::DEFAULT_ETA0_LIST;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = run_reset_scan(&values, ics, 2024, RESET_SCAN_STEPS, threads)?;

    println!(
        "{:>7}  {:<27} {:<27} {:>6} {:>9}",
        "eta0", "regime", "measured", "rel", "mean t*"
    );
    for e in &report.entries {
        let d = &e.diagnostics;
        println!(
            "{:>7}  {:<27} {:<27} {:>6.2} {:>9}   const_u={} every_step={} radius_up={} alternating={}",
            e.eta0,
            e.regime.label(),
            d.measured_regime().label(),
            e.reliability,
            e.mean_stabilization_time.map_or("-".into(), |m| format!("{m:.0}")),
            d.constant_u,
            d.spikes_every_step,
            d.radius_non_decreasing,
            d.two_valued_alternation,
        );
    }
    Ok(())
}
