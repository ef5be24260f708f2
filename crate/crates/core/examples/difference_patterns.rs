//! Lag differences |r(t) - r(t - lag)| of a controlled run: they collapse
//! once the orbit repeats, x and u roughly together, y more smoothly.
//!
//! cargo run --release --example difference_patterns -- [seed] [out.csv]

use std::path::Path;

use nds::experiments::{envelope_roughness, run_difference_analysis};
use nds::output::emit_difference_csv;

fn main() -> nds::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let analysis = run_difference_analysis(100, seed, 10_000)?;
    println!("{:?}, lag {}", analysis.verdict, analysis.lag);
    for series in [&analysis.x, &analysis.y, &analysis.u, &analysis.xyz] {
        let settled = series.settles_below(1e-6);
        let rough = envelope_roughness(series, 50, 1001, 1e-9);
        println!(
            "{:>14}: below 1e-6 from {settled:?}, envelope roughness {rough:?}",
            series.variable.name()
        );
    }
    if let Some(out) = args.next() {
        emit_difference_csv(&analysis, Path::new(&out))?;
        println!("wrote {out}");
    }
    Ok(())
}
