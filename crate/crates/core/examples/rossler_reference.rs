//! The continuous Rössler attractor the discrete neuron is derived from.
//!
//! cargo run --release --example rossler_reference -- [out.csv]

use std::path::Path;

use nds::output::emit_rossler_csv;
use nds::rossler::{rossler_integrate, RosslerParams, DEFAULT_DT};

fn main() -> nds::Result<()> {
    let points = rossler_integrate([1.0, 1.0, 1.0], &RosslerParams::default(), DEFAULT_DT, 50_000)?;
    let tail = &points[10_000..];
    let range = |i: usize| {
        tail.iter()
            .map(|p| p[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    for (name, i) in [("x", 0), ("y", 1), ("z", 2)] {
        let (lo, hi) = range(i);
        println!("{name} in [{lo:.3}, {hi:.3}]");
    }
    if let Some(out) = std::env::args().nth(1) {
        emit_rossler_csv(&points, DEFAULT_DT, Path::new(&out))?;
        println!("wrote {out}");
    }
    Ok(())
}
