//! Records the spike train of a feedback-stabilized orbit and replays it
//! open-loop into a neuron with a different initial condition.
//!
//! cargo run --release --example reconstruction -- [tau] [seed]

use nds::experiments::run_reconstruction;

fn main() -> nds::Result<()> {
    let mut args = std::env::args().skip(1);
    let tau = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let r = run_reconstruction(tau, seed)?;
    println!("feedback run: {:?} (attempt {})", r.feedback_verdict, r.attempts);
    println!("forced run:   {:?}", r.forced_verdict);
    println!(
        "initial states: {:?} vs {:?}",
        r.feedback.trajectory.states[0], r.forced.trajectory.states[0]
    );
    println!(
        "aligned over one period (shift {}): max |du| = {:e}, max state distance = {:e}, match = {}",
        r.report.shift,
        r.report.max_u_distance,
        r.report.max_state_distance,
        r.report.is_match()
    );
    Ok(())
}
