use nds::control::{run_controlled, ControlledRunConfig, InitialCondition, ResetPolicy};
use nds::experiments::{
    derive_seed, envelope_roughness, feedback_detector, force_with_recorded_train, run_difference_analysis,
    run_fixed_injection, run_reconstruction, run_reset_experiment, run_reset_scan, FEEDBACK_WEIGHT, LONG_RUN_STEPS,
    RESET_SCAN_STEPS,
};
use nds::model::NdsState;
use nds::{classify_run, FeedbackConnection, StabilizationVerdict};

#[test]
fn y_difference_decays_more_smoothly_than_u() {
    let mut smoother = 0;
    let mut compared = 0;
    for seed in 0..20 {
        let a = run_difference_analysis(100, derive_seed(1, 100, seed), LONG_RUN_STEPS).unwrap();
        if let (Some(y), Some(u)) = (
            envelope_roughness(&a.y, 50, 1001, 1e-9),
            envelope_roughness(&a.u, 50, 1001, 1e-9),
        ) {
            compared += 1;
            smoother += usize::from(y < u);
        }
    }
    assert!(compared >= 15, "only {compared} runs decayed");
    assert!(smoother * 10 >= compared * 7, "y smoother in {smoother}/{compared}");
}

#[test]
fn reconstruction_works_for_other_delays() {
    for tau in [50, 250] {
        let r = run_reconstruction(tau, 11).unwrap();
        assert!(r.report.is_match(), "tau {tau}: {:?}", r.report);
        assert_ne!(r.feedback.trajectory.states[0], r.forced.trajectory.states[0]);
    }
}

#[test]
fn forced_orbit_reconstructs_with_other_weight() {
    // The forcing carries the connection's own weight, whatever it is.
    let config = ControlledRunConfig {
        total_steps: LONG_RUN_STEPS,
        feedback: vec![FeedbackConnection::new(0.5, 100).unwrap()],
        rng_seed: 21,
        ..ControlledRunConfig::default()
    };
    let record = run_controlled(&config).unwrap();
    let verdict = classify_run(&record, &feedback_detector(100));
    assert!(verdict.is_stabilized());
    let schedules = nds::experiments::forcing_schedule(&record, &verdict).unwrap();
    assert!(schedules.iter().all(|s| s.amplitude == 0.5));
    let (_, _, report) =
        nds::experiments::reconstruct_with_schedule(&record, &verdict, schedules, 22, &feedback_detector(100)).unwrap();
    assert!(report.is_match(), "{report:?}");
}

#[test]
fn replayed_injection_train_does_not_stabilize() {
    let source = (0..50)
        .map(|seed| run_fixed_injection(1.0, 3, 100, seed, 30_000).unwrap())
        .find(|run| run.verdict.period().is_some_and(|p| p >= 200))
        .expect("a multi-period injection orbit");
    let replay = force_with_recorded_train(&source, 1234, 30_000).unwrap();
    assert_eq!(replay.verdict, StabilizationVerdict::Unresolved);
    assert!(replay
        .record
        .config
        .inputs
        .iter()
        .all(|s| s.amplitude == FEEDBACK_WEIGHT));
}

#[test]
fn reset_experiment_is_reproducible() {
    let a = run_reset_experiment(ResetPolicy::Relative(-1.0), 5, 6000).unwrap();
    let b = run_reset_experiment(ResetPolicy::Relative(-1.0), 5, 6000).unwrap();
    assert_eq!(a.record, b.record);
    assert_eq!(a.verdict, b.verdict);
}

#[test]
fn reset_scan_is_independent_of_parallelism_and_neighbours() {
    let one = run_reset_scan(&[-0.5, -1.0], 6, 9, 6000, 1).unwrap();
    let four = run_reset_scan(&[-0.5, -1.0], 6, 9, 6000, 4).unwrap();
    assert_eq!(one, four);
    // Seeds are keyed by value, so dropping a neighbour leaves an entry intact.
    let alone = run_reset_scan(&[-1.0], 6, 9, 6000, 2).unwrap();
    assert_eq!(alone.entries[0], one.entries[1]);
}

/// A single published initial condition that stabilizes at reset -1.59.
/// Under this model it escapes instead; kept as a record of the mismatch.
#[test]
#[ignore = "does not reproduce: this initial condition diverges at reset -1.59"]
fn published_initial_condition_stabilizes_at_deep_reset() {
    let config = ControlledRunConfig {
        initial: InitialCondition::Fixed(NdsState::new(-0.1556, 0.4469, -0.3596)),
        total_steps: RESET_SCAN_STEPS,
        feedback: vec![FeedbackConnection::new(FEEDBACK_WEIGHT, 100).unwrap()],
        reset: ResetPolicy::Fixed(-1.59),
        ..ControlledRunConfig::default()
    };
    let record = run_controlled(&config).unwrap();
    let verdict = classify_run(&record, &feedback_detector(100));
    assert!(verdict.is_stabilized(), "{verdict:?}");
}

/// Mean stabilization time should grow as the reset value deepens.
/// Below -1.59 almost no run stabilizes, so the trend cannot be measured.
#[test]
#[ignore = "does not reproduce: reset values below -1.59 give no stabilized runs"]
fn stabilization_slows_as_reset_deepens() {
    let values = [-1.0, -1.4, -1.59, -1.8];
    let report = run_reset_scan(&values, 100, 77, RESET_SCAN_STEPS, 4).unwrap();
    let means: Vec<Option<f64>> = report.entries.iter().map(|e| e.mean_stabilization_time).collect();
    assert!(means.iter().all(Option::is_some), "{means:?}");
    assert!(means.windows(2).all(|w| w[0] < w[1]), "{means:?}");
}
