use proptest::prelude::*;

use nds::analysis::{pattern_periodicity, spike_periodicity, spike_train_from_pattern};
use nds::control::{run_controlled, ControlledRunConfig, FeedbackConnection, InitialCondition, ResetPolicy};
use nds::model::{nds_step, run_free, NdsParams, NdsState};
use nds::output::{parse_run_csv, run_table_csv, RunRow, RunTable};

fn small_state() -> impl Strategy<Value = NdsState> {
    (-0.2f64..0.2, -0.2f64..0.2, -0.2f64..0.2).prop_map(|(x, y, u)| NdsState::new(x, y, u))
}

fn feedback_run(seed: u64, tau: usize, steps: usize) -> ControlledRunConfig {
    ControlledRunConfig {
        total_steps: steps,
        feedback: vec![FeedbackConnection::new(0.3, tau).unwrap()],
        rng_seed: seed,
        ..ControlledRunConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), tau in 1usize..300) {
        let config = feedback_run(seed, tau, 2500);
        prop_assert_eq!(run_controlled(&config).unwrap(), run_controlled(&config).unwrap());
    }

    #[test]
    fn reset_is_exact(x in -5.0f64..5.0, y in -5.0f64..5.0, u in -0.0099f64..5.0, drive in -1.0f64..1.0, eta0 in -2.0f64..0.1) {
        let params = NdsParams { eta0, ..NdsParams::default() };
        let (next, spike) = nds_step(NdsState::new(x, y, u), &params, drive).unwrap();
        prop_assert!(spike);
        prop_assert_eq!(next.u, eta0);
    }

    #[test]
    fn drive_shifts_u_only(s in small_state(), drive in -1.0f64..1.0) {
        let params = NdsParams::default();
        let below = NdsState { u: s.u.min(params.theta - 1e-3), ..s };
        let (plain, spike_a) = nds_step(below, &params, 0.0).unwrap();
        let (driven, spike_b) = nds_step(below, &params, drive).unwrap();
        prop_assert!(!spike_a && !spike_b);
        prop_assert_eq!((plain.x, plain.y), (driven.x, driven.y));
        prop_assert!((driven.u - plain.u - drive).abs() <= 1e-15 * (1.0 + plain.u.abs() + drive.abs()));
    }

    #[test]
    fn spike_iff_above_threshold(s in small_state()) {
        let params = NdsParams::default();
        let (_, spike) = nds_step(s, &params, 0.0).unwrap();
        prop_assert_eq!(spike, s.u > params.theta);
    }

    #[test]
    fn shorter_run_is_a_prefix(seed in any::<u64>(), short in 1usize..3000, extra in 1usize..2000) {
        let a = run_controlled(&feedback_run(seed, 100, short)).unwrap();
        let b = run_controlled(&feedback_run(seed, 100, short + extra)).unwrap();
        prop_assume!(!a.diverged());
        prop_assert_eq!(&a.trajectory.states[..], &b.trajectory.states[..a.len()]);
        prop_assert_eq!(&a.trajectory.spikes[..], &b.trajectory.spikes[..a.len()]);
    }

    #[test]
    fn switching_off_does_not_touch_the_past(seed in any::<u64>(), off in 1001usize..2500) {
        let on = run_controlled(&feedback_run(seed, 50, 3000)).unwrap();
        let cut = run_controlled(&ControlledRunConfig { control_off: Some(off), ..feedback_run(seed, 50, 3000) }).unwrap();
        // D(off - 1) is the last drive applied, so states up to `off` agree.
        prop_assert_eq!(&on.trajectory.states[..=off], &cut.trajectory.states[..=off]);
    }

    #[test]
    fn no_drive_before_control_on(s in small_state(), on in 1usize..1500) {
        let config = ControlledRunConfig {
            initial: InitialCondition::Fixed(s),
            total_steps: 1500,
            control_on: on,
            feedback: vec![FeedbackConnection::new(0.3, 5).unwrap()],
            ..ControlledRunConfig::default()
        };
        let record = run_controlled(&config).unwrap();
        let free = run_free(&NdsParams::default(), s, on).unwrap();
        prop_assert!(record.drives[..on].iter().all(|&d| d == 0.0));
        prop_assert_eq!(&record.trajectory.states[..=on], &free.states[..]);
    }

    #[test]
    fn relative_reset_with_zero_offset_keeps_u(s in small_state()) {
        let config = ControlledRunConfig {
            initial: InitialCondition::Fixed(NdsState { u: 0.05, ..s }),
            total_steps: 1,
            reset: ResetPolicy::Relative(0.0),
            ..ControlledRunConfig::default()
        };
        let record = run_controlled(&config).unwrap();
        prop_assert_eq!(record.trajectory.states[1].u, 0.05);
        prop_assert!(record.trajectory.spikes[1]);
    }

    #[test]
    fn tiled_pattern_is_found_and_longer_tiling_agrees(
        unit in prop::collection::vec(any::<bool>(), 2..40),
        prefix in prop::collection::vec(any::<bool>(), 0..60),
        copies in 3usize..8,
    ) {
        prop_assume!(unit.iter().any(|&b| b));
        let p = unit.len();
        let tiled = |n: usize| -> Vec<bool> {
            prefix.iter().copied().chain(unit.iter().copied().cycle().take(n * p)).collect()
        };
        let short = tiled(copies);
        let long = tiled(copies + 3);
        let t_short = pattern_periodicity(&short, p, 2 * p, 0);
        let t_long = pattern_periodicity(&long, p, 2 * p, 0);
        prop_assert!(t_short.is_some());
        prop_assert_eq!(t_short, t_long);
        prop_assert!(t_short.unwrap() < prefix.len() + 2 * p);
        let train = spike_train_from_pattern(&long);
        prop_assert_eq!(spike_periodicity(&train, p, 2 * p, 0), t_long);
    }

    #[test]
    fn csv_round_trips_exactly(values in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>(), any::<bool>(), any::<f64>()), 0..20)) {
        let rows = values
            .iter()
            .enumerate()
            .filter(|(_, v)| [v.0, v.1, v.2, v.4].iter().all(|f| f.is_finite()))
            .map(|(t, &(x, y, u, gamma, drive))| RunRow { t, x, y, u, gamma, drive })
            .collect();
        let table = RunTable { rows };
        let bytes = run_table_csv(&table);
        let back = parse_run_csv(&bytes).unwrap();
        prop_assert_eq!(&back, &table);
        prop_assert_eq!(run_table_csv(&back), bytes);
    }
}
