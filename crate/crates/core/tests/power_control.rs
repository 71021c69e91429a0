use powertalk_core::model::{received_power, sample_channel};
use powertalk_core::optimize::{
    best_response_dynamics, brd_initial_profile, exhaustive_oracle, iwfa, iwfa_kkt_residual, team_brd, user_rate,
    water_fill,
};
use powertalk_core::{BrdMode, ChannelState, DistributedCsi, GainStatistics, PowerGrid, PowerProfile, UtilitySpec};
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

/// Water-filling by sorting: try every count of active bands, cheapest first.
fn water_fill_by_sorting(floor: &[f64], budget: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..floor.len()).collect();
    order.sort_by(|&a, &b| floor[a].total_cmp(&floor[b]));
    let mut mu = 0.0;
    for n in 1..=floor.len() {
        let sum: f64 = order[..n].iter().map(|&s| floor[s]).sum();
        let level = (budget + sum) / n as f64;
        if n == floor.len() || level <= floor[order[n]] {
            mu = level;
            break;
        }
    }
    floor.iter().map(|&f| (mu - f).max(0.0)).collect()
}

fn random_state(rng: &mut SmallRng, k: usize, s: usize) -> ChannelState {
    let mean: Vec<f64> = (0..k * k * s)
        .map(|l| {
            let (tx, rx) = (l / s / k, l / s % k);
            if tx == rx { 1.0 } else { 0.1 + 0.4 * rng.gen::<f64>() }
        })
        .collect();
    sample_channel(&GainStatistics::new(k, s, mean).unwrap(), rng)
}

#[test]
fn iwfa_reaches_an_epsilon_nash_point() {
    let mut rng = SmallRng::seed_from_u64(17);
    let (k, s, p_max) = (3, 2, 1000.0);
    let mut checked = 0;
    for _ in 0..100 {
        let state = random_state(&mut rng, k, s);
        let direct: Vec<Vec<f64>> = (0..k).map(|i| (0..s).map(|b| state.g(i, i, b)).collect()).collect();
        let out = iwfa(&state, &direct, 1.0, p_max, 10_000, 1e-12).unwrap();
        assert!(out.converged, "iwfa did not settle");
        assert!(iwfa_kkt_residual(&state, &direct, &out.profile, 1.0, p_max) <= 1e-8);
        for i in 0..k {
            let own = user_rate(&out.profile, &state, i, 1.0);
            let mut trial = out.profile.clone();
            for step in 0..=1000 {
                let x = p_max * step as f64 / 1000.0;
                trial.set_user(i, &[x, p_max - x]);
                assert!(user_rate(&trial, &state, i, 1.0) <= own + 1e-6);
            }
        }
        checked += 1;
    }
    assert_eq!(checked, 100);
}

#[test]
fn single_band_iwfa_is_full_power() {
    let state = ChannelState::from_rows(&[&[1.0, 0.2], &[0.3, 2.0]]).unwrap();
    let out = iwfa(&state, &[vec![1.0], vec![2.0]], 1.0, 50.0, 10, 1e-9).unwrap();
    assert_eq!(out.profile.as_slice(), &[50.0, 50.0]);
}

#[test]
fn oracle_dominates_brd_on_every_draw() {
    let mut rng = SmallRng::seed_from_u64(23);
    for spec in [UtilitySpec::sum_rate(), UtilitySpec::sum_ee(1.0).unwrap()] {
        let grid = PowerGrid::new(30, 1000.0, 1).unwrap();
        for _ in 0..200 {
            let state = random_state(&mut rng, 2, 1);
            let (_, best) = exhaustive_oracle(&state, &spec, &grid, 1.0).unwrap();
            let p = team_brd(&DistributedCsi::perfect(&state), &spec, &grid, 1.0, BrdMode::Centralized, 50).unwrap();
            assert!(best >= spec.evaluate(&p, &state, 1.0));
        }
    }
}

#[test]
fn brd_with_strong_cross_gains_silences_one_user() {
    let state = ChannelState::from_rows(&[&[1.0, 20.0], &[20.0, 1.0]]).unwrap();
    let grid = PowerGrid::new(100, 1000.0, 1).unwrap();
    let spec = UtilitySpec::sum_rate();
    let p = team_brd(&DistributedCsi::perfect(&state), &spec, &grid, 1.0, BrdMode::Centralized, 50).unwrap();
    let (best, _) = exhaustive_oracle(&state, &spec, &grid, 1.0).unwrap();
    assert!(p.p(0, 0) == 0.0 || p.p(1, 0) == 0.0, "{:?}", p.as_slice());
    assert!((spec.evaluate(&p, &state, 1.0) - spec.evaluate(&best, &state, 1.0)).abs() < 1e-9);
}

#[test]
fn per_transmitter_mode_matches_centralized_on_identical_views() {
    let mut rng = SmallRng::seed_from_u64(5);
    let grid = PowerGrid::new(21, 1000.0, 2).unwrap();
    for _ in 0..20 {
        let state = random_state(&mut rng, 3, 2);
        let csi = DistributedCsi::perfect(&state);
        let spec = UtilitySpec::sum_rate();
        let a = team_brd(&csi, &spec, &grid, 1.0, BrdMode::Centralized, 50).unwrap();
        let b = team_brd(&csi, &spec, &grid, 1.0, BrdMode::PerTransmitter, 50).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn water_fill_matches_sorting_oracle(
        floor in proptest::collection::vec(0.001f64..50.0, 1..6),
        budget in 0.01f64..100.0,
    ) {
        let (p, _) = water_fill(&floor, budget);
        let want = water_fill_by_sorting(&floor, budget);
        prop_assert!((p.iter().sum::<f64>() - budget).abs() <= 1e-9 * budget);
        for (a, b) in p.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-7 * budget.max(1.0), "{:?} vs {:?}", p, want);
        }
    }

    #[test]
    fn brd_steps_never_lower_the_utility(seed in 0u64..10_000, ee in proptest::bool::ANY) {
        let mut rng = SmallRng::seed_from_u64(seed);
        let state = random_state(&mut rng, 3, 1);
        let spec = if ee { UtilitySpec::sum_ee(1.0).unwrap() } else { UtilitySpec::sum_rate() };
        let grid = PowerGrid::new(25, 1000.0, 1).unwrap();
        let init = brd_initial_profile(3, &grid);
        let out = best_response_dynamics(&state, &spec, &grid, 1.0, &init, 50).unwrap();
        let mut last = spec.evaluate(&init, &state, 1.0);
        for &u in &out.history {
            prop_assert!(u >= last - 1e-12 * last.abs());
            last = u;
        }
    }

    #[test]
    fn received_power_splits_into_signal_noise_and_interference(
        g in proptest::collection::vec(0.0f64..5.0, 9),
        p in proptest::collection::vec(0.0f64..10.0, 3),
    ) {
        let rows: Vec<&[f64]> = g.chunks(3).collect();
        let state = ChannelState::from_rows(&rows).unwrap();
        let profile = PowerProfile::single_band(&p).unwrap();
        for i in 0..3 {
            let w = received_power(&state, &profile, i, 0, 1.0).unwrap();
            let want = 1.0 + (0..3).map(|j| state.g(j, i, 0) * p[j]).sum::<f64>();
            prop_assert!((w - want).abs() <= 1e-12 * want);
        }
    }
}
