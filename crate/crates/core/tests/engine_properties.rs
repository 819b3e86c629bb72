//! Engine invariants over built and randomly generated schedules.

use proptest::prelude::*;
use rcia_core::analysis::{estimate_dof_slope, run_trials};
use rcia_core::channel::NoiseMode;
use rcia_core::engine::run;
use rcia_core::schemes::{build_rcia_bc, build_rcia_equal_n, build_rcia_unequal, build_silent};
use rcia_core::{Action, IcConfig, Network, Receiver, Schedule, SlotAction, SymbolInfo, Terminal};

/// Schedule where, in each slot, T1 and T2 send `counts[t]` fresh symbols.
fn random_fresh(cfg: IcConfig, counts: &[(usize, usize)]) -> Schedule {
    let mut s = build_silent(Network::Ic(cfg), counts.len()).unwrap();
    let mut next = 0;
    for (t, &(k1, k2)) in counts.iter().enumerate() {
        for (terminal, owner, k) in [(Terminal::T1, Receiver::R1, k1), (Terminal::T2, Receiver::R2, k2)] {
            if k == 0 {
                continue;
            }
            let ids: Vec<usize> = (next..next + k).collect();
            for &id in &ids {
                s.symbols.push(SymbolInfo { id, owner, origin_slot: t + 1, label: format!("x{id}") });
            }
            next += k;
            s.slots[t].push(SlotAction { terminal, action: Action::SendFresh { owner, symbols: ids } });
        }
    }
    s.descriptor.name = "random-fresh".into();
    s.validate().unwrap();
    s
}

fn fresh_strategy() -> impl Strategy<Value = Schedule> {
    (1usize..4, 1usize..4, 1usize..4, 1usize..4)
        .prop_flat_map(|(m1, m2, n1, n2)| {
            let cfg = IcConfig::new(m1, m2, n1, n2).unwrap();
            (Just(cfg), prop::collection::vec((0..=m1, 0..=m2), 1..4))
        })
        .prop_map(|(cfg, counts)| random_fresh(cfg, &counts))
}

fn rcia_strategy() -> impl Strategy<Value = Schedule> {
    prop_oneof![
        (1usize..3, 1usize..3, 1usize..3).prop_map(|(a, b, n)| build_rcia_equal_n(n + a, n + b, n).unwrap()),
        (1usize..3, 1usize..3).prop_map(|(a, n)| build_rcia_bc(n + a, n).unwrap()),
        (1usize..4).prop_map(|b| build_rcia_unequal(4, 1, 3, 2, b).unwrap()),
        (1usize..3).prop_map(|b| build_rcia_unequal(6, 1, 4, 3, b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn achieved_never_exceeds_scheduled(s in fresh_strategy(), seed in 0u64..1000) {
        let (_, r) = run(&s, seed, NoiseMode::NoiseFree).unwrap();
        let sched = s.scheduled_dof();
        prop_assert!(r.achieved.d1 <= sched.d1 && r.achieved.d2 <= sched.d2);
        prop_assert_eq!(r.achieved == sched, r.all_decoded());
    }

    #[test]
    fn rcia_schemes_reach_their_schedule(s in rcia_strategy(), seed in 0u64..1000) {
        let (tr, r) = run(&s, seed, NoiseMode::NoiseFree).unwrap();
        prop_assert!(r.all_decoded());
        prop_assert_eq!(r.achieved, s.scheduled_dof());
        // Every replayed symbol was decoded strictly before the replay slot.
        for (t, actions) in s.slots.iter().enumerate() {
            for a in actions {
                if let (Action::ReplayDecoded { symbols }, Some(rx)) = (&a.action, a.terminal.receiver()) {
                    for sym in symbols {
                        let at = tr.decoded[rx.index()].get(sym).copied();
                        prop_assert!(matches!(at, Some(d) if d < t + 1), "symbol {} replayed in slot {} decoded at {:?}", sym, t + 1, at);
                    }
                }
            }
        }
    }

    #[test]
    fn runs_are_deterministic(s in rcia_strategy(), seed in 0u64..1000) {
        let (t1, r1) = run(&s, seed, NoiseMode::NoiseFree).unwrap();
        let (t2, r2) = run(&s, seed, NoiseMode::NoiseFree).unwrap();
        prop_assert_eq!(r1, r2);
        prop_assert_eq!(t1.symbol_values, t2.symbol_values);
    }
}

#[test]
fn trial_order_follows_seeds() {
    let s = build_rcia_equal_n(2, 2, 1).unwrap();
    let results = run_trials(&s, 16, 40, NoiseMode::NoiseFree).unwrap();
    let seeds: Vec<u64> = results.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, (40..56).collect::<Vec<_>>());
}

#[test]
fn noisy_estimates_are_accurate_at_high_power() {
    let mode = NoiseMode::noisy_db(60.0).unwrap();
    for s in [build_rcia_equal_n(2, 2, 1).unwrap(), build_rcia_unequal(4, 1, 3, 2, 2).unwrap(), build_rcia_bc(4, 2).unwrap()] {
        let results = run_trials(&s, 50, 1, mode).unwrap();
        let mse: f64 = results.iter().map(|r| r.symbol_mse.unwrap()).sum::<f64>() / results.len() as f64;
        assert!(mse <= 1e-3, "{}: mean mse {mse}", s.descriptor.name);
        assert!(results.iter().all(|r| r.all_decoded()));
    }
}

#[test]
fn slope_matches_counted_dof() {
    let s = build_rcia_equal_n(2, 2, 1).unwrap();
    let est = estimate_dof_slope(&s, &[40.0, 50.0, 60.0], 100, 1).unwrap();
    for u in 0..2 {
        assert!((est.slope[u] - 2.0 / 3.0).abs() < 0.02, "slope {:?}", est.slope);
    }
}

#[test]
fn slope_converges_with_wider_power_grid() {
    let s = build_rcia_unequal(4, 1, 3, 2, 5).unwrap();
    let target = 20.0 / 11.0;
    let narrow = estimate_dof_slope(&s, &[40.0, 50.0], 100, 1).unwrap();
    let wide = estimate_dof_slope(&s, &[40.0, 50.0, 60.0, 70.0], 100, 1).unwrap();
    assert!((wide.slope[0] - target).abs() < (narrow.slope[0] - target).abs(), "{narrow:?} {wide:?}");
    assert!((wide.slope[0] - target).abs() < 0.1);
}

#[test]
fn slope_rejects_low_power_and_undecodable_schedules() {
    let s = build_rcia_equal_n(2, 2, 1).unwrap();
    assert!(estimate_dof_slope(&s, &[10.0, 50.0], 2, 1).is_err());
    assert!(estimate_dof_slope(&s, &[50.0], 2, 1).is_err());
    let overload = random_fresh(IcConfig::new(2, 2, 1, 1).unwrap(), &[(2, 2)]);
    assert!(estimate_dof_slope(&overload, &[40.0, 50.0], 2, 1).is_err());
}
