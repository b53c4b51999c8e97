use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;

use delve::batch::{batch_reset, batch_step, duplication_probability, env_stream, BatchConfig};
use delve::engine::{reset_with_limit, step_mut};
use delve::obs::{encode_symbolic, render_tiles, symbolic_len, ObsMode};
use delve::{generate_world, LevelParams, RngStream, Tier};

fn tier_of(extended: bool) -> Tier {
    if extended {
        Tier::Extended
    } else {
        Tier::Classic
    }
}

#[test]
fn reset_is_deterministic_and_matches_single_env_generation() {
    let cfg = BatchConfig::new(12, Tier::Classic);
    let a = batch_reset(cfg.clone(), 77).unwrap();
    let b = batch_reset(cfg, 77).unwrap();
    assert_eq!(a.envs(), b.envs());
    let params: HashSet<String> = a.envs().iter().map(|s| format!("{:?}", s.world.params)).collect();
    assert_eq!(params.len(), 12);
    for (i, s) in a.envs().iter().enumerate() {
        let world = generate_world(&LevelParams::from_stream(&env_stream(77, i), Tier::Classic));
        assert_eq!(*s.world, world);
    }
}

#[test]
fn zero_dones_leave_the_pool_untouched() {
    let mut bs = batch_reset(BatchConfig::new(8, Tier::Extended), 3).unwrap();
    let out = batch_step(&mut bs, &[0; 8]).unwrap();
    assert!(out.dones.iter().all(|&d| !d));
    assert!(out.reset_from.iter().all(Option::is_none));
    assert!(bs.pool_used().iter().all(|&u| !u));
    assert!(bs.envs().iter().all(|s| s.time == 1));
    assert_eq!(bs.pool().len(), 1);
}

#[test]
fn forced_done_reports_terminal_transition() {
    let mut bs = batch_reset(BatchConfig::new(4, Tier::Classic), 9).unwrap();
    bs.envs_mut()[2].max_episode_length = 1;
    let out = batch_step(&mut bs, &[0; 4]).unwrap();
    assert_eq!(out.dones, vec![false, false, true, false]);
    assert_eq!(out.finished.len(), 1);
    assert_eq!(out.finished[0].env, 2);
    assert_eq!(out.finished[0].length, 1);
    assert_eq!(out.infos[2].step, 1);
    assert_eq!(bs.envs()[2].time, 0);
    assert_eq!(bs.metrics().episodes, 1);
}

#[test]
fn length_mismatch_is_an_error() {
    let mut bs = batch_reset(BatchConfig::new(3, Tier::Classic), 1).unwrap();
    assert!(batch_step(&mut bs, &[0, 0]).is_err());
}

#[test]
fn observations_match_single_state_encoders() {
    let mut cfg = BatchConfig::new(3, Tier::Extended);
    cfg.obs = ObsMode::Symbolic;
    let mut bs = batch_reset(cfg, 21).unwrap();
    batch_step(&mut bs, &[1, 2, 3]).unwrap();
    let len = symbolic_len(Tier::Extended);
    for (i, s) in bs.envs().iter().enumerate() {
        assert_eq!(&bs.observations()[i * len..(i + 1) * len], encode_symbolic(s).as_slice());
    }

    let mut cfg = BatchConfig::new(2, Tier::Classic);
    cfg.obs = ObsMode::Tiles;
    cfg.tile_px = 7;
    let bs = batch_reset(cfg, 21).unwrap();
    let frame = render_tiles(&bs.envs()[1], 7).unwrap();
    let len = frame.rgb.len();
    assert_eq!(&bs.frames()[len..2 * len], frame.rgb.as_slice());
}

#[test]
fn duplication_bound_from_the_published_setting() {
    assert!(duplication_probability(1024, 1.0 / 200.0, 64).unwrap() < 1e-10);
    assert_eq!(duplication_probability(50, 0.0, 3).unwrap(), 0.0);
}

#[test]
fn duplication_probability_agrees_with_monte_carlo() {
    let (n, p, m) = (64u32, 0.1f64, 10u32);
    let trials = 10_000_000u64;
    let threshold = (p * 4_294_967_296.0) as u32;
    let rng = RngStream::from_seed(2024);
    let mut block = 0u64;
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut x = 0;
        for _ in 0..n / 4 {
            for v in rng.block_at(block) {
                x += u32::from(v < threshold);
            }
            block += 1;
        }
        if x > m {
            hits += 1;
        }
    }
    let exact = duplication_probability(n, p, m).unwrap();
    let mc = hits as f64 / trials as f64;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((mc - exact).abs() <= 3.0 * sigma, "monte carlo {mc}, exact {exact}, sigma {sigma}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn batch_matches_serial_stepping(
        seed in 0u64..10_000,
        extended in any::<bool>(),
        n in 1u32..6,
        actions in prop::collection::vec(any::<u8>(), 1..300),
    ) {
        let tier = tier_of(extended);
        let count = tier.action_count() as u8;
        let mut bs = batch_reset(BatchConfig::new(n, tier), seed).unwrap();
        let mut serial: Vec<_> = (0..n as usize)
            .map(|i| {
                let s = env_stream(seed, i);
                let w = Arc::new(generate_world(&LevelParams::from_stream(&s, tier)));
                reset_with_limit(w, tier, s, bs.config().max_episode_length).unwrap()
            })
            .collect();
        prop_assert_eq!(bs.envs(), serial.as_slice());
        for row in actions.chunks(n as usize).filter(|r| r.len() == n as usize) {
            let acts: Vec<u8> = row.iter().map(|a| a % count).collect();
            let out = batch_step(&mut bs, &acts).unwrap();
            if out.dones.iter().any(|&d| d) {
                break;
            }
            for (i, s) in serial.iter_mut().enumerate() {
                let r = step_mut(s, acts[i]).unwrap();
                prop_assert_eq!(r.reward, out.rewards[i]);
            }
            prop_assert_eq!(bs.envs(), serial.as_slice());
        }
    }

    #[test]
    fn no_env_is_left_done(seed in 0u64..1000, forced in prop::collection::vec(any::<bool>(), 20)) {
        let mut bs = batch_reset(BatchConfig::new(20, Tier::Classic), seed).unwrap();
        for (i, &f) in forced.iter().enumerate() {
            if f {
                bs.envs_mut()[i].max_episode_length = 1;
            }
        }
        let out = batch_step(&mut bs, &[5; 20]).unwrap();
        prop_assert!(bs.envs().iter().all(|s| !s.done));
        let k = forced.iter().filter(|&&f| f).count();
        prop_assert_eq!(out.finished.len(), k);
        prop_assert_eq!(bs.pool_used().iter().filter(|&&u| u).count(), k.min(bs.pool().len()));
    }
}
