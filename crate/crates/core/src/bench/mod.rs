//! Throughput sweeps and rollout reports over the batch engine.

mod policy;

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use policy::{scripted_action, Policy, PolicyKind};

use crate::batch::{batch_reset, batch_step, BatchConfig};
use crate::engine::tables::Achievement;
use crate::engine::Tier;
use crate::error::{Error, Result};
use crate::obs::ObsMode;

/// Batch steps excluded from timing at the start of each measurement.
pub const WARMUP_STEPS: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub tier: Tier,
    pub policy: PolicyKind,
    pub obs: ObsMode,
    pub seed: u64,
    /// Rayon threads for every row; 0 uses the rayon default.
    pub threads: u32,
    pub reset_ratio: u32,
}

impl SweepOptions {
    pub fn new(tier: Tier) -> Self {
        SweepOptions {
            tier,
            policy: PolicyKind::Random,
            obs: ObsMode::None,
            seed: 0,
            threads: 0,
            reset_ratio: crate::batch::DEFAULT_RESET_RATIO,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Environments stepped together.
    pub workers: u32,
    /// Timed environment steps (after warmup).
    pub steps: u64,
    pub seconds: f64,
    pub sps: f64,
    pub episodes: u64,
    /// Finished episodes per achievement id; independent of timing.
    pub achievement_episodes: Vec<u64>,
    pub best: bool,
}

/// Runs `steps_per_count` environment steps (rounded up to whole batch
/// steps) for each worker count and reports steps per second. The fastest
/// row is flagged `best`.
pub fn run_speed_sweep(opts: &SweepOptions, worker_counts: &[u32], steps_per_count: u64) -> Result<Vec<SweepRow>> {
    if worker_counts.is_empty() {
        return Err(Error::InvalidArgument("worker_counts must not be empty".into()));
    }
    let mut rows = Vec::with_capacity(worker_counts.len());
    for &w in worker_counts {
        rows.push(measure(opts, w, steps_per_count)?);
    }
    let best = rows.iter().enumerate().max_by(|a, b| a.1.sps.total_cmp(&b.1.sps)).map(|(i, _)| i).unwrap();
    rows[best].best = true;
    Ok(rows)
}

fn measure(opts: &SweepOptions, workers: u32, steps: u64) -> Result<SweepRow> {
    let mut cfg = BatchConfig::new(workers, opts.tier);
    cfg.obs = opts.obs;
    cfg.worker_threads = opts.threads;
    cfg.reset_ratio = opts.reset_ratio;
    let mut bs = batch_reset(cfg, opts.seed)?;
    let n = workers as usize;
    let mut policy = Policy::new(opts.policy, n, opts.seed);
    let mut actions = vec![0u8; n];
    for _ in 0..WARMUP_STEPS {
        policy.act_all(bs.envs(), &mut actions);
        batch_step(&mut bs, &actions)?;
    }
    let batch_steps = steps.div_ceil(workers as u64).max(1);
    let start = Instant::now();
    for _ in 0..batch_steps {
        policy.act_all(bs.envs(), &mut actions);
        batch_step(&mut bs, &actions)?;
    }
    let seconds = start.elapsed().as_secs_f64();
    let timed = batch_steps * workers as u64;
    Ok(SweepRow {
        workers,
        steps: timed,
        seconds,
        sps: timed as f64 / seconds.max(1e-9),
        episodes: bs.metrics().episodes,
        achievement_episodes: bs.metrics().achievement_episodes.clone(),
        best: false,
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("workers,steps,seconds,sps,episodes,best\n");
    for r in rows {
        writeln!(s, "{},{},{:.6},{:.1},{},{}", r.workers, r.steps, r.seconds, r.sps, r.episodes, r.best).unwrap();
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AchievementRate {
    pub name: String,
    pub reward: u32,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutReport {
    pub tier: Tier,
    pub policy: PolicyKind,
    pub seed: u64,
    pub n_envs: u32,
    pub total_steps: u64,
    /// Finished episodes plus truncated first episodes.
    pub episodes: u64,
    pub finished_episodes: u64,
    pub mean_return: f64,
    pub max_return: u32,
    /// Mean return as a percentage of the tier's maximum.
    pub return_percent: f64,
    pub achievements: Vec<AchievementRate>,
}

impl RolloutReport {
    pub fn rate(&self, a: Achievement) -> f64 {
        self.achievements.iter().find(|r| r.name == a.name()).map_or(0.0, |r| r.success_rate)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("achievement,reward,success_rate\n");
        for a in &self.achievements {
            writeln!(s, "{},{},{:.6}", a.name, a.reward, a.success_rate).unwrap();
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutOptions {
    pub tier: Tier,
    pub n_envs: u32,
    pub total_steps: u64,
    pub policy: PolicyKind,
    pub seed: u64,
    pub max_episode_length: u32,
    pub reset_ratio: u32,
    pub threads: u32,
}

impl RolloutOptions {
    pub fn new(tier: Tier, n_envs: u32, total_steps: u64, policy: PolicyKind, seed: u64) -> Self {
        RolloutOptions {
            tier,
            n_envs,
            total_steps,
            policy,
            seed,
            max_episode_length: crate::engine::DEFAULT_MAX_EPISODE_LENGTH,
            reset_ratio: crate::batch::DEFAULT_RESET_RATIO,
            threads: 0,
        }
    }
}

/// Rolls out a policy and reports per-achievement episode success rates and
/// the mean episode return. An environment that never finished an episode
/// contributes its running episode as truncated; later partial episodes are
/// dropped so short restarts do not dilute the rates.
pub fn run_rollout_report(opts: &RolloutOptions) -> Result<RolloutReport> {
    if opts.total_steps < opts.n_envs as u64 {
        return Err(Error::InvalidArgument("total_steps must be at least n_envs".into()));
    }
    let mut cfg = BatchConfig::new(opts.n_envs, opts.tier);
    cfg.max_episode_length = opts.max_episode_length;
    cfg.reset_ratio = opts.reset_ratio;
    cfg.worker_threads = opts.threads;
    let mut bs = batch_reset(cfg, opts.seed)?;
    let n = opts.n_envs as usize;
    let mut policy = Policy::new(opts.policy, n, opts.seed);
    let mut actions = vec![0u8; n];
    let mut returns = vec![0.0f64; n];
    let mut finished_any = vec![false; n];
    let batch_steps = opts.total_steps / opts.n_envs as u64;
    for _ in 0..batch_steps {
        policy.act_all(bs.envs(), &mut actions);
        let out = batch_step(&mut bs, &actions)?;
        for (i, (&r, &d)) in out.rewards.iter().zip(&out.dones).enumerate() {
            returns[i] = if d { 0.0 } else { returns[i] + r as f64 };
            finished_any[i] |= d;
        }
    }
    let m = bs.metrics();
    let mut counts = m.achievement_episodes.clone();
    let mut return_sum = m.return_sum;
    let mut episodes = m.episodes;
    for ((s, &ret), &done_before) in bs.envs().iter().zip(&returns).zip(&finished_any) {
        if !done_before && s.time > 0 {
            episodes += 1;
            return_sum += ret;
            for a in s.achievements.iter() {
                counts[a.id() as usize] += 1;
            }
        }
    }
    let tier = opts.tier;
    let denom = episodes.max(1) as f64;
    let achievements = tier
        .achievements()
        .map(|a| AchievementRate {
            name: a.name().to_string(),
            reward: tier.achievement_reward(a),
            success_rate: counts[a.id() as usize] as f64 / denom,
        })
        .collect();
    let mean_return = return_sum / denom;
    Ok(RolloutReport {
        tier,
        policy: opts.policy,
        seed: opts.seed,
        n_envs: opts.n_envs,
        total_steps: batch_steps * opts.n_envs as u64,
        episodes,
        finished_episodes: m.episodes,
        mean_return,
        max_return: tier.max_return(),
        return_percent: 100.0 * mean_return / tier.max_return() as f64,
        achievements,
    })
}
