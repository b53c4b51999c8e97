//! Batched stepping of many environments with optimistic resets.
//!
//! Each batch step generates a small pool of `M = ceil(N / reset_ratio)`
//! fresh worlds. Environments that finish are handed distinct pool worlds
//! while they last; beyond that, worlds are reused round-robin. Pool
//! entries and reset streams are pure functions of `(seed, step, index)`,
//! so results do not depend on the worker count.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::tables::Achievement;
use crate::engine::{
    reset_with_limit, step_mut, AchievementSet, GameState, StepInfo, Tier, DEFAULT_MAX_EPISODE_LENGTH,
};
use crate::error::{Error, Result};
use crate::obs::{encode_symbolic_into, render_tiles, symbolic_len, ObsMode};
use crate::rng::{streams, RngStream};
use crate::worldgen::{generate_world, LevelParams, World};

pub const DEFAULT_RESET_RATIO: u32 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub n_envs: u32,
    /// Environments per freshly generated world; `M = ceil(N / ratio)`.
    pub reset_ratio: u32,
    pub tier: Tier,
    pub max_episode_length: u32,
    /// Rayon worker threads; 0 uses the rayon default.
    pub worker_threads: u32,
    pub obs: ObsMode,
    /// Pixels per tile when `obs` is [`ObsMode::Tiles`].
    pub tile_px: u8,
}

impl BatchConfig {
    pub fn new(n_envs: u32, tier: Tier) -> Self {
        BatchConfig {
            n_envs,
            reset_ratio: DEFAULT_RESET_RATIO,
            tier,
            max_episode_length: DEFAULT_MAX_EPISODE_LENGTH,
            worker_threads: 0,
            obs: ObsMode::None,
            tile_px: match tier {
                Tier::Classic => 7,
                Tier::Extended => 10,
            },
        }
    }

    pub fn pool_size(&self) -> usize {
        self.n_envs.div_ceil(self.reset_ratio) as usize
    }

    fn validate(&self) -> Result<()> {
        if self.n_envs == 0 {
            return Err(Error::InvalidArgument("n_envs must be at least 1".into()));
        }
        if self.reset_ratio == 0 {
            return Err(Error::InvalidArgument("reset_ratio must be at least 1".into()));
        }
        if self.max_episode_length == 0 {
            return Err(Error::InvalidArgument("max_episode_length must be positive".into()));
        }
        if self.obs == ObsMode::Tiles && !crate::obs::TILE_SIZES.contains(&self.tile_px) {
            return Err(Error::InvalidArgument(format!("unsupported tile size {}", self.tile_px)));
        }
        Ok(())
    }

    /// Length of one environment's observation.
    pub fn obs_len(&self) -> usize {
        match self.obs {
            ObsMode::None => 0,
            ObsMode::Symbolic => symbolic_len(self.tier),
            ObsMode::Tiles => {
                let (rows, cols) = self.tier.view();
                let px = self.tile_px as usize;
                cols * px * (rows + crate::obs::strip_rows(self.tier)) * px * 3
            }
        }
    }
}

/// Running totals across the whole batch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub steps: u64,
    pub episodes: u64,
    pub pool_worlds_generated: u64,
    /// Resets that had to share a pool world with an earlier reset in the
    /// same step.
    pub duplicate_resets: u64,
    /// Finished episodes that unlocked each achievement, by id.
    pub achievement_episodes: Vec<u64>,
    pub return_sum: f64,
    pub length_sum: u64,
}

impl Metrics {
    fn new() -> Self {
        Metrics {
            steps: 0,
            episodes: 0,
            pool_worlds_generated: 0,
            duplicate_resets: 0,
            achievement_episodes: vec![0; Achievement::COUNT],
            return_sum: 0.0,
            length_sum: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinishedEpisode {
    pub env: usize,
    pub episode_return: f64,
    pub length: u32,
    pub achievements: AchievementSet,
}

/// Per-step results. Rewards and dones describe the transition each
/// environment just took, including terminal ones; observations (held in
/// the [`BatchState`]) already show the replacement episode.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BatchOutcome {
    pub rewards: Vec<f32>,
    pub dones: Vec<bool>,
    pub unlocked: Vec<Vec<Achievement>>,
    pub infos: Vec<StepInfo>,
    /// Pool index each environment was reset from, if it was reset.
    pub reset_from: Vec<Option<usize>>,
    pub finished: Vec<FinishedEpisode>,
}

#[derive(Clone)]
pub struct BatchState {
    cfg: BatchConfig,
    root: RngStream,
    step_index: u64,
    envs: Vec<GameState>,
    returns: Vec<f64>,
    pool: Vec<Arc<World>>,
    pool_used: Vec<bool>,
    obs: Vec<f32>,
    frames: Vec<u8>,
    metrics: Metrics,
    threads: Arc<rayon::ThreadPool>,
}

impl std::fmt::Debug for BatchState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BatchState")
            .field("cfg", &self.cfg)
            .field("step_index", &self.step_index)
            .field("n_envs", &self.envs.len())
            .finish()
    }
}

impl BatchState {
    pub fn config(&self) -> &BatchConfig {
        &self.cfg
    }

    pub fn envs(&self) -> &[GameState] {
        &self.envs
    }

    /// Direct access for test harnesses that need to force terminations.
    pub fn envs_mut(&mut self) -> &mut [GameState] {
        &mut self.envs
    }

    pub fn pool(&self) -> &[Arc<World>] {
        &self.pool
    }

    pub fn pool_used(&self) -> &[bool] {
        &self.pool_used
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Symbolic observations, `N x obs_len` row-major; empty unless the
    /// batch encodes symbolic observations.
    pub fn observations(&self) -> &[f32] {
        &self.obs
    }

    /// RGB frames, `N x obs_len` bytes; empty unless the batch renders tiles.
    pub fn frames(&self) -> &[u8] {
        &self.frames
    }

    fn encode(&mut self) {
        let len = self.cfg.obs_len();
        match self.cfg.obs {
            ObsMode::None => {}
            ObsMode::Symbolic => {
                let envs = &self.envs;
                let obs = &mut self.obs;
                self.threads.install(|| {
                    obs.par_chunks_mut(len).zip(envs.par_iter()).for_each(|(o, s)| encode_symbolic_into(s, o));
                });
            }
            ObsMode::Tiles => {
                let px = self.cfg.tile_px;
                let envs = &self.envs;
                let frames = &mut self.frames;
                self.threads.install(|| {
                    frames.par_chunks_mut(len).zip(envs.par_iter()).for_each(|(o, s)| {
                        o.copy_from_slice(&render_tiles(s, px).expect("tile size validated").rgb);
                    });
                });
            }
        }
    }
}

fn build_threads(n: u32) -> Result<Arc<rayon::ThreadPool>> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n as usize)
        .build()
        .map(Arc::new)
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Stream that seeds environment `i` of a batch.
pub fn env_stream(seed: u64, i: usize) -> RngStream {
    RngStream::from_seed(seed).split(i as u64)
}

/// Generates `N` independent worlds and starts an episode in each.
pub fn batch_reset(cfg: BatchConfig, seed: u64) -> Result<BatchState> {
    cfg.validate()?;
    let threads = build_threads(cfg.worker_threads)?;
    let n = cfg.n_envs as usize;
    let (tier, max_len) = (cfg.tier, cfg.max_episode_length);
    let envs: Vec<GameState> = threads.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let s = env_stream(seed, i);
                let world = Arc::new(generate_world(&LevelParams::from_stream(&s, tier)));
                reset_with_limit(world, tier, s, max_len)
            })
            .collect::<Result<_>>()
    })?;
    let obs = if cfg.obs == ObsMode::Symbolic { vec![0.0; n * cfg.obs_len()] } else { Vec::new() };
    let frames = if cfg.obs == ObsMode::Tiles { vec![0; n * cfg.obs_len()] } else { Vec::new() };
    let mut bs = BatchState {
        root: RngStream::from_seed(seed),
        step_index: 0,
        returns: vec![0.0; n],
        pool: Vec::new(),
        pool_used: vec![false; cfg.pool_size()],
        obs,
        frames,
        metrics: Metrics::new(),
        threads,
        envs,
        cfg,
    };
    bs.encode();
    Ok(bs)
}

/// Pool world `j` of batch step `step`.
fn pool_world(root: &RngStream, step: u64, j: usize, tier: Tier) -> Arc<World> {
    let s = root.split(streams::RESET_POOL).split(step).split(j as u64);
    Arc::new(generate_world(&LevelParams::from_stream(&s, tier)))
}

/// Steps every environment once and resets those that finished.
pub fn batch_step(bs: &mut BatchState, actions: &[u8]) -> Result<BatchOutcome> {
    let n = bs.envs.len();
    if actions.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: actions.len() });
    }
    let count = bs.cfg.tier.action_count();
    if let Some(i) = actions.iter().position(|&a| a as usize >= count) {
        return Err(Error::InvalidArgument(format!("action {} for env {i} is out of range 0..{count}", actions[i])));
    }

    let reports: Vec<_> = bs.threads.install(|| {
        bs.envs.par_iter_mut().zip(actions.par_iter()).map(|(s, &a)| step_mut(s, a)).collect::<Result<Vec<_>>>()
    })?;

    let step = bs.step_index;
    let (tier, max_len) = (bs.cfg.tier, bs.cfg.max_episode_length);
    let m = bs.cfg.pool_size();
    let root = bs.root;
    bs.pool = bs.threads.install(|| (0..m).into_par_iter().map(|j| pool_world(&root, step, j, tier)).collect());
    bs.pool_used.iter_mut().for_each(|u| *u = false);
    bs.metrics.pool_worlds_generated += m as u64;

    let mut out = BatchOutcome {
        rewards: Vec::with_capacity(n),
        dones: Vec::with_capacity(n),
        unlocked: Vec::with_capacity(n),
        infos: Vec::with_capacity(n),
        reset_from: vec![None; n],
        finished: Vec::new(),
    };
    let mut resets = 0usize;
    for (i, r) in reports.into_iter().enumerate() {
        bs.returns[i] += r.reward as f64;
        if r.done {
            let s = &bs.envs[i];
            let ep =
                FinishedEpisode { env: i, episode_return: bs.returns[i], length: s.time, achievements: s.achievements };
            bs.metrics.episodes += 1;
            bs.metrics.return_sum += ep.episode_return;
            bs.metrics.length_sum += ep.length as u64;
            for a in ep.achievements.iter() {
                bs.metrics.achievement_episodes[a.id() as usize] += 1;
            }
            out.finished.push(ep);

            let j = resets % m;
            if resets >= m {
                bs.metrics.duplicate_resets += 1;
            }
            resets += 1;
            bs.pool_used[j] = true;
            let rng = root.split(streams::RESET_ENGINE).split(step).split(i as u64);
            bs.envs[i] = reset_with_limit(bs.pool[j].clone(), tier, rng, max_len)?;
            bs.returns[i] = 0.0;
            out.reset_from[i] = Some(j);
        }
        out.rewards.push(r.reward);
        out.dones.push(r.done);
        out.unlocked.push(r.newly_unlocked);
        out.infos.push(r.info);
    }
    bs.metrics.steps += n as u64;
    bs.step_index += 1;
    bs.encode();
    Ok(out)
}

/// `P(X > m)` for `X ~ Binomial(n, p)`, summed in log space.
pub fn duplication_probability(n: u32, p: f64, m: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    if m > n {
        return Err(Error::InvalidArgument(format!("threshold {m} exceeds trials {n}")));
    }
    if m == n || p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    // log C(n, k) built up incrementally from k = 0.
    let mut log_c = 0.0f64;
    for k in 0..=m {
        if k > 0 {
            log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
    }
    let mut terms = Vec::with_capacity((n - m) as usize);
    for k in (m + 1)..=n {
        log_c += ((n - k + 1) as f64).ln() - (k as f64).ln();
        terms.push(log_c + k as f64 * lp + (n - k) as f64 * lq);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    Ok((max + sum.ln()).exp().min(1.0))
}
