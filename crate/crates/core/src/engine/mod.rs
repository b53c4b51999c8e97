//! Single-environment transition function for both tiers.

mod actions;
mod combat;
mod creatures;
mod state;
mod survival;
pub mod tables;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{streams, RngStream};
use crate::worldgen::{Pos, World, BOSS_FLOOR};
pub use combat::{player_defense, player_melee_damage, resolve_attack};
pub use creatures::{boss_logic, creature_act, spawn_despawn, wave_capacities};
pub use state::{
    floor_capacities, AchievementSet, BossState, Creature, CreatureArray, Direction, Enchant, FloorCreatures,
    FloorState, GameState, Inventory, PlantSlot, Player, SurvivalCounters,
};
pub use survival::{daylight, survival_tick, tile_light};
use tables::{Achievement, Action, Block};

/// Environment variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Classic,
    Extended,
}

impl Tier {
    pub fn action_count(self) -> usize {
        match self {
            Tier::Classic => 17,
            Tier::Extended => 43,
        }
    }

    pub fn achievement_count(self) -> usize {
        match self {
            Tier::Classic => 22,
            Tier::Extended => 67,
        }
    }

    pub fn num_floors(self) -> usize {
        match self {
            Tier::Classic => 1,
            Tier::Extended => crate::worldgen::NUM_FLOORS,
        }
    }

    pub fn default_dims(self) -> (u32, u32) {
        match self {
            Tier::Classic => (64, 64),
            Tier::Extended => (48, 48),
        }
    }

    /// Visible map window as (rows, cols).
    pub fn view(self) -> (usize, usize) {
        match self {
            Tier::Classic => (7, 9),
            Tier::Extended => (9, 11),
        }
    }

    /// Sum of all achievement rewards.
    pub fn max_return(self) -> u32 {
        self.achievements().map(|a| self.achievement_reward(a)).sum()
    }

    pub fn achievements(self) -> impl Iterator<Item = Achievement> {
        Achievement::ALL[..self.achievement_count()].iter().copied()
    }

    /// Classic rewards every achievement with 1.
    pub fn achievement_reward(self, a: Achievement) -> u32 {
        match self {
            Tier::Classic => 1,
            Tier::Extended => a.tier().reward(),
        }
    }

    /// Carry limit per inventory item.
    pub fn inventory_cap(self) -> u8 {
        match self {
            Tier::Classic => 9,
            Tier::Extended => 99,
        }
    }

    pub fn parse(s: &str) -> Result<Tier> {
        match s.to_ascii_lowercase().as_str() {
            "classic" => Ok(Tier::Classic),
            "extended" => Ok(Tier::Extended),
            other => Err(Error::InvalidArgument(format!("unknown tier {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::Classic => "classic",
            Tier::Extended => "extended",
        }
    }
}

pub const DEFAULT_MAX_EPISODE_LENGTH: u32 = 100_000;
pub const DAY_LENGTH: u32 = 300;
pub const AGGRO_RADIUS: i32 = 6;
pub const RANGED_RANGE: i32 = 5;
pub const DESPAWN_RADIUS: i32 = 12;
pub const ATTACK_COOLDOWN: u8 = 2;
pub const TORCH_RADIUS: f32 = 3.0;
pub const LIGHT_THRESHOLD: f32 = 0.05;
pub const PLANT_CAPACITY: usize = 10;
pub const PLANT_RIPE_AGE: u16 = 300;
/// Kills needed on floors 1-7 to unblock the down ladder.
pub const KILLS_TO_CLEAR: u8 = 8;
pub const NECROMANCER_HEALTH: u8 = 8;
pub const SPELL_MANA_COST: f32 = 2.0;
pub const ENCHANT_MANA_COST: f32 = 9.0;

/// Per-step diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Step counter after this transition.
    pub step: u32,
    pub floor: u8,
    /// Health change in tenths of a point.
    pub health_delta_tenths: i32,
}

/// Result of stepping a state in place.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub reward: f32,
    pub done: bool,
    pub newly_unlocked: Vec<Achievement>,
    pub info: StepInfo,
}

/// Result of [`step`].
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: GameState,
    pub reward: f32,
    pub done: bool,
    pub newly_unlocked: Vec<Achievement>,
    pub info: StepInfo,
}

/// Starts an episode on `world`.
pub fn reset(world: Arc<World>, tier: Tier, rng: RngStream) -> Result<GameState> {
    reset_with_limit(world, tier, rng, DEFAULT_MAX_EPISODE_LENGTH)
}

pub fn reset_with_limit(world: Arc<World>, tier: Tier, rng: RngStream, max_episode_length: u32) -> Result<GameState> {
    if world.tier() != tier {
        return Err(Error::TierMismatch { world: world.tier(), requested: tier });
    }
    if max_episode_length == 0 {
        return Err(Error::InvalidArgument("max_episode_length must be positive".into()));
    }
    Ok(GameState::new(world, rng.split(streams::ENGINE), max_episode_length))
}

/// Pure transition: consumes the state and returns the successor.
pub fn step(state: GameState, action: u8) -> Result<StepOutcome> {
    let mut state = state;
    let r = step_mut(&mut state, action)?;
    Ok(StepOutcome { state, reward: r.reward, done: r.done, newly_unlocked: r.newly_unlocked, info: r.info })
}

/// Advances `state` in place by one step.
///
/// Phases run in a fixed order: player action, projectiles, creatures,
/// survival tick, spawn/despawn, plants and day/night, achievements and
/// reward, termination.
pub fn step_mut(state: &mut GameState, action: u8) -> Result<StepReport> {
    let count = state.tier.action_count();
    if action as usize >= count {
        return Err(Error::InvalidAction { action, count: count as u8 });
    }
    if state.done {
        return Err(Error::EpisodeDone);
    }
    let action = Action::from_id(action).expect("checked range");
    let before_bits = state.achievements;
    let before_health = state.player.health_tenths();

    actions::apply_player_action(state, action);
    creatures::advance_projectiles(state);
    creatures::creature_act(state);
    survival::survival_tick(state);
    creatures::spawn_despawn(state);
    if state.player.floor as usize == BOSS_FLOOR {
        creatures::boss_logic(state);
    }
    survival::grow_plants(state);
    state.time += 1;
    state.day_phase = (state.time % DAY_LENGTH) as f32 / DAY_LENGTH as f32;
    state.clear_dead_lanes();

    let newly = state.achievements.newly_since(&before_bits);
    let after_health = state.player.health_tenths();
    let reward = compute_reward_parts(state.tier, &newly, after_health - before_health);
    let done = state.player.health <= 0.0 || state.time >= state.max_episode_length;
    state.done = done;
    Ok(StepReport {
        reward,
        done,
        newly_unlocked: newly,
        info: StepInfo {
            step: state.time,
            floor: state.player.floor,
            health_delta_tenths: after_health - before_health,
        },
    })
}

/// Tier sum of the newly unlocked achievements plus 0.1 per point of health
/// gained, minus 0.1 per point lost.
pub fn compute_reward(prev: &GameState, next: &GameState, newly: &[Achievement]) -> f32 {
    compute_reward_parts(next.tier, newly, next.player.health_tenths() - prev.player.health_tenths())
}

fn compute_reward_parts(tier: Tier, newly: &[Achievement], health_delta_tenths: i32) -> f32 {
    let tiers: u32 = newly.iter().map(|a| tier.achievement_reward(*a)).sum();
    (tiers as f64 + 0.01 * health_delta_tenths as f64) as f32
}

/// Tile facing the player.
pub fn facing_tile(state: &GameState) -> Pos {
    let (dr, dc) = state.player.facing.delta();
    state.player.pos.offset(dr, dc)
}

pub(crate) fn is_necromancer(b: Block) -> bool {
    matches!(b, Block::Necromancer | Block::NecromancerVulnerable)
}

#[cfg(test)]
mod tests;
