use std::f32::consts::PI;

use super::state::GameState;
use super::tables::{Achievement, Block};
use super::{Tier, DAY_LENGTH, PLANT_RIPE_AGE, TORCH_RADIUS};
use crate::worldgen::Pos;

const HUNGER_STEPS: u16 = 25;
const THIRST_STEPS: u16 = 20;
const FATIGUE_STEPS: i16 = 30;
const SLEEP_RECOVERY_STEPS: i16 = 10;
const REGEN_STEPS: i16 = 25;
const STARVE_STEPS: i16 = 15;
const MANA_STEPS: u16 = 20;

/// Overworld light at a point of the day cycle, in `[0, 1]`.
pub fn daylight(time: u32) -> f32 {
    let progress = (time % DAY_LENGTH) as f32 / DAY_LENGTH as f32 + 0.3;
    1.0 - (PI * progress).cos().abs().powi(3)
}

/// Light level of a tile on the player's floor: ambient light (scaled by
/// daylight on the overworld) combined with nearby torches.
pub fn tile_light(state: &GameState, p: Pos) -> f32 {
    if !state.in_bounds(p) {
        return 0.0;
    }
    let f = state.floor();
    let mut light = state.world.floors[f].light_base[state.idx(p)];
    if f == 0 {
        light *= daylight(state.time);
    }
    for t in &state.floors[f].torches {
        let (dr, dc) = ((t.r - p.r) as f32, (t.c - p.c) as f32);
        let d = (dr * dr + dc * dc).sqrt();
        if d <= TORCH_RADIUS {
            light = light.max(1.0 - d / (TORCH_RADIUS + 1.0));
        }
    }
    light.clamp(0.0, 1.0)
}

/// Food, drink, energy and mana schedules, plus regeneration and
/// deprivation damage. Intervals scale linearly with dexterity; sleeping
/// halves hunger and thirst.
pub fn survival_tick(state: &mut GameState) {
    let tier = state.tier;
    let dex = state.player.dexterity.max(1);
    let sleeping = state.player.sleeping;
    let rate: u16 = if sleeping { 1 } else { 2 };
    let c = &mut state.counters;
    let p = &mut state.player;
    let max_food = p.max_food(tier);

    c.hunger += rate;
    if c.hunger >= 2 * HUNGER_STEPS * dex as u16 {
        c.hunger = 0;
        p.food = (p.food - 1.0).max(0.0);
    }
    c.thirst += rate;
    if c.thirst >= 2 * THIRST_STEPS * dex as u16 {
        c.thirst = 0;
        p.drink = (p.drink - 1.0).max(0.0);
    }
    if sleeping {
        c.fatigue = c.fatigue.min(0) - 1;
        if c.fatigue <= -SLEEP_RECOVERY_STEPS {
            c.fatigue = 0;
            p.energy = (p.energy + 1.0).min(max_food);
        }
    } else {
        c.fatigue = c.fatigue.max(0) + 1;
        if c.fatigue >= FATIGUE_STEPS * dex as i16 {
            c.fatigue = 0;
            p.energy = (p.energy - 1.0).max(0.0);
        }
    }

    let depleted = (p.food <= 0.0) as i16 + (p.drink <= 0.0) as i16 + (p.energy <= 0.0 && !sleeping) as i16;
    if depleted == 0 {
        c.recover = c.recover.max(0) + if sleeping || p.resting { 4 } else { 2 };
        if c.recover >= 2 * REGEN_STEPS {
            c.recover = 0;
            p.health = (p.health + 1.0).min(p.max_health(tier));
        }
    } else {
        c.recover = c.recover.min(0) - 2 * depleted;
        if c.recover <= -2 * STARVE_STEPS {
            c.recover = 0;
            p.take_damage(1.0);
        }
    }

    if tier == Tier::Extended {
        c.mana += if sleeping { 4 } else { 2 };
        if c.mana >= 2 * MANA_STEPS {
            c.mana = 0;
            p.mana = (p.mana + 1.0).min(p.max_mana(tier));
        }
    }

    if p.sleeping && p.energy >= max_food {
        p.sleeping = false;
        state.achievements.unlock(Achievement::WakeUp);
    }
    let p = &mut state.player;
    if p.resting && (p.health >= p.max_health(tier) || p.food <= 0.0 || p.drink <= 0.0) {
        p.resting = false;
    }
}

/// Ages saplings on the overworld; a plant ripens after a fixed age and
/// slots whose plant was destroyed are freed.
pub(crate) fn grow_plants(state: &mut GameState) {
    let cols = state.cols() as usize;
    for slot in &mut state.plants {
        if !slot.alive {
            continue;
        }
        let i = slot.pos.r as usize * cols + slot.pos.c as usize;
        match state.floors[0].blocks[i] {
            Block::Plant => {
                slot.age = slot.age.saturating_add(1);
                if slot.age >= PLANT_RIPE_AGE {
                    state.floors[0].blocks[i] = Block::RipePlant;
                }
            }
            Block::RipePlant => {}
            _ => slot.alive = false,
        }
    }
}
