//! Creature movement, projectiles, spawning and the boss fight.

use super::combat::{player_defense, resolve_attack};
use super::state::{floor_capacities, Creature, GameState};
use super::survival::daylight;
use super::tables::{floor_creatures, Block, Collision, CreatureClass, CreatureKind, Damage};
use super::{Tier, AGGRO_RADIUS, ATTACK_COOLDOWN, DESPAWN_RADIUS, KILLS_TO_CLEAR, RANGED_RANGE};
use crate::engine::tables::{Achievement, Item};
use crate::worldgen::{necromancer_pos, Pos, BOSS_FLOOR};

const DIRS: [(i16, i16); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];
const SPAWN_MAX_DIST: i32 = 8;

/// Boss-wave capacities: ordinary capacities halved, rounded up, for the
/// three creature classes.
pub fn wave_capacities(tier: Tier) -> [u8; 5] {
    let mut c = floor_capacities(tier);
    for v in &mut c[..3] {
        *v = v.div_ceil(2);
    }
    c
}

#[inline]
fn projectile_passable(b: Block) -> bool {
    b.is_floor() || matches!(b, Block::Water | Block::Lava)
}

fn collision_ok(collision: Collision, b: Block) -> bool {
    match collision {
        Collision::Ground => b.is_floor(),
        Collision::Flying => b.is_floor() || matches!(b, Block::Water | Block::Lava),
        Collision::Amphibian => b.is_floor() || b == Block::Water,
        Collision::Aquatic => b == Block::Water,
    }
}

/// Whether a creature of `kind` may step onto `p`.
pub(crate) fn can_creature_enter(state: &GameState, kind: CreatureKind, p: Pos) -> bool {
    state.in_bounds(p)
        && p != state.player.pos
        && collision_ok(kind.stats().collision, state.block(p))
        && state.here().mob_at(p).is_none()
}

/// Applies player-dealt damage to a mob lane; handles death, eating and
/// floor-clear bookkeeping. Returns true if the mob died.
pub(crate) fn damage_mob(state: &mut GameState, class: CreatureClass, lane: usize, damage: Damage) -> bool {
    let kind = state.here().class(class).kind[lane];
    let dealt = resolve_attack(damage, kind.stats().defense);
    let arr = state.here_mut().class_mut(class);
    arr.health[lane] = super::state::q1(arr.health[lane] - dealt);
    if arr.health[lane] > 0.0 {
        return false;
    }
    arr.kill(lane);
    if let Some(a) = kind.defeat_achievement() {
        state.unlock(a);
    }
    if class == CreatureClass::Passive {
        let max = state.player.max_food(state.tier);
        state.player.food = (state.player.food + 6.0).min(max);
    } else {
        let f = state.floor();
        if (1..BOSS_FLOOR).contains(&f) {
            state.floor_kills[f] = state.floor_kills[f].saturating_add(1);
            if state.floor_kills[f] >= KILLS_TO_CLEAR && !state.cleared(f) {
                state.floor_cleared |= 1 << f;
                if let Some(p) = state.world.floors[f].ladder_down {
                    state.set_item(p, Item::LadderDown);
                }
            }
        }
    }
    true
}

/// Moves every projectile one tile and resolves hits.
pub(crate) fn advance_projectiles(state: &mut GameState) {
    let mob = CreatureClass::MobProjectile;
    for i in 0..state.here().class(mob).capacity as usize {
        let Some(p) = state.here().class(mob).get(i) else { continue };
        let next = p.pos.offset(p.dir.0 as i16, p.dir.1 as i16);
        if next == state.player.pos {
            let dealt = resolve_attack(p.damage, player_defense(&state.player));
            state.player.take_damage(dealt);
            state.here_mut().class_mut(mob).kill(i);
        } else if !state.in_bounds(next)
            || !projectile_passable(state.block(next))
            || state.here().mob_at(next).is_some()
        {
            state.here_mut().class_mut(mob).kill(i);
        } else {
            state.here_mut().class_mut(mob).pos[i] = next;
        }
    }

    let own = CreatureClass::PlayerProjectile;
    for i in 0..state.here().class(own).capacity as usize {
        let Some(p) = state.here().class(own).get(i) else { continue };
        let next = p.pos.offset(p.dir.0 as i16, p.dir.1 as i16);
        if let Some((class, lane)) = state.here().mob_at(next) {
            damage_mob(state, class, lane, p.damage);
            state.here_mut().class_mut(own).kill(i);
        } else if state.block(next) == Block::NecromancerVulnerable {
            hit_necromancer(state);
            state.here_mut().class_mut(own).kill(i);
        } else if !state.in_bounds(next) || !projectile_passable(state.block(next)) {
            state.here_mut().class_mut(own).kill(i);
        } else {
            state.here_mut().class_mut(own).pos[i] = next;
        }
    }
}

fn random_step(state: &mut GameState, class: CreatureClass, lane: usize) {
    let d = DIRS[state.rng.below(4) as usize];
    try_move(state, class, lane, d);
}

fn try_move(state: &mut GameState, class: CreatureClass, lane: usize, d: (i16, i16)) -> bool {
    let arr = state.here().class(class);
    let (kind, pos) = (arr.kind[lane], arr.pos[lane]);
    let next = pos.offset(d.0, d.1);
    if can_creature_enter(state, kind, next) {
        state.here_mut().class_mut(class).pos[lane] = next;
        true
    } else {
        false
    }
}

/// Steps toward `target` along the longer axis first, then the shorter.
fn step_toward(state: &mut GameState, class: CreatureClass, lane: usize, target: Pos) {
    let pos = state.here().class(class).pos[lane];
    let (dr, dc) = (target.r - pos.r, target.c - pos.c);
    let vertical = (dr.signum(), 0);
    let horizontal = (0, dc.signum());
    let (first, second) = if dr.abs() >= dc.abs() { (vertical, horizontal) } else { (horizontal, vertical) };
    if first != (0, 0) && try_move(state, class, lane, first) {
        return;
    }
    if second != (0, 0) {
        try_move(state, class, lane, second);
    }
}

/// True if every tile strictly between `a` and `b` (same row or column)
/// lets a projectile through.
fn line_clear(state: &GameState, a: Pos, b: Pos) -> bool {
    let (sr, sc) = ((b.r - a.r).signum(), (b.c - a.c).signum());
    let mut p = a.offset(sr, sc);
    while p != b {
        if !projectile_passable(state.block(p)) || state.here().mob_at(p).is_some() {
            return false;
        }
        p = p.offset(sr, sc);
    }
    true
}

/// Moves and attacks with every live creature on the player's floor.
pub fn creature_act(state: &mut GameState) {
    let player = state.player.pos;
    for class in [CreatureClass::Melee, CreatureClass::Passive, CreatureClass::Ranged] {
        for lane in 0..state.here().class(class).capacity as usize {
            let Some(c) = state.here().class(class).get(lane) else { continue };
            // A lane either waits out its cooldown or may attack, never both.
            let ready = {
                let arr = state.here_mut().class_mut(class);
                let cd = arr.cooldown[lane];
                arr.cooldown[lane] = cd.saturating_sub(1);
                cd == 0
            };
            let dist = c.pos.manhattan(player);
            match class {
                CreatureClass::Melee => {
                    if dist == 1 {
                        if ready {
                            let dealt = resolve_attack(c.kind.stats().damage, player_defense(&state.player));
                            state.player.take_damage(dealt);
                            state.here_mut().class_mut(class).cooldown[lane] = ATTACK_COOLDOWN;
                        }
                    } else if dist <= AGGRO_RADIUS && state.rng.chance(0.8) {
                        step_toward(state, class, lane, player);
                    } else if state.rng.chance(0.3) {
                        random_step(state, class, lane);
                    }
                }
                CreatureClass::Ranged => {
                    let aligned = c.pos.r == player.r || c.pos.c == player.c;
                    if aligned && dist <= RANGED_RANGE && ready && line_clear(state, c.pos, player) {
                        let kind = c.kind.stats().projectile.unwrap_or(CreatureKind::Arrow);
                        let dir = ((player.r - c.pos.r).signum() as i8, (player.c - c.pos.c).signum() as i8);
                        let mut shot = Creature::new(kind, c.pos);
                        shot.dir = dir;
                        shot.damage = c.kind.stats().damage;
                        if state.here_mut().class_mut(CreatureClass::MobProjectile).insert(shot).is_some() {
                            state.here_mut().class_mut(class).cooldown[lane] = ATTACK_COOLDOWN;
                        }
                    } else if dist <= AGGRO_RADIUS && dist > 2 && state.rng.chance(0.6) {
                        step_toward(state, class, lane, player);
                    } else if state.rng.chance(0.3) {
                        random_step(state, class, lane);
                    }
                }
                _ => {
                    if state.rng.chance(0.5) {
                        random_step(state, class, lane);
                    }
                }
            }
        }
    }
}

/// Per-step spawn probability for a class on a floor.
fn spawn_chance(state: &GameState, class: CreatureClass) -> f32 {
    if state.floor() == 0 {
        match class {
            CreatureClass::Melee => 0.02 + 0.1 * (1.0 - daylight(state.time)),
            CreatureClass::Passive => 0.02,
            _ => 0.05,
        }
    } else {
        match class {
            CreatureClass::Melee => 0.05,
            CreatureClass::Passive => 0.02,
            _ => 0.04,
        }
    }
}

/// Extra terrain restriction on the overworld: skeletons live in tunnels,
/// zombies and cows on grass.
fn spawn_terrain_ok(state: &GameState, kind: CreatureKind, b: Block) -> bool {
    if state.floor() != 0 {
        return true;
    }
    match kind {
        CreatureKind::Skeleton => b == Block::Path,
        _ => b == Block::Grass,
    }
}

/// Masks out distant creatures and attempts one spawn per class.
pub fn spawn_despawn(state: &mut GameState) {
    let player = state.player.pos;
    let floor = state.floor();
    let boss = floor == BOSS_FLOOR;
    for class in CreatureClass::ALL {
        if boss && !matches!(class, CreatureClass::MobProjectile | CreatureClass::PlayerProjectile) {
            continue;
        }
        let arr = state.here_mut().class_mut(class);
        for lane in 0..arr.capacity as usize {
            if arr.alive[lane] && arr.pos[lane].chebyshev(player) > DESPAWN_RADIUS {
                arr.kill(lane);
            }
        }
    }
    if boss {
        return;
    }

    let (melee, passive, ranged) = floor_creatures(floor);
    for (class, kind) in
        [(CreatureClass::Melee, melee), (CreatureClass::Passive, passive), (CreatureClass::Ranged, ranged)]
    {
        let Some(kind) = kind else { continue };
        let arr = state.here().class(class);
        if arr.live_count() >= arr.capacity as usize {
            continue;
        }
        if !state.rng.chance(spawn_chance(state, class)) {
            continue;
        }
        let span = (2 * SPAWN_MAX_DIST + 1) as u32;
        let dr = state.rng.below(span) as i32 - SPAWN_MAX_DIST;
        let dc = state.rng.below(span) as i32 - SPAWN_MAX_DIST;
        let (rows, cols) = state.tier.view();
        if dr.abs() <= rows as i32 / 2 && dc.abs() <= cols as i32 / 2 {
            continue;
        }
        let p = player.offset(dr as i16, dc as i16);
        if !can_creature_enter(state, kind, p) || !spawn_terrain_ok(state, kind, state.block(p)) {
            continue;
        }
        let mut c = Creature::new(kind, p);
        c.cooldown = ATTACK_COOLDOWN;
        state.here_mut().class_mut(class).insert(c);
    }
}

fn set_necromancer(state: &mut GameState, b: Block) {
    let p = necromancer_pos(state.world.params.dims);
    if super::is_necromancer(state.block_on(BOSS_FLOOR, p)) {
        let i = state.idx(p);
        state.floors[BOSS_FLOOR].blocks[i] = b;
    }
}

/// Player hit on the necromancer. Only lands while it is vulnerable.
pub(crate) fn hit_necromancer(state: &mut GameState) {
    if !state.boss.vulnerable || state.boss.health == 0 {
        return;
    }
    state.boss.health -= 1;
    state.boss.vulnerable = false;
    state.unlock(Achievement::DamageNecromancer);
    if state.boss.health == 0 {
        state.unlock(Achievement::DefeatNecromancer);
        state.floor_cleared |= 1 << BOSS_FLOOR;
        set_necromancer(state, Block::Path);
    } else {
        set_necromancer(state, Block::Necromancer);
        state.boss.wave = state.boss.wave.wrapping_add(1);
    }
}

/// Runs the wave cycle on the boss floor: summon a wave, and once every
/// summoned enemy is dead expose the necromancer until it is hit.
pub fn boss_logic(state: &mut GameState) {
    if state.floor() != BOSS_FLOOR || state.boss.health == 0 {
        return;
    }
    let enemies_alive =
        state.here().class(CreatureClass::Melee).live_count() + state.here().class(CreatureClass::Ranged).live_count();
    if state.boss.wave_active {
        if enemies_alive == 0 {
            state.boss.wave_active = false;
            state.boss.vulnerable = true;
            set_necromancer(state, Block::NecromancerVulnerable);
        }
        return;
    }
    if state.boss.vulnerable {
        return;
    }
    let wave_floor = (state.boss.wave % BOSS_FLOOR as u8) as usize;
    let (melee, _, ranged) = floor_creatures(wave_floor);
    for (class, kind) in [(CreatureClass::Melee, melee), (CreatureClass::Ranged, ranged)] {
        let Some(kind) = kind else { continue };
        let cap = state.here().class(class).capacity;
        for _ in 0..cap {
            for _attempt in 0..16 {
                let r = state.rng.below(state.rows()) as i16;
                let c = state.rng.below(state.cols()) as i16;
                let p = Pos::new(r, c);
                if p.chebyshev(state.player.pos) >= 2 && can_creature_enter(state, kind, p) {
                    let mut cr = Creature::new(kind, p);
                    cr.cooldown = ATTACK_COOLDOWN;
                    state.here_mut().class_mut(class).insert(cr);
                    break;
                }
            }
        }
    }
    state.boss.wave_active = true;
}
