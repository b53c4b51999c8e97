//! Reference policies: uniform random and a scripted early-game player.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::engine::tables::{Action, Block, CreatureClass};
use crate::engine::{player_defense, player_melee_damage, resolve_attack, Direction, GameState, ATTACK_COOLDOWN};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::worldgen::Pos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Random,
    Scripted,
}

impl PolicyKind {
    pub fn parse(s: &str) -> Result<PolicyKind> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "scripted" => Ok(PolicyKind::Scripted),
            other => Err(Error::InvalidArgument(format!("unknown policy {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::Scripted => "scripted",
        }
    }
}

/// Chooses one action per environment per step. Randomness comes from one
/// stream per environment, so choices are reproducible for a given seed.
pub struct Policy {
    kind: PolicyKind,
    rngs: Vec<RngStream>,
}

impl Policy {
    pub fn new(kind: PolicyKind, n_envs: usize, seed: u64) -> Self {
        let root = RngStream::from_seed(seed).split(crate::rng::streams::POLICY);
        Policy { kind, rngs: (0..n_envs).map(|i| root.split(i as u64)).collect() }
    }

    pub fn act_all(&mut self, envs: &[GameState], out: &mut [u8]) {
        for ((s, rng), a) in envs.iter().zip(&mut self.rngs).zip(out.iter_mut()) {
            *a = match self.kind {
                PolicyKind::Random => rng.below(s.tier.action_count() as u32) as u8,
                PolicyKind::Scripted => scripted_action(s, rng).id(),
            };
        }
    }
}

const FLEE_HEALTH: f32 = 3.0;

fn dir_action(d: Direction) -> Action {
    match d {
        Direction::Left => Action::Left,
        Direction::Right => Action::Right,
        Direction::Up => Action::Up,
        Direction::Down => Action::Down,
    }
}

fn adjacent(p: Pos) -> impl Iterator<Item = (Direction, Pos)> {
    Direction::ALL.into_iter().map(move |d| {
        let (dr, dc) = d.delta();
        (d, p.offset(dr, dc))
    })
}

fn is_safe_floor(s: &GameState, p: Pos) -> bool {
    s.in_bounds(p) && s.block(p).is_floor() && s.here().mob_at(p).is_none()
}

/// First move of a shortest walk to a tile next to one satisfying
/// `target`, or the facing direction if the player is already beside one.
fn route(s: &GameState, target: impl Fn(Pos) -> bool) -> Option<Direction> {
    let start = s.player.pos;
    for (d, q) in adjacent(start) {
        if s.in_bounds(q) && target(q) {
            return Some(d);
        }
    }
    let (rows, cols) = (s.rows() as usize, s.cols() as usize);
    let mut first: Vec<Option<Direction>> = vec![None; rows * cols];
    let mut seen = vec![false; rows * cols];
    seen[s.idx(start)] = true;
    let mut queue = VecDeque::new();
    for (d, q) in adjacent(start) {
        if is_safe_floor(s, q) && !seen[s.idx(q)] {
            seen[s.idx(q)] = true;
            first[s.idx(q)] = Some(d);
            queue.push_back(q);
        }
    }
    while let Some(p) = queue.pop_front() {
        let via = first[s.idx(p)];
        for (_, q) in adjacent(p) {
            if !s.in_bounds(q) {
                continue;
            }
            if target(q) {
                return via;
            }
            if !seen[s.idx(q)] && is_safe_floor(s, q) {
                seen[s.idx(q)] = true;
                first[s.idx(q)] = via;
                queue.push_back(q);
            }
        }
    }
    None
}

/// Walks toward (or faces) the nearest tile matching `target`, then `DO`.
fn go_and_do(s: &GameState, target: impl Fn(Pos) -> bool, rng: &mut RngStream) -> Action {
    match route(s, &target) {
        Some(d) => {
            let (dr, dc) = d.delta();
            if s.player.facing == d && target(s.player.pos.offset(dr, dc)) {
                Action::Do
            } else {
                dir_action(d)
            }
        }
        None => explore(rng),
    }
}

fn explore(rng: &mut RngStream) -> Action {
    [Action::Left, Action::Right, Action::Up, Action::Down][rng.below(4) as usize]
}

struct Threat {
    pos: Pos,
    health: f32,
    cooldown: u8,
    damage: f32,
    melee: bool,
}

fn hostiles(s: &GameState) -> Vec<Threat> {
    let here = s.here();
    let defense = player_defense(&s.player);
    [CreatureClass::Melee, CreatureClass::Ranged]
        .into_iter()
        .flat_map(|class| {
            let a = here.class(class);
            (0..a.capacity as usize).filter_map(move |i| {
                a.get(i).map(|c| Threat {
                    pos: c.pos,
                    health: c.health,
                    cooldown: a.cooldown[i],
                    damage: resolve_attack(c.kind.stats().damage, defense),
                    melee: class == CreatureClass::Melee,
                })
            })
        })
        .filter(|t| t.pos.manhattan(s.player.pos) <= 6)
        .collect()
}

/// Damage the player expects to take from nearby melee threats while
/// killing `target`, counting `turn` extra steps to face it.
fn fight_cost(s: &GameState, threats: &[Threat], target: &Threat, turn: u32) -> f32 {
    let per_hit = resolve_attack(player_melee_damage(&s.player), Default::default()).max(0.1);
    let steps = (target.health / per_hit).ceil() as u32 + turn;
    threats
        .iter()
        .filter(|t| t.melee && t.pos.manhattan(s.player.pos) <= 2)
        .map(|t| {
            let first = t.cooldown as u32 + t.pos.manhattan(s.player.pos) as u32;
            let attacks = if steps >= first { 1 + (steps - first) / (ATTACK_COOLDOWN as u32 + 1) } else { 0 };
            attacks as f32 * t.damage
        })
        .sum()
}

/// Safe step that maximises distance to the closest threat.
fn flee(s: &GameState, threats: &[Pos]) -> Option<Direction> {
    let gap = |p: Pos| threats.iter().map(|&q| q.manhattan(p)).min().unwrap_or(i32::MAX);
    let now = gap(s.player.pos);
    adjacent(s.player.pos)
        .filter(|&(_, q)| is_safe_floor(s, q) && gap(q) > now)
        .max_by_key(|&(_, q)| gap(q))
        .map(|(d, _)| d)
}

fn table_nearby(s: &GameState) -> bool {
    let p = s.player.pos;
    (-1..=1).any(|dr| (-1..=1).any(|dc| s.block(p.offset(dr, dc)) == Block::CraftingTable))
}

/// Early tech tree: wood, table, wooden pickaxe and sword, stone. Fights adjacent
/// hostiles and drinks when thirsty along the way.
pub fn scripted_action(s: &GameState, rng: &mut RngStream) -> Action {
    if s.player.sleeping {
        return Action::Noop;
    }
    let threats = hostiles(s);
    let positions: Vec<Pos> = threats.iter().map(|t| t.pos).collect();
    let nearest = positions.iter().map(|&q| q.manhattan(s.player.pos)).min().unwrap_or(i32::MAX);
    for (d, q) in adjacent(s.player.pos) {
        if let Some(t) = threats.iter().find(|t| t.pos == q) {
            let turn = u32::from(s.player.facing != d);
            if fight_cost(s, &threats, t, turn) < s.player.health {
                return if turn == 0 { Action::Do } else { dir_action(d) };
            }
        }
    }
    if nearest <= 2 && (nearest == 1 || s.player.health < FLEE_HEALTH) {
        if let Some(d) = flee(s, &positions) {
            return dir_action(d);
        }
    }
    for (d, q) in adjacent(s.player.pos) {
        if positions.contains(&q) {
            return if s.player.facing == d { Action::Do } else { dir_action(d) };
        }
    }
    if s.player.drink < 4.0 {
        return go_and_do(s, |q| s.block(q) == Block::Water, rng);
    }
    let (pickaxe, sword) = (s.player.pickaxe_tier == 0, s.player.sword_tier == 0);
    if pickaxe || sword {
        let table = table_nearby(s);
        let needed = u8::from(!table) + u8::from(pickaxe) + u8::from(sword);
        if s.inventory.wood < needed {
            return go_and_do(s, |q| s.block(q).is_tree(), rng);
        }
        if table {
            return if pickaxe { Action::MakeWoodPickaxe } else { Action::MakeWoodSword };
        }
        let ahead = {
            let (dr, dc) = s.player.facing.delta();
            s.player.pos.offset(dr, dc)
        };
        if is_safe_floor(s, ahead) && s.item(ahead) == crate::engine::tables::Item::None {
            return Action::PlaceTable;
        }
        if let Some((d, _)) = adjacent(s.player.pos).find(|&(_, q)| is_safe_floor(s, q)) {
            return dir_action(d);
        }
        return explore(rng);
    }
    if s.player.energy < 2.0 {
        return Action::Sleep;
    }
    go_and_do(s, |q| s.block(q) == Block::Stone, rng)
}
