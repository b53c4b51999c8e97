use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::tables::{Achievement, Block, CreatureClass, CreatureKind, Damage, Item};
use super::{Tier, NECROMANCER_HEALTH, PLANT_CAPACITY};
use crate::rng::RngStream;
use crate::worldgen::{Pos, World, BOSS_FLOOR};

/// Rounds to one decimal place.
#[inline]
pub(crate) fn q1(x: f32) -> f32 {
    (x * 10.0).round() / 10.0
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
    Up,
    #[default]
    Down,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Up, Direction::Down];

    #[inline]
    pub fn delta(self) -> (i16, i16) {
        match self {
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Enchant {
    #[default]
    None,
    Fire,
    Ice,
}

impl Enchant {
    /// `1` for fire, `2` for ice.
    pub fn code(self) -> f32 {
        match self {
            Enchant::None => 0.0,
            Enchant::Fire => 1.0,
            Enchant::Ice => 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Player {
    pub floor: u8,
    pub pos: Pos,
    pub facing: Direction,
    pub health: f32,
    pub food: f32,
    pub drink: f32,
    pub energy: f32,
    pub mana: f32,
    pub xp: u8,
    pub dexterity: u8,
    pub strength: u8,
    pub intelligence: u8,
    pub sword_tier: u8,
    pub pickaxe_tier: u8,
    pub bow: bool,
    pub armour: [u8; 4],
    pub sword_enchant: Enchant,
    pub bow_enchant: Enchant,
    pub armour_enchants: [Enchant; 4],
    pub learned_fireball: bool,
    pub learned_iceball: bool,
    pub sleeping: bool,
    pub resting: bool,
}

impl Player {
    pub fn new(tier: Tier, pos: Pos) -> Self {
        let mut p = Player {
            floor: 0,
            pos,
            facing: Direction::Down,
            health: 0.0,
            food: 0.0,
            drink: 0.0,
            energy: 0.0,
            mana: 0.0,
            xp: 0,
            dexterity: 1,
            strength: 1,
            intelligence: 1,
            sword_tier: 0,
            pickaxe_tier: 0,
            bow: false,
            armour: [0; 4],
            sword_enchant: Enchant::None,
            bow_enchant: Enchant::None,
            armour_enchants: [Enchant::None; 4],
            learned_fireball: false,
            learned_iceball: false,
            sleeping: false,
            resting: false,
        };
        p.health = p.max_health(tier);
        p.food = p.max_food(tier);
        p.drink = p.max_food(tier);
        p.energy = p.max_food(tier);
        p.mana = p.max_mana(tier);
        p
    }

    pub fn max_health(&self, tier: Tier) -> f32 {
        match tier {
            Tier::Classic => 9.0,
            Tier::Extended => 9.0 + self.strength as f32,
        }
    }

    /// Shared maximum of food, drink and energy.
    pub fn max_food(&self, tier: Tier) -> f32 {
        match tier {
            Tier::Classic => 9.0,
            Tier::Extended => 12.0 + self.dexterity as f32,
        }
    }

    pub fn max_mana(&self, tier: Tier) -> f32 {
        match tier {
            Tier::Classic => 0.0,
            Tier::Extended => 16.0 + self.intelligence as f32,
        }
    }

    #[inline]
    pub fn health_tenths(&self) -> i32 {
        (self.health * 10.0).round() as i32
    }

    /// Applies damage (already resolved against defense); wakes the player.
    pub(crate) fn take_damage(&mut self, amount: f32) {
        if amount <= 0.0 {
            return;
        }
        self.health = q1((self.health - amount).max(0.0));
        self.sleeping = false;
        self.resting = false;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inventory {
    pub wood: u8,
    pub stone: u8,
    pub coal: u8,
    pub iron: u8,
    pub diamond: u8,
    pub sapphire: u8,
    pub ruby: u8,
    pub sapling: u8,
    pub torch: u8,
    pub arrow: u8,
    pub book: u8,
    pub potions: [u8; 6],
}

/// Lanes per creature array; every class capacity fits.
pub const MAX_LANES: usize = 3;

/// One live creature or projectile, as read out of a lane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Creature {
    pub kind: CreatureKind,
    pub pos: Pos,
    pub health: f32,
    pub cooldown: u8,
    /// Travel direction (projectiles only).
    pub dir: (i8, i8),
    /// Damage carried by projectiles.
    pub damage: Damage,
}

impl Creature {
    pub fn new(kind: CreatureKind, pos: Pos) -> Self {
        Creature { kind, pos, health: kind.stats().health, cooldown: 0, dir: (0, 0), damage: kind.stats().damage }
    }
}

/// Fixed-capacity, masked array of creatures of one class.
///
/// Dead lanes (`alive[i] == false`) take no part in any transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreatureArray {
    pub class: CreatureClass,
    pub capacity: u8,
    pub kind: [CreatureKind; MAX_LANES],
    pub pos: [Pos; MAX_LANES],
    pub health: [f32; MAX_LANES],
    pub cooldown: [u8; MAX_LANES],
    pub dir: [(i8, i8); MAX_LANES],
    pub damage: [Damage; MAX_LANES],
    pub alive: [bool; MAX_LANES],
}

impl CreatureArray {
    pub fn new(class: CreatureClass, capacity: u8) -> Self {
        assert!(capacity as usize <= MAX_LANES);
        CreatureArray {
            class,
            capacity,
            kind: [CreatureKind::Zombie; MAX_LANES],
            pos: [Pos::default(); MAX_LANES],
            health: [0.0; MAX_LANES],
            cooldown: [0; MAX_LANES],
            dir: [(0, 0); MAX_LANES],
            damage: [Damage::default(); MAX_LANES],
            alive: [false; MAX_LANES],
        }
    }

    pub fn live_count(&self) -> usize {
        self.alive[..self.capacity as usize].iter().filter(|&&a| a).count()
    }

    pub fn get(&self, i: usize) -> Option<Creature> {
        if i < self.capacity as usize && self.alive[i] {
            Some(Creature {
                kind: self.kind[i],
                pos: self.pos[i],
                health: self.health[i],
                cooldown: self.cooldown[i],
                dir: self.dir[i],
                damage: self.damage[i],
            })
        } else {
            None
        }
    }

    /// Writes `c` into the first free lane; returns its index.
    pub fn insert(&mut self, c: Creature) -> Option<usize> {
        let i = (0..self.capacity as usize).find(|&i| !self.alive[i])?;
        self.set(i, c);
        Some(i)
    }

    pub fn set(&mut self, i: usize, c: Creature) {
        self.kind[i] = c.kind;
        self.pos[i] = c.pos;
        self.health[i] = c.health;
        self.cooldown[i] = c.cooldown;
        self.dir[i] = c.dir;
        self.damage[i] = c.damage;
        self.alive[i] = true;
    }

    pub fn kill(&mut self, i: usize) {
        self.alive[i] = false;
    }

    /// Index of the live lane at `p`.
    #[inline]
    pub fn at(&self, p: Pos) -> Option<usize> {
        (0..self.capacity as usize).find(|&i| self.alive[i] && self.pos[i] == p)
    }

    pub fn iter(&self) -> impl Iterator<Item = Creature> + '_ {
        (0..self.capacity as usize).filter_map(move |i| self.get(i))
    }

    /// Resets every dead lane to the empty value.
    pub(crate) fn clear_dead(&mut self) {
        for i in 0..MAX_LANES {
            if !self.alive[i] || i >= self.capacity as usize {
                self.alive[i] = false;
                self.kind[i] = CreatureKind::Zombie;
                self.pos[i] = Pos::default();
                self.health[i] = 0.0;
                self.cooldown[i] = 0;
                self.dir[i] = (0, 0);
                self.damage[i] = Damage::default();
            }
        }
    }
}

/// All creature arrays of one floor, indexed by [`CreatureClass::index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorCreatures {
    pub arrays: [CreatureArray; 5],
}

impl FloorCreatures {
    pub fn new(capacities: [u8; 5]) -> Self {
        let c = CreatureClass::ALL;
        FloorCreatures { arrays: std::array::from_fn(|i| CreatureArray::new(c[i], capacities[i])) }
    }

    #[inline]
    pub fn class(&self, c: CreatureClass) -> &CreatureArray {
        &self.arrays[c.index()]
    }

    #[inline]
    pub fn class_mut(&mut self, c: CreatureClass) -> &mut CreatureArray {
        &mut self.arrays[c.index()]
    }

    /// Non-projectile creature at `p`.
    pub fn mob_at(&self, p: Pos) -> Option<(CreatureClass, usize)> {
        for c in [CreatureClass::Melee, CreatureClass::Passive, CreatureClass::Ranged] {
            if let Some(i) = self.class(c).at(p) {
                return Some((c, i));
            }
        }
        None
    }
}

/// Achievement bitset; bits only ever gain within an episode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AchievementSet {
    pub bits: u128,
}

impl AchievementSet {
    #[inline]
    pub fn unlock(&mut self, a: Achievement) {
        self.bits |= 1u128 << a.id();
    }

    #[inline]
    pub fn has(&self, a: Achievement) -> bool {
        self.bits & (1u128 << a.id()) != 0
    }

    pub fn count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = Achievement> + '_ {
        Achievement::ALL.iter().copied().filter(move |a| self.has(*a))
    }

    /// Achievements set here but not in `prev`, in id order.
    pub fn newly_since(&self, prev: &AchievementSet) -> Vec<Achievement> {
        let mut diff = self.bits & !prev.bits;
        let mut out = Vec::new();
        while diff != 0 {
            let id = diff.trailing_zeros() as u8;
            out.push(Achievement::from_id(id).expect("valid bit"));
            diff &= diff - 1;
        }
        out
    }
}

/// Mutable copy of one floor's grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorState {
    pub blocks: Vec<Block>,
    pub items: Vec<Item>,
    pub torches: Vec<Pos>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlantSlot {
    pub pos: Pos,
    pub age: u16,
    pub alive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BossState {
    /// Index of the current (or next) wave.
    pub wave: u8,
    pub health: u8,
    pub vulnerable: bool,
    pub wave_active: bool,
}

impl Default for BossState {
    fn default() -> Self {
        BossState { wave: 0, health: NECROMANCER_HEALTH, vulnerable: false, wave_active: false }
    }
}

/// Step counters driving the periodic survival effects.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCounters {
    /// Half-steps since the last food decrement.
    pub hunger: u16,
    pub thirst: u16,
    pub fatigue: i16,
    /// Positive while recovering, negative while starving (half-steps).
    pub recover: i16,
    pub mana: u16,
}

/// Complete snapshot of one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub world: Arc<World>,
    pub tier: Tier,
    pub floors: Vec<FloorState>,
    pub player: Player,
    pub inventory: Inventory,
    pub creatures: Vec<FloorCreatures>,
    pub plants: [PlantSlot; PLANT_CAPACITY],
    pub achievements: AchievementSet,
    pub time: u32,
    pub day_phase: f32,
    pub floors_visited: u16,
    pub floor_cleared: u16,
    pub floor_kills: [u8; 9],
    pub boss: BossState,
    pub counters: SurvivalCounters,
    pub max_episode_length: u32,
    pub done: bool,
    pub rng: RngStream,
}

/// Array capacities per class for ordinary floors.
pub fn floor_capacities(tier: Tier) -> [u8; 5] {
    match tier {
        Tier::Classic => [3, 3, 2, 3, 0],
        Tier::Extended => [3, 3, 2, 3, 3],
    }
}

impl GameState {
    pub(crate) fn new(world: Arc<World>, rng: RngStream, max_episode_length: u32) -> Self {
        let tier = world.tier();
        let floors = world
            .floors
            .iter()
            .map(|f| FloorState { blocks: f.blocks.clone(), items: f.items.clone(), torches: Vec::new() })
            .collect();
        let creatures = (0..world.floors.len())
            .map(|i| {
                if i == BOSS_FLOOR {
                    FloorCreatures::new(super::creatures::wave_capacities(tier))
                } else {
                    FloorCreatures::new(floor_capacities(tier))
                }
            })
            .collect();
        let spawn = world.floors[0].spawn;
        GameState {
            tier,
            floors,
            player: Player::new(tier, spawn),
            inventory: Inventory::default(),
            creatures,
            plants: [PlantSlot::default(); PLANT_CAPACITY],
            achievements: AchievementSet::default(),
            time: 0,
            day_phase: 0.0,
            floors_visited: 1,
            floor_cleared: 0,
            floor_kills: [0; 9],
            boss: BossState::default(),
            counters: SurvivalCounters::default(),
            max_episode_length,
            done: false,
            rng,
            world,
        }
    }

    #[inline]
    pub fn floor(&self) -> usize {
        self.player.floor as usize
    }

    #[inline]
    pub fn rows(&self) -> u32 {
        self.world.params.dims.0
    }

    #[inline]
    pub fn cols(&self) -> u32 {
        self.world.params.dims.1
    }

    #[inline]
    pub fn in_bounds(&self, p: Pos) -> bool {
        p.r >= 0 && p.c >= 0 && (p.r as u32) < self.rows() && (p.c as u32) < self.cols()
    }

    #[inline]
    pub fn idx(&self, p: Pos) -> usize {
        p.r as usize * self.cols() as usize + p.c as usize
    }

    #[inline]
    pub fn block_on(&self, floor: usize, p: Pos) -> Block {
        self.floors[floor].blocks[self.idx(p)]
    }

    /// Block on the player's floor; out-of-bounds reads as `OutOfBounds`.
    #[inline]
    pub fn block(&self, p: Pos) -> Block {
        if self.in_bounds(p) {
            self.block_on(self.floor(), p)
        } else {
            Block::OutOfBounds
        }
    }

    #[inline]
    pub fn set_block(&mut self, p: Pos, b: Block) {
        let (f, i) = (self.floor(), self.idx(p));
        self.floors[f].blocks[i] = b;
    }

    #[inline]
    pub fn item(&self, p: Pos) -> Item {
        if self.in_bounds(p) {
            self.floors[self.floor()].items[self.idx(p)]
        } else {
            Item::None
        }
    }

    pub fn set_item(&mut self, p: Pos, it: Item) {
        let (f, i) = (self.floor(), self.idx(p));
        self.floors[f].items[i] = it;
    }

    #[inline]
    pub fn here(&self) -> &FloorCreatures {
        &self.creatures[self.floor()]
    }

    #[inline]
    pub fn here_mut(&mut self) -> &mut FloorCreatures {
        let f = self.floor();
        &mut self.creatures[f]
    }

    pub fn visited(&self, floor: usize) -> bool {
        self.floors_visited & (1 << floor) != 0
    }

    pub fn cleared(&self, floor: usize) -> bool {
        self.floor_cleared & (1 << floor) != 0
    }

    pub fn unlock(&mut self, a: Achievement) {
        self.achievements.unlock(a);
    }

    /// Adds to an inventory counter, respecting the tier cap.
    pub(crate) fn add(&self, count: u8, n: u8) -> u8 {
        count.saturating_add(n).min(self.tier.inventory_cap())
    }

    pub(crate) fn clear_dead_lanes(&mut self) {
        for fc in &mut self.creatures {
            for a in &mut fc.arrays {
                a.clear_dead();
            }
        }
    }

    /// Live creature count of `kind` on the player's floor.
    pub fn live_kind_count(&self, kind: CreatureKind) -> usize {
        self.here().arrays.iter().map(|a| a.iter().filter(|c| c.kind == kind).count()).sum()
    }

    pub fn growing_plants(&self) -> usize {
        self.plants.iter().filter(|p| p.alive).count()
    }
}
