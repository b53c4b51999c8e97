//! Procedural generation of all floors from [`LevelParams`].

mod dungeon;
mod mutate;
mod overworld;
pub mod perlin;

use serde::{Deserialize, Serialize};

use crate::engine::tables::{Block, Item};
use crate::engine::Tier;
use crate::rng::{streams, RngStream};
pub use dungeon::necromancer_pos;
pub use mutate::{
    central_window, compatibility_class, mutate_noise, mutate_noise_with_range, mutate_rswap, mutate_swap, SwapRecord,
    NOISE_MUTATION_RANGE,
};
pub use overworld::{OverworldLayer, OVERWORLD_LAYERS};
use perlin::AngleGrid;

pub const NUM_FLOORS: usize = 9;
pub const BOSS_FLOOR: usize = 8;
/// Generation attempts per floor before falling back to the template floor.
pub const MAX_FLOOR_RETRIES: u32 = 16;

/// A tile coordinate on a floor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pos {
    pub r: i16,
    pub c: i16,
}

impl Pos {
    #[inline]
    pub const fn new(r: i16, c: i16) -> Self {
        Pos { r, c }
    }

    #[inline]
    pub fn offset(self, dr: i16, dc: i16) -> Self {
        Pos { r: self.r + dr, c: self.c + dc }
    }

    #[inline]
    pub fn manhattan(self, other: Pos) -> i32 {
        (self.r as i32 - other.r as i32).abs() + (self.c as i32 - other.c as i32).abs()
    }

    #[inline]
    pub fn chebyshev(self, other: Pos) -> i32 {
        (self.r as i32 - other.r as i32).abs().max((self.c as i32 - other.c as i32).abs())
    }
}

/// Generative description of a world; the unit level mutation acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelParams {
    pub tier: Tier,
    pub seed: u64,
    /// Floor size as (rows, cols); both must be multiples of 16.
    pub dims: (u32, u32),
    /// One entry per overworld noise layer, each holding one grid per octave.
    pub overworld_angles: Vec<Vec<AngleGrid>>,
    pub per_floor_seeds: [u64; NUM_FLOORS],
}

impl LevelParams {
    /// Default-sized level for `tier`: 64x64 overworld for Classic, 48x48
    /// floors for Extended.
    pub fn new(seed: u64, tier: Tier) -> Self {
        Self::with_dims(seed, tier, tier.default_dims()).expect("default dims are valid")
    }

    pub fn with_dims(seed: u64, tier: Tier, dims: (u32, u32)) -> crate::Result<Self> {
        if !dims.0.is_multiple_of(16) || !dims.1.is_multiple_of(16) || dims.0 < 32 || dims.1 < 32 {
            return Err(crate::Error::InvalidArgument(format!(
                "floor dims {}x{} must be multiples of 16 and at least 32",
                dims.0, dims.1
            )));
        }
        let root = RngStream::from_seed(seed);
        let mut angle_rng = root.split(streams::LEVEL_ANGLES);
        let overworld_angles = OVERWORLD_LAYERS
            .iter()
            .map(|layer| {
                layer
                    .octaves
                    .iter()
                    .map(|o| AngleGrid::random(o.lattice(dims).expect("checked dims"), &mut angle_rng))
                    .collect()
            })
            .collect();
        let mut floor_rng = root.split(streams::LEVEL_FLOORS);
        let mut per_floor_seeds = [0u64; NUM_FLOORS];
        for s in &mut per_floor_seeds {
            *s = floor_rng.next_u64();
        }
        Ok(LevelParams { tier, seed, dims, overworld_angles, per_floor_seeds })
    }

    /// Level derived from a stream rather than a user seed.
    pub fn from_stream(stream: &RngStream, tier: Tier) -> Self {
        let (seed, _) = stream.draw_u64();
        Self::new(seed, tier)
    }

    pub fn num_floors(&self) -> usize {
        self.tier.num_floors()
    }
}

/// One generated floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloorMap {
    pub rows: u32,
    pub cols: u32,
    pub blocks: Vec<Block>,
    pub items: Vec<Item>,
    /// Ambient light independent of day and torches.
    pub light_base: Vec<f32>,
    pub spawn: Pos,
    pub ladder_down: Option<Pos>,
    pub ladder_up: Option<Pos>,
    /// True when the floor came from the fallback template.
    pub fallback: bool,
}

impl FloorMap {
    pub fn filled(rows: u32, cols: u32, block: Block, light: f32) -> Self {
        let n = (rows * cols) as usize;
        FloorMap {
            rows,
            cols,
            blocks: vec![block; n],
            items: vec![Item::None; n],
            light_base: vec![light; n],
            spawn: Pos::default(),
            ladder_down: None,
            ladder_up: None,
            fallback: false,
        }
    }

    #[inline]
    pub fn in_bounds(&self, p: Pos) -> bool {
        p.r >= 0 && p.c >= 0 && (p.r as u32) < self.rows && (p.c as u32) < self.cols
    }

    #[inline]
    pub fn idx(&self, p: Pos) -> usize {
        p.r as usize * self.cols as usize + p.c as usize
    }

    #[inline]
    pub fn block(&self, p: Pos) -> Block {
        self.blocks[self.idx(p)]
    }

    #[inline]
    pub fn set_block(&mut self, p: Pos, b: Block) {
        let i = self.idx(p);
        self.blocks[i] = b;
    }

    pub fn item(&self, p: Pos) -> Item {
        self.items[self.idx(p)]
    }

    pub fn set_item(&mut self, p: Pos, it: Item) {
        let i = self.idx(p);
        self.items[i] = it;
    }

    pub fn histogram(&self) -> [u32; Block::COUNT] {
        let mut h = [0u32; Block::COUNT];
        for b in &self.blocks {
            h[*b as usize] += 1;
        }
        h
    }
}

/// Effects behind the six potion colours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotionEffect {
    Health,
    Mana,
    Energy,
    PoisonHealth,
    PoisonMana,
    FoodAndDrink,
}

impl PotionEffect {
    pub const ALL: [PotionEffect; 6] = [
        PotionEffect::Health,
        PotionEffect::Mana,
        PotionEffect::Energy,
        PotionEffect::PoisonHealth,
        PotionEffect::PoisonMana,
        PotionEffect::FoodAndDrink,
    ];
}

/// Contents of one chest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChestLoot {
    pub bow: bool,
    pub books: u8,
    pub arrows: u8,
    pub torches: u8,
    /// Potion colour index and count.
    pub potion: Option<(u8, u8)>,
    pub coal: u8,
    pub iron: u8,
    pub diamonds: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chest {
    pub floor: u8,
    pub pos: Pos,
    pub loot: ChestLoot,
}

/// A complete generated world.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub params: LevelParams,
    pub floors: Vec<FloorMap>,
    /// `potion_permutation[colour]` is the effect of that colour.
    pub potion_permutation: [PotionEffect; 6],
    pub chests: Vec<Chest>,
}

impl World {
    pub fn tier(&self) -> Tier {
        self.params.tier
    }

    pub fn chest_at(&self, floor: usize, pos: Pos) -> Option<&Chest> {
        self.chests.iter().find(|c| c.floor as usize == floor && c.pos == pos)
    }
}

/// Chests per dungeon-style floor, keyed by floor index.
pub const CHESTS_PER_FLOOR: [(usize, u32); 3] = [(1, 4), (3, 2), (4, 3)];

/// Legal generated blocks per floor; placeable blocks are excluded.
pub fn floor_palette(floor: usize) -> &'static [Block] {
    use Block::*;
    match floor {
        0 => &[Grass, Water, Stone, Tree, Path, Coal, Iron, Diamond, Sand, Lava],
        1 => &[Wall, Path, Chest, Fountain],
        2 => &[Stone, Path, Coal, Iron, Diamond, Sapphire, Ruby, Water, Stalagmite],
        3 => &[Wall, WallMoss, Path, Water, Chest, Fountain],
        4 => &[Wall, Path, Chest, EnchantmentTableFire, EnchantmentTableIce],
        5 => &[Stone, Path, Coal, Iron, Diamond, Sapphire, Ruby, Water, Stalagmite, Lava],
        6 => &[FireGrass, Lava, Stone, FireTree, Path, Coal, Iron, Ruby, Gravel],
        7 => &[IceGrass, Water, Stone, IceShrub, Path, Coal, Iron, Sapphire, Gravel],
        _ => &[Wall, Path, Grave, Grave2, Grave3, Necromancer],
    }
}

/// Checks the per-floor invariants: walkable spawn, ladder topology and
/// palette membership.
pub fn validate_floor(floor: &FloorMap, index: usize, tier: Tier) -> Result<(), String> {
    if !floor.in_bounds(floor.spawn) || !floor.block(floor.spawn).is_floor() {
        return Err(format!("floor {index}: spawn {:?} not walkable", floor.spawn));
    }
    let open_neighbours = [(0, 1), (0, -1), (1, 0), (-1, 0)]
        .iter()
        .filter(|&&(dr, dc)| {
            let p = floor.spawn.offset(dr, dc);
            floor.in_bounds(p) && floor.block(p).is_floor()
        })
        .count();
    if open_neighbours == 0 {
        return Err(format!("floor {index}: spawn is enclosed"));
    }
    let palette = floor_palette(index);
    if let Some(b) = floor.blocks.iter().find(|b| !palette.contains(b)) {
        return Err(format!("floor {index}: block {b:?} outside palette"));
    }
    let count = |it: Item| floor.items.iter().filter(|&&x| x == it).count();
    let downs = count(Item::LadderDown) + count(Item::LadderDownBlocked);
    let ups = count(Item::LadderUp);
    let expect_down = matches!(tier, Tier::Extended) && index != BOSS_FLOOR;
    let expect_up = index != 0;
    if downs != expect_down as usize || floor.ladder_down.is_some() != expect_down {
        return Err(format!("floor {index}: {downs} down ladders"));
    }
    if ups != expect_up as usize || floor.ladder_up.is_some() != expect_up {
        return Err(format!("floor {index}: {ups} up ladders"));
    }
    if index == 1 && tier == Tier::Extended && !floor.blocks.contains(&Block::Chest) {
        return Err("floor 1: no chests".into());
    }
    for p in floor.ladder_down.iter().chain(floor.ladder_up.iter()) {
        if !floor.block(*p).is_floor() {
            return Err(format!("floor {index}: ladder at {p:?} on {:?}", floor.block(*p)));
        }
    }
    Ok(())
}

fn generate_floor(params: &LevelParams, index: usize, rng: &mut RngStream) -> FloorMap {
    let dims = params.dims;
    match index {
        0 => overworld::generate_overworld(params, rng),
        1 | 3 | 4 => dungeon::generate_dungeon(dims, index, rng),
        2 | 5 => dungeon::generate_caves(dims, index, rng),
        6 | 7 => overworld::generate_realm(dims, index, rng),
        _ => dungeon::generate_graveyard(dims),
    }
}

/// Generates every floor of the level. Always succeeds: a floor that keeps
/// failing validation is replaced by the template floor.
pub fn generate_world(params: &LevelParams) -> World {
    let n = params.num_floors();
    let mut floors = Vec::with_capacity(n);
    for index in 0..n {
        let base = RngStream::from_seed(params.per_floor_seeds[index]);
        let mut floor = None;
        for attempt in 0..MAX_FLOOR_RETRIES {
            let mut rng = if attempt == 0 { base } else { base.split(streams::FLOOR_RETRY).split(attempt as u64) };
            let candidate = generate_floor(params, index, &mut rng);
            if validate_floor(&candidate, index, params.tier).is_ok() {
                floor = Some(candidate);
                break;
            }
        }
        floors.push(floor.unwrap_or_else(|| dungeon::template_floor(params.dims, index, params.tier)));
    }

    let mut loot_rng = RngStream::from_seed(params.seed).split(streams::WORLD_LOOT);
    let mut potion_permutation = PotionEffect::ALL;
    let mut chests = Vec::new();
    if params.tier == Tier::Extended {
        loot_rng.shuffle(&mut potion_permutation);
        chests = dungeon::assign_chest_loot(&floors, &mut loot_rng);
    }
    World { params: params.clone(), floors, potion_permutation, chests }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_params_same_world() {
        let p = LevelParams::new(11, Tier::Extended);
        assert_eq!(generate_world(&p), generate_world(&p));
    }

    #[test]
    fn floor_ladder_topology() {
        for seed in 0..20 {
            let w = generate_world(&LevelParams::new(seed, Tier::Extended));
            assert_eq!(w.floors.len(), NUM_FLOORS);
            assert!(w.floors[0].ladder_up.is_none());
            assert!(w.floors[BOSS_FLOOR].ladder_down.is_none());
            for (i, f) in w.floors.iter().enumerate() {
                validate_floor(f, i, Tier::Extended).unwrap();
            }
        }
    }

    #[test]
    fn classic_is_overworld_only() {
        let w = generate_world(&LevelParams::new(4, Tier::Classic));
        assert_eq!(w.floors.len(), 1);
        assert_eq!((w.floors[0].rows, w.floors[0].cols), (64, 64));
        assert!(w.floors[0].ladder_down.is_none());
        assert!(w.chests.is_empty());
    }

    #[test]
    fn potion_permutation_is_bijection() {
        for seed in 0..50 {
            let w = generate_world(&LevelParams::new(seed, Tier::Extended));
            for e in PotionEffect::ALL {
                assert_eq!(w.potion_permutation.iter().filter(|&&x| x == e).count(), 1);
            }
        }
    }

    #[test]
    fn first_dungeon_has_one_bow_and_a_book() {
        for seed in 0..50 {
            let w = generate_world(&LevelParams::new(seed, Tier::Extended));
            let floor1: Vec<_> = w.chests.iter().filter(|c| c.floor == 1).collect();
            assert_eq!(floor1.iter().filter(|c| c.loot.bow).count(), 1, "seed {seed}");
            assert!(floor1.iter().map(|c| c.loot.books as u32).sum::<u32>() >= 1);
            assert_eq!(w.chests.iter().filter(|c| c.loot.bow).count(), 1);
            for c in &w.chests {
                assert_eq!(w.floors[c.floor as usize].block(c.pos), Block::Chest);
            }
        }
    }

    #[test]
    fn overworld_contains_the_classic_palette() {
        use Block::*;
        let wanted = [Grass, Water, Tree, Stone, Coal, Iron, Diamond, Sand, Lava];
        let mut complete = 0;
        for seed in 0..100 {
            let w = generate_world(&LevelParams::new(seed, Tier::Classic));
            let h = w.floors[0].histogram();
            if wanted.iter().all(|b| h[*b as usize] > 0) {
                complete += 1;
            }
        }
        assert!(complete >= 95, "only {complete}/100 overworlds had every block");
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(LevelParams::with_dims(0, Tier::Extended, (40, 48)).is_err());
        assert!(LevelParams::with_dims(0, Tier::Extended, (32, 64)).is_ok());
    }

    #[test]
    fn custom_dims_generate_valid_worlds() {
        let p = LevelParams::with_dims(5, Tier::Extended, (32, 64)).unwrap();
        let w = generate_world(&p);
        for (i, f) in w.floors.iter().enumerate() {
            assert_eq!((f.rows, f.cols), (32, 64));
            validate_floor(f, i, Tier::Extended).unwrap();
        }
    }
}
