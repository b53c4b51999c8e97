//! Overworld terrain from thresholded Perlin layers, and the two realm
//! floors that reuse the same pipeline with a substituted palette.

use super::perlin::{perlin, AngleGrid, NoiseGrid, Octave};
use super::{FloorMap, LevelParams, Pos};
use crate::engine::tables::{Block, Item};
use crate::engine::Tier;
use crate::rng::{streams, RngStream};

/// A named noise layer and its octave structure.
#[derive(Debug)]
pub struct OverworldLayer {
    pub name: &'static str,
    pub octaves: &'static [Octave],
}

const fn layer(name: &'static str, octaves: &'static [Octave]) -> OverworldLayer {
    OverworldLayer { name, octaves }
}

const fn oct(pr: u32, pc: u32, amplitude: f64) -> Octave {
    Octave { period_rows: pr, period_cols: pc, amplitude }
}

pub const START: usize = 0;
pub const WATER: usize = 1;
pub const MOUNTAIN: usize = 2;
pub const CAVES: usize = 3;
pub const TUNNELS_H: usize = 4;
pub const TUNNELS_V: usize = 5;
pub const COAL: usize = 6;
pub const IRON: usize = 7;
pub const LAVA: usize = 8;
pub const SAND: usize = 9;
pub const TREES: usize = 10;

/// Noise layers in the order they are stored in `LevelParams`.
pub static OVERWORLD_LAYERS: [OverworldLayer; 11] = [
    layer("start", &[oct(4, 4, 1.0)]),
    layer("water", &[oct(16, 16, 1.0), oct(4, 4, 0.15)]),
    layer("mountain", &[oct(16, 16, 1.0), oct(4, 4, 0.3)]),
    layer("caves", &[oct(8, 8, 1.0)]),
    layer("tunnels_h", &[oct(2, 16, 1.0)]),
    layer("tunnels_v", &[oct(16, 2, 1.0)]),
    layer("coal", &[oct(8, 8, 1.0)]),
    layer("iron", &[oct(8, 8, 1.0)]),
    layer("lava", &[oct(4, 4, 1.0)]),
    layer("sand", &[oct(8, 8, 1.0)]),
    layer("trees", &[oct(8, 8, 1.0)]),
];

fn layer_noise(dims: (u32, u32), angles: &[Vec<AngleGrid>], which: usize) -> NoiseGrid {
    perlin(dims, &angles[which], OVERWORLD_LAYERS[which].octaves).expect("validated layer shape")
}

/// Terrain classification shared by the overworld and the realms.
fn terrain(dims: (u32, u32), angles: &[Vec<AngleGrid>], spawn: Pos, tiles: &RngStream) -> Vec<Block> {
    let (h, w) = dims;
    let start_n = layer_noise(dims, angles, START);
    let water_n = layer_noise(dims, angles, WATER);
    let mountain_n = layer_noise(dims, angles, MOUNTAIN);
    let caves = layer_noise(dims, angles, CAVES);
    let tun_h = layer_noise(dims, angles, TUNNELS_H);
    let tun_v = layer_noise(dims, angles, TUNNELS_V);
    let coal = layer_noise(dims, angles, COAL);
    let iron = layer_noise(dims, angles, IRON);
    let lava = layer_noise(dims, angles, LAVA);
    let sand = layer_noise(dims, angles, SAND);
    let trees = layer_noise(dims, angles, TREES);

    let mut blocks = vec![Block::Grass; (h * w) as usize];
    for r in 0..h {
        for c in 0..w {
            let i = (r * w + c) as usize;
            let dr = r as f64 - spawn.r as f64;
            let dc = c as f64 - spawn.c as f64;
            let mut start = 4.0 - (dr * dr + dc * dc).sqrt() + 2.0 * start_n.values[i];
            start = 1.0 / (1.0 + (-start).exp());
            let water = water_n.values[i] + 0.1 - 2.0 * start;
            let mountain = mountain_n.values[i] - 4.0 * start;
            let u = || tiles.unit_at(i as u64);
            blocks[i] = if start > 0.5 {
                Block::Grass
            } else if mountain > 0.15 {
                if (caves.values[i] > 0.15 && mountain > 0.3) || tun_h.values[i] > 0.4 || tun_v.values[i] > 0.4 {
                    Block::Path
                } else if coal.values[i] > 0.0 && u() > 0.85 {
                    Block::Coal
                } else if iron.values[i] > 0.25 && u() > 0.75 {
                    Block::Iron
                } else if mountain > 0.18 && u() > 0.994 {
                    Block::Diamond
                } else if mountain > 0.3 && lava.values[i] > 0.35 {
                    Block::Lava
                } else {
                    Block::Stone
                }
            } else if water > 0.25 && water <= 0.35 && sand.values[i] > -0.2 {
                Block::Sand
            } else if water > 0.3 {
                Block::Water
            } else if trees.values[i] > 0.0 && u() > 0.8 {
                Block::Tree
            } else {
                Block::Grass
            };
        }
    }
    blocks
}

fn center(dims: (u32, u32)) -> Pos {
    Pos::new((dims.0 / 2) as i16, (dims.1 / 2) as i16)
}

/// Picks a random floor tile at least `min_dist` (Manhattan) from `from`.
pub(super) fn random_floor_tile(floor: &FloorMap, from: Pos, min_dist: i32, rng: &mut RngStream) -> Option<Pos> {
    let candidates: Vec<Pos> = (0..floor.rows as i16)
        .flat_map(|r| (0..floor.cols as i16).map(move |c| Pos::new(r, c)))
        .filter(|&p| floor.block(p).is_floor() && floor.item(p) == Item::None && p.manhattan(from) >= min_dist)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    Some(candidates[rng.below(candidates.len() as u32) as usize])
}

/// Guarantees at least one diamond by converting the most remote stone tile.
fn ensure_diamond(floor: &mut FloorMap, spawn: Pos) {
    if floor.blocks.contains(&Block::Diamond) {
        return;
    }
    let mut best: Option<(i32, Pos)> = None;
    for r in 0..floor.rows as i16 {
        for c in 0..floor.cols as i16 {
            let p = Pos::new(r, c);
            if floor.block(p) == Block::Stone {
                let d = p.manhattan(spawn);
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, p));
                }
            }
        }
    }
    if let Some((_, p)) = best {
        floor.set_block(p, Block::Diamond);
    }
}

pub(super) fn generate_overworld(params: &LevelParams, rng: &mut RngStream) -> FloorMap {
    let dims = params.dims;
    let spawn = center(dims);
    let tiles = rng.split(streams::OVERWORLD_TILES);
    let mut floor = FloorMap::filled(dims.0, dims.1, Block::Grass, 1.0);
    floor.blocks = terrain(dims, &params.overworld_angles, spawn, &tiles);
    floor.spawn = spawn;
    ensure_diamond(&mut floor, spawn);
    if params.tier == Tier::Extended {
        if let Some(p) = random_floor_tile(&floor, spawn, 10, rng) {
            floor.set_item(p, Item::LadderDown);
            floor.ladder_down = Some(p);
        }
    }
    floor
}

/// Fire (6) and ice (7) realms.
pub(super) fn generate_realm(dims: (u32, u32), index: usize, rng: &mut RngStream) -> FloorMap {
    let angles: Vec<Vec<AngleGrid>> = OVERWORLD_LAYERS
        .iter()
        .map(|l| l.octaves.iter().map(|o| AngleGrid::random(o.lattice(dims).expect("dims"), rng)).collect())
        .collect();
    let spawn = center(dims);
    let tiles = rng.split(streams::OVERWORLD_TILES);
    let light = if index == 6 { 1.0 } else { 0.0 };
    let mut floor = FloorMap::filled(dims.0, dims.1, Block::Grass, light);
    let fire = index == 6;
    floor.blocks = terrain(dims, &angles, spawn, &tiles)
        .into_iter()
        .map(|b| match (b, fire) {
            (Block::Grass, true) => Block::FireGrass,
            (Block::Grass, false) => Block::IceGrass,
            (Block::Tree, true) => Block::FireTree,
            (Block::Tree, false) => Block::IceShrub,
            (Block::Water, true) => Block::Lava,
            (Block::Lava, false) => Block::Water,
            (Block::Sand, _) => Block::Gravel,
            (Block::Diamond, true) => Block::Ruby,
            (Block::Diamond, false) => Block::Sapphire,
            (other, _) => other,
        })
        .collect();
    floor.spawn = spawn;
    floor.set_item(spawn, Item::LadderUp);
    floor.ladder_up = Some(spawn);
    if let Some(p) = random_floor_tile(&floor, spawn, 10, rng) {
        floor.set_item(p, Item::LadderDownBlocked);
        floor.ladder_down = Some(p);
    }
    floor
}
