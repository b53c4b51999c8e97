//! Level mutation operators for curriculum methods.

use super::perlin::wrap_angle;
use super::{LevelParams, Pos, World};
use crate::engine::tables::{Block, Item};
use crate::rng::RngStream;

/// Half-width of the per-angle perturbation applied by [`mutate_noise`].
pub const NOISE_MUTATION_RANGE: f32 = 0.5;
/// Side of the centred window one swapped tile must come from.
pub const CENTRAL_WINDOW: i16 = 16;

/// Perturbs every overworld angle by an independent `U(-0.5, 0.5)` draw.
pub fn mutate_noise(params: &LevelParams, s: RngStream) -> LevelParams {
    mutate_noise_with_range(params, s, NOISE_MUTATION_RANGE)
}

pub fn mutate_noise_with_range(params: &LevelParams, s: RngStream, range: f32) -> LevelParams {
    let mut out = params.clone();
    let mut rng = s;
    for layer in &mut out.overworld_angles {
        for grid in layer {
            for a in &mut grid.angles {
                let delta = ((rng.next_f64() * 2.0 - 1.0) * range as f64) as f32;
                *a = wrap_angle(*a + delta);
            }
        }
    }
    out
}

/// Compatibility class used by the restricted swap; `None` means the block
/// never takes part in a restricted swap.
pub fn compatibility_class(b: Block) -> Option<u8> {
    match b {
        Block::Stone | Block::Coal | Block::Iron | Block::Diamond | Block::Sapphire | Block::Ruby => Some(0),
        Block::Grass | Block::Tree => Some(1),
        _ => None,
    }
}

/// Rows and columns `[start, end)` of the centred window.
pub fn central_window(rows: u32, cols: u32) -> (std::ops::Range<i16>, std::ops::Range<i16>) {
    let half = CENTRAL_WINDOW / 2;
    let (cr, cc) = ((rows / 2) as i16, (cols / 2) as i16);
    ((cr - half).max(0)..(cr + half).min(rows as i16), (cc - half).max(0)..(cc + half).min(cols as i16))
}

/// The two tiles exchanged by a swap; the first lies in the central window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapRecord {
    pub first: Pos,
    pub second: Pos,
}

/// Spawn and ladder tiles are never moved.
fn locked(world: &World, p: Pos) -> bool {
    let f = &world.floors[0];
    p == f.spawn || f.item(p) != Item::None
}

fn swap_tiles(world: &mut World, rec: SwapRecord) {
    let f = &mut world.floors[0];
    let (a, b) = (f.idx(rec.first), f.idx(rec.second));
    f.blocks.swap(a, b);
}

/// Swaps one tile from the central 16x16 window with any other overworld
/// tile. Returns the mutated world and the exchanged pair.
pub fn mutate_swap(world: &World, s: RngStream) -> (World, Option<SwapRecord>) {
    let mut out = world.clone();
    let mut rng = s;
    let f = &world.floors[0];
    let (wr, wc) = central_window(f.rows, f.cols);
    let firsts: Vec<Pos> =
        wr.clone().flat_map(|r| wc.clone().map(move |c| Pos::new(r, c))).filter(|&p| !locked(world, p)).collect();
    if firsts.is_empty() {
        return (out, None);
    }
    let first = firsts[rng.below(firsts.len() as u32) as usize];
    let total = f.rows * f.cols;
    for _ in 0..64 {
        let i = rng.below(total);
        let second = Pos::new((i / f.cols) as i16, (i % f.cols) as i16);
        if second != first && !locked(world, second) {
            let rec = SwapRecord { first, second };
            swap_tiles(&mut out, rec);
            return (out, Some(rec));
        }
    }
    (out, None)
}

/// Restricted swap: both tiles share a compatibility class and differ.
/// Returns the world unchanged when the window offers no legal pair.
pub fn mutate_rswap(world: &World, s: RngStream) -> (World, Option<SwapRecord>) {
    let mut rng = s;
    let f = &world.floors[0];
    let (wr, wc) = central_window(f.rows, f.cols);
    let firsts: Vec<Pos> = wr
        .clone()
        .flat_map(|r| wc.clone().map(move |c| Pos::new(r, c)))
        .filter(|&p| !locked(world, p) && compatibility_class(f.block(p)).is_some())
        .collect();
    if firsts.is_empty() {
        return (world.clone(), None);
    }
    let first = firsts[rng.below(firsts.len() as u32) as usize];
    let block = f.block(first);
    let class = compatibility_class(block);
    let partners: Vec<Pos> = (0..f.rows as i16)
        .flat_map(|r| (0..f.cols as i16).map(move |c| Pos::new(r, c)))
        .filter(|&p| p != first && !locked(world, p) && f.block(p) != block && compatibility_class(f.block(p)) == class)
        .collect();
    if partners.is_empty() {
        return (world.clone(), None);
    }
    let second = partners[rng.below(partners.len() as u32) as usize];
    let rec = SwapRecord { first, second };
    let mut out = world.clone();
    swap_tiles(&mut out, rec);
    (out, Some(rec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Tier;
    use crate::rng::streams;
    use crate::worldgen::{generate_world, LevelParams};
    use std::f32::consts::TAU;

    fn circular_delta(a: f32, b: f32) -> f32 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn zero_range_leaves_params_unchanged() {
        let p = LevelParams::new(3, Tier::Classic);
        let m = mutate_noise_with_range(&p, RngStream::from_seed(1), 0.0);
        assert_eq!(p, m);
    }

    #[test]
    fn noise_perturbation_is_bounded() {
        let p = LevelParams::new(8, Tier::Classic);
        let root = RngStream::from_seed(99).split(streams::MUTATION);
        for k in 0..1000 {
            let m = mutate_noise(&p, root.split(k));
            for (la, lb) in p.overworld_angles.iter().zip(&m.overworld_angles) {
                for (ga, gb) in la.iter().zip(lb) {
                    for (a, b) in ga.angles.iter().zip(&gb.angles) {
                        assert!((0.0..TAU).contains(b));
                        assert!(circular_delta(*a, *b) <= NOISE_MUTATION_RANGE + 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn different_streams_give_different_levels() {
        let p = LevelParams::new(8, Tier::Classic);
        let a = mutate_noise(&p, RngStream::from_seed(1));
        let b = mutate_noise(&p, RngStream::from_seed(2));
        assert_ne!(a, b);
        assert_ne!(a, p);
    }

    #[test]
    fn rswap_on_all_water_is_identity() {
        let mut w = generate_world(&LevelParams::new(2, Tier::Classic));
        for b in &mut w.floors[0].blocks {
            *b = Block::Water;
        }
        let (m, rec) = mutate_rswap(&w, RngStream::from_seed(5));
        assert!(rec.is_none());
        assert_eq!(m, w);
    }

    #[test]
    fn swap_of_equal_blocks_is_identity() {
        let mut w = generate_world(&LevelParams::new(2, Tier::Classic));
        for b in &mut w.floors[0].blocks {
            *b = Block::Grass;
        }
        let (m, rec) = mutate_swap(&w, RngStream::from_seed(5));
        assert!(rec.is_some());
        assert_eq!(m, w);
    }

    #[test]
    fn swap_changes_at_most_two_tiles() {
        let w = generate_world(&LevelParams::new(12, Tier::Extended));
        let (m, rec) = mutate_swap(&w, RngStream::from_seed(7));
        let rec = rec.unwrap();
        let diff: Vec<usize> =
            (0..w.floors[0].blocks.len()).filter(|&i| w.floors[0].blocks[i] != m.floors[0].blocks[i]).collect();
        assert!(diff.len() == 2 || diff.is_empty());
        for i in diff {
            assert!(i == w.floors[0].idx(rec.first) || i == w.floors[0].idx(rec.second));
        }
        for f in 1..w.floors.len() {
            assert_eq!(w.floors[f], m.floors[f]);
        }
    }
}
