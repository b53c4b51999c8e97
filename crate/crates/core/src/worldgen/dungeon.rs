//! Room-and-corridor dungeons (floors 1, 3, 4), Perlin caves (2, 5), the
//! graveyard arena (8) and the fallback template floor.

use super::overworld::random_floor_tile;
use super::perlin::{perlin, AngleGrid, Octave};
use super::{Chest, ChestLoot, FloorMap, Pos, BOSS_FLOOR, CHESTS_PER_FLOOR};
use crate::engine::tables::{Block, Item};
use crate::engine::Tier;
use crate::rng::RngStream;

pub const MIN_ROOMS: u32 = 3;
pub const MAX_ROOMS: u32 = 8;
pub const MIN_ROOM_SIZE: i16 = 5;
pub const MAX_ROOM_SIZE: i16 = 9;

#[derive(Clone, Copy, Debug)]
struct Room {
    r: i16,
    c: i16,
    h: i16,
    w: i16,
}

impl Room {
    fn center(&self) -> Pos {
        Pos::new(self.r + self.h / 2, self.c + self.w / 2)
    }

    fn overlaps(&self, other: &Room) -> bool {
        // One tile of wall is kept between rooms.
        self.r - 1 <= other.r + other.h
            && other.r - 1 <= self.r + self.h
            && self.c - 1 <= other.c + other.w
            && other.c - 1 <= self.c + self.w
    }

    fn corners(&self) -> [Pos; 4] {
        [
            Pos::new(self.r, self.c),
            Pos::new(self.r, self.c + self.w - 1),
            Pos::new(self.r + self.h - 1, self.c),
            Pos::new(self.r + self.h - 1, self.c + self.w - 1),
        ]
    }
}

fn carve_l(floor: &mut FloorMap, a: Pos, b: Pos, horizontal_first: bool, block: Block) {
    let mut p = a;
    let step = |from: i16, to: i16| (to - from).signum();
    let walk = |p: &mut Pos, target_r: Option<i16>, target_c: Option<i16>, floor: &mut FloorMap| {
        if let Some(tc) = target_c {
            while p.c != tc {
                floor.set_block(*p, block);
                p.c += step(p.c, tc);
            }
        }
        if let Some(tr) = target_r {
            while p.r != tr {
                floor.set_block(*p, block);
                p.r += step(p.r, tr);
            }
        }
        floor.set_block(*p, block);
    };
    if horizontal_first {
        walk(&mut p, None, Some(b.c), floor);
        walk(&mut p, Some(b.r), None, floor);
    } else {
        walk(&mut p, Some(b.r), None, floor);
        walk(&mut p, None, Some(b.c), floor);
    }
}

fn chest_count(index: usize) -> u32 {
    CHESTS_PER_FLOOR.iter().find(|(f, _)| *f == index).map_or(0, |(_, n)| *n)
}

pub(super) fn generate_dungeon(dims: (u32, u32), index: usize, rng: &mut RngStream) -> FloorMap {
    let (h, w) = (dims.0 as i16, dims.1 as i16);
    let mut floor = FloorMap::filled(dims.0, dims.1, Block::Wall, 1.0);
    let target = rng.range_inclusive(MIN_ROOMS as i32, MAX_ROOMS as i32) as usize;
    let mut rooms: Vec<Room> = Vec::with_capacity(target);
    for _ in 0..200 {
        if rooms.len() == target {
            break;
        }
        let rh = rng.range_inclusive(MIN_ROOM_SIZE as i32, MAX_ROOM_SIZE as i32) as i16;
        let rw = rng.range_inclusive(MIN_ROOM_SIZE as i32, MAX_ROOM_SIZE as i32) as i16;
        let r = rng.range_inclusive(1, (h - rh - 1) as i32) as i16;
        let c = rng.range_inclusive(1, (w - rw - 1) as i32) as i16;
        let room = Room { r, c, h: rh, w: rw };
        if rooms.iter().all(|o| !room.overlaps(o)) {
            rooms.push(room);
        }
    }
    if rooms.len() < MIN_ROOMS as usize {
        // Leaves the spawn on a wall so validation rejects the attempt.
        return floor;
    }
    for room in &rooms {
        for r in room.r..room.r + room.h {
            for c in room.c..room.c + room.w {
                floor.set_block(Pos::new(r, c), Block::Path);
            }
        }
    }
    for pair in rooms.windows(2) {
        let hf = rng.chance(0.5);
        carve_l(&mut floor, pair[0].center(), pair[1].center(), hf, Block::Path);
    }

    if index == 3 {
        // Sewers: mossy walls and a water channel through larger rooms.
        for i in 0..floor.blocks.len() {
            if floor.blocks[i] == Block::Wall && rng.chance(0.3) {
                floor.blocks[i] = Block::WallMoss;
            }
        }
        for room in rooms.iter().skip(1) {
            if room.h >= 7 && room.w >= 7 {
                let mid = room.r + room.h / 2 - 1;
                for c in room.c + 2..room.c + room.w - 2 {
                    if Pos::new(mid, c) != room.center() {
                        floor.set_block(Pos::new(mid, c), Block::Water);
                    }
                }
            }
        }
    }

    let up = rooms[0].center();
    let down = rooms[rooms.len() - 1].center();
    floor.set_item(up, Item::LadderUp);
    floor.ladder_up = Some(up);
    floor.spawn = up;
    floor.set_item(down, Item::LadderDownBlocked);
    floor.ladder_down = Some(down);

    let mut corners: Vec<Pos> = rooms.iter().flat_map(|r| r.corners()).collect();
    rng.shuffle(&mut corners);
    let mut features = vec![Block::Chest; chest_count(index) as usize];
    match index {
        1 | 3 => features.push(Block::Fountain),
        4 => features.extend([Block::EnchantmentTableFire, Block::EnchantmentTableIce]),
        _ => {}
    }
    let mut corners = corners.into_iter();
    for feature in features {
        let Some(p) = corners.by_ref().find(|&p| floor.block(p) == Block::Path && floor.item(p) == Item::None) else {
            break;
        };
        floor.set_block(p, feature);
    }
    floor
}

pub(super) fn generate_caves(dims: (u32, u32), index: usize, rng: &mut RngStream) -> FloorMap {
    let cave_oct = [Octave::square(8, 1.0), Octave::square(4, 0.4)];
    let water_oct = [Octave::square(16, 1.0)];
    let grids = |octs: &[Octave], rng: &mut RngStream| -> Vec<AngleGrid> {
        octs.iter().map(|o| AngleGrid::random(o.lattice(dims).expect("dims"), rng)).collect()
    };
    let cave_angles = grids(&cave_oct, rng);
    let water_angles = grids(&water_oct, rng);
    let lava_angles = grids(&water_oct, rng);
    let cave = perlin(dims, &cave_angles, &cave_oct).expect("dims");
    let water = perlin(dims, &water_angles, &water_oct).expect("dims");
    let lava = perlin(dims, &lava_angles, &water_oct).expect("dims");

    let deep = index == 5;
    let mut floor = FloorMap::filled(dims.0, dims.1, Block::Stone, 0.0);
    let (h, w) = (dims.0 as i16, dims.1 as i16);
    for r in 0..h {
        for c in 0..w {
            let p = Pos::new(r, c);
            let i = floor.idx(p);
            let border = r == 0 || c == 0 || r == h - 1 || c == w - 1;
            let b = if border {
                Block::Stone
            } else if cave.values[i] > 0.05 {
                if water.values[i] > 0.4 {
                    Block::Water
                } else if rng.chance(0.03) {
                    Block::Stalagmite
                } else {
                    Block::Path
                }
            } else if deep && lava.values[i] > 0.5 {
                Block::Lava
            } else {
                let u = rng.next_f32();
                let odds: [(f32, Block); 5] = if deep {
                    [
                        (0.04, Block::Coal),
                        (0.04, Block::Iron),
                        (0.012, Block::Diamond),
                        (0.01, Block::Sapphire),
                        (0.01, Block::Ruby),
                    ]
                } else {
                    [
                        (0.05, Block::Coal),
                        (0.04, Block::Iron),
                        (0.006, Block::Diamond),
                        (0.008, Block::Sapphire),
                        (0.006, Block::Ruby),
                    ]
                };
                let mut acc = 0.0;
                let mut ore = Block::Stone;
                for (p, b) in odds {
                    acc += p;
                    if u < acc {
                        ore = b;
                        break;
                    }
                }
                ore
            };
            floor.blocks[i] = b;
        }
    }

    let up = match random_floor_tile(&floor, Pos::new(0, 0), 0, rng) {
        Some(p) => p,
        None => return floor,
    };
    let down = match random_floor_tile(&floor, up, (h.min(w) / 3) as i32, rng) {
        Some(p) => p,
        None => return floor,
    };
    let hf = rng.chance(0.5);
    carve_l(&mut floor, up, down, hf, Block::Path);
    floor.set_item(up, Item::LadderUp);
    floor.ladder_up = Some(up);
    floor.spawn = up;
    floor.set_item(down, Item::LadderDownBlocked);
    floor.ladder_down = Some(down);
    floor
}

/// Fixed arena: graves in a lattice, the necromancer at the top and the
/// up ladder at the bottom.
pub(super) fn generate_graveyard(dims: (u32, u32)) -> FloorMap {
    let (h, w) = (dims.0 as i16, dims.1 as i16);
    let mut floor = FloorMap::filled(dims.0, dims.1, Block::Path, 0.0);
    for r in 0..h {
        for c in 0..w {
            if r == 0 || c == 0 || r == h - 1 || c == w - 1 {
                floor.set_block(Pos::new(r, c), Block::Wall);
            }
        }
    }
    let mid = w / 2;
    let graves = [Block::Grave, Block::Grave2, Block::Grave3];
    for r in (6..h - 6).step_by(4) {
        for c in (4..w - 3).step_by(5) {
            if (c - mid).abs() <= 1 {
                continue;
            }
            floor.set_block(Pos::new(r, c), graves[((r + c) % 3) as usize]);
        }
    }
    floor.set_block(necromancer_pos(dims), Block::Necromancer);
    let up = Pos::new(h - 4, mid);
    floor.set_item(up, Item::LadderUp);
    floor.ladder_up = Some(up);
    floor.spawn = up;
    floor
}

pub fn necromancer_pos(dims: (u32, u32)) -> Pos {
    Pos::new(3, (dims.1 / 2) as i16)
}

/// Plain always-valid floor used when generation keeps failing.
pub(super) fn template_floor(dims: (u32, u32), index: usize, tier: Tier) -> FloorMap {
    if index == BOSS_FLOOR {
        return generate_graveyard(dims);
    }
    let (border, inner, light) = match index {
        0 => (Block::Stone, Block::Grass, 1.0),
        2 | 5 => (Block::Stone, Block::Path, 0.0),
        6 => (Block::Stone, Block::FireGrass, 1.0),
        7 => (Block::Stone, Block::IceGrass, 0.0),
        _ => (Block::Wall, Block::Path, 1.0),
    };
    let (h, w) = (dims.0 as i16, dims.1 as i16);
    let mut floor = FloorMap::filled(dims.0, dims.1, inner, light);
    for r in 0..h {
        for c in 0..w {
            if r == 0 || c == 0 || r == h - 1 || c == w - 1 {
                floor.set_block(Pos::new(r, c), border);
            }
        }
    }
    let mid = w / 2;
    floor.spawn = Pos::new(h / 2, mid);
    if index != 0 {
        let up = Pos::new(h - 3, mid);
        floor.set_item(up, Item::LadderUp);
        floor.ladder_up = Some(up);
        floor.spawn = up;
    }
    if tier == Tier::Extended {
        let down = Pos::new(2, mid);
        floor.set_item(down, if index == 0 { Item::LadderDown } else { Item::LadderDownBlocked });
        floor.ladder_down = Some(down);
    }
    for k in 0..chest_count(index) as i16 {
        floor.set_block(Pos::new(1, 1 + 2 * k), Block::Chest);
    }
    floor.fallback = true;
    floor
}

fn roll_loot(rng: &mut RngStream) -> ChestLoot {
    let mut loot = ChestLoot::default();
    let roll = rng.below(100);
    match roll {
        0..=29 => loot.arrows = rng.range_inclusive(2, 6) as u8,
        30..=54 => loot.torches = rng.range_inclusive(2, 5) as u8,
        55..=79 => loot.potion = Some((rng.below(6) as u8, 1)),
        80..=84 => loot.books = 1,
        85..=94 => {
            loot.coal = rng.range_inclusive(2, 4) as u8;
            loot.iron = rng.range_inclusive(1, 2) as u8;
        }
        _ => loot.diamonds = 1,
    }
    loot
}

/// Assigns loot to every chest. The first dungeon floor gets exactly one
/// bow and at least one book; all other chests roll the weighted table.
pub(super) fn assign_chest_loot(floors: &[FloorMap], rng: &mut RngStream) -> Vec<Chest> {
    let mut chests = Vec::new();
    for (fi, floor) in floors.iter().enumerate() {
        let positions: Vec<Pos> = (0..floor.rows as i16)
            .flat_map(|r| (0..floor.cols as i16).map(move |c| Pos::new(r, c)))
            .filter(|&p| floor.block(p) == Block::Chest)
            .collect();
        if positions.is_empty() {
            continue;
        }
        let (bow_idx, book_idx) = if fi == 1 {
            let n = positions.len() as u32;
            let bow = rng.below(n) as usize;
            let book = if n > 1 { (bow + 1 + rng.below(n - 1) as usize) % n as usize } else { bow };
            (Some(bow), Some(book))
        } else {
            (None, None)
        };
        for (k, pos) in positions.into_iter().enumerate() {
            let mut loot = ChestLoot::default();
            if bow_idx == Some(k) {
                loot.bow = true;
                loot.arrows = 3;
            }
            if book_idx == Some(k) {
                loot.books = 1;
            }
            if bow_idx != Some(k) && book_idx != Some(k) {
                loot = roll_loot(rng);
            }
            chests.push(Chest { floor: fi as u8, pos, loot });
        }
    }
    chests
}
