//! RGB tile renderer with a flat-colour palette.

use serde::{Deserialize, Serialize};

use super::symbolic::{creature_at, raw_fields, view_positions, visible_light, Layout, Scaling};
use crate::engine::tables::{Block, CreatureKind, Item};
use crate::engine::{Direction, GameState, Tier, LIGHT_THRESHOLD};
use crate::error::{Error, Result};

pub const TILE_SIZES: [u8; 3] = [7, 10, 16];

type Rgb = [u8; 3];

const BLOCK_COLOURS: [Rgb; Block::COUNT] = [
    [0, 0, 0],       // invalid
    [20, 20, 28],    // out of bounds
    [86, 160, 64],   // grass
    [46, 98, 196],   // water
    [128, 128, 128], // stone
    [30, 100, 40],   // tree
    [150, 105, 55],  // wood
    [190, 170, 140], // path
    [52, 52, 52],    // coal
    [196, 150, 120], // iron
    [180, 240, 250], // diamond
    [140, 90, 40],   // crafting table
    [96, 60, 60],    // furnace
    [230, 215, 150], // sand
    [240, 90, 20],   // lava
    [120, 200, 90],  // plant
    [200, 220, 60],  // ripe plant
    [80, 70, 60],    // wall
    [8, 8, 8],       // darkness
    [70, 96, 60],    // mossy wall
    [110, 100, 90],  // stalagmite
    [40, 60, 220],   // sapphire
    [200, 20, 50],   // ruby
    [170, 120, 30],  // chest
    [100, 180, 230], // fountain
    [200, 110, 60],  // fire grass
    [200, 230, 240], // ice grass
    [150, 140, 130], // gravel
    [170, 50, 20],   // fire tree
    [150, 200, 210], // ice shrub
    [230, 60, 0],    // fire enchantment table
    [60, 140, 255],  // ice enchantment table
    [90, 20, 110],   // necromancer
    [105, 105, 115], // grave
    [95, 95, 105],   // grave 2
    [115, 110, 100], // grave 3
    [200, 60, 230],  // vulnerable necromancer
];

fn item_colour(it: Item) -> Option<Rgb> {
    match it {
        Item::None => None,
        Item::Torch => Some([255, 200, 40]),
        Item::LadderDown => Some([120, 70, 20]),
        Item::LadderUp => Some([200, 150, 90]),
        Item::LadderDownBlocked => Some([60, 30, 10]),
    }
}

fn creature_colour(k: CreatureKind) -> Rgb {
    // Spread kinds around the hue circle at fixed saturation.
    let h = k.id() as f32 * 360.0 / CreatureKind::COUNT as f32;
    let (s, v) = if k.id() >= CreatureKind::Arrow.id() { (0.4, 0.95) } else { (0.85, 0.75) };
    hsv(h, s, v)
}

fn hsv(h: f32, s: f32, v: f32) -> Rgb {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [((r + m) * 255.0) as u8, ((g + m) * 255.0) as u8, ((b + m) * 255.0) as u8]
}

pub fn block_colour(b: Block) -> Rgb {
    BLOCK_COLOURS[b.id() as usize]
}

/// Height of the status strip in tiles.
pub fn strip_rows(tier: Tier) -> usize {
    match tier {
        Tier::Classic => 2,
        Tier::Extended => 4,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB bytes.
    pub rgb: Vec<u8>,
}

impl Frame {
    fn new(width: usize, height: usize) -> Self {
        Frame { width, height, rgb: vec![0; width * height * 3] }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    fn fill(&mut self, x0: usize, y0: usize, w: usize, h: usize, c: Rgb) {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                let i = (y * self.width + x) * 3;
                self.rgb[i..i + 3].copy_from_slice(&c);
            }
        }
    }
}

fn shade(c: Rgb, light: f32) -> Rgb {
    let f = 0.4 + 0.6 * light.clamp(0.0, 1.0);
    c.map(|v| (v as f32 * f).round() as u8)
}

/// Renders the visible window at `tile_px` pixels per tile, with a status
/// strip below the map.
pub fn render_tiles(state: &GameState, tile_px: u8) -> Result<Frame> {
    if !TILE_SIZES.contains(&tile_px) {
        return Err(Error::InvalidArgument(format!("tile size {tile_px} not in {TILE_SIZES:?}")));
    }
    let px = tile_px as usize;
    let (rows, cols) = state.tier.view();
    let mut frame = Frame::new(cols * px, (rows + strip_rows(state.tier)) * px);
    let inset = (px / 5).max(1);

    for (t, p) in view_positions(state).enumerate() {
        let (x0, y0) = ((t % cols) * px, (t / cols) * px);
        let light = visible_light(state, p);
        if light < LIGHT_THRESHOLD {
            continue;
        }
        frame.fill(x0, y0, px, px, shade(block_colour(state.block(p)), light));
        if let Some(c) = item_colour(state.item(p)) {
            let m = px / 3;
            frame.fill(x0 + m, y0 + m, px - 2 * m, px - 2 * m, shade(c, light));
        }
        if let Some(k) = creature_at(state, p) {
            frame.fill(x0 + inset, y0 + inset, px - 2 * inset, px - 2 * inset, shade(creature_colour(k), light));
        }
        if p == state.player.pos {
            draw_player(&mut frame, x0, y0, px, inset, state.player.facing, state.player.sleeping);
        }
    }
    // The player is drawn even when their own tile is unlit.
    let centre = (rows / 2) * cols + cols / 2;
    let (x0, y0) = ((centre % cols) * px, (centre / cols) * px);
    if visible_light(state, state.player.pos) < LIGHT_THRESHOLD {
        draw_player(&mut frame, x0, y0, px, inset, state.player.facing, state.player.sleeping);
    }
    draw_strip(state, &mut frame, rows * px, px, cols);
    Ok(frame)
}

fn draw_player(frame: &mut Frame, x0: usize, y0: usize, px: usize, inset: usize, facing: Direction, sleeping: bool) {
    let body = if sleeping { [120, 120, 200] } else { [245, 245, 245] };
    let w = px - 2 * inset;
    frame.fill(x0 + inset, y0 + inset, w, w, body);
    let mark = [20, 20, 20];
    let e = inset.max(1);
    match facing {
        Direction::Left => frame.fill(x0 + inset, y0 + inset, e, w, mark),
        Direction::Right => frame.fill(x0 + px - inset - e, y0 + inset, e, w, mark),
        Direction::Up => frame.fill(x0 + inset, y0 + inset, w, e, mark),
        Direction::Down => frame.fill(x0 + inset, y0 + px - inset - e, w, e, mark),
    }
}

/// One cell per status field: a dim background with a bar whose height is
/// the field's scaled value.
fn draw_strip(state: &GameState, frame: &mut Frame, top: usize, px: usize, cols: usize) {
    let layout = Layout::get(state.tier);
    let cells = strip_rows(state.tier) * cols;
    let shown = raw_fields(state)
        .into_iter()
        .zip(&layout.manifest.fields)
        .filter(|(_, spec)| spec.scaling != Scaling::OneHot && spec.scaling != Scaling::Reserved)
        .take(cells);
    for (i, ((_, raw), spec)) in shown.enumerate() {
        let (x0, y0) = ((i % cols) * px, top + (i / cols) * px);
        let hue = (i * 360 / cells) as f32;
        frame.fill(x0, y0, px, px, hsv(hue, 0.3, 0.25));
        let v = match spec.scaling {
            Scaling::Enchant => raw / 2.0,
            s => s.apply(raw),
        };
        let h = ((v.clamp(0.0, 1.0) * px as f32).round() as usize).min(px);
        if h > 0 {
            frame.fill(x0 + 1, y0 + px - h, px.saturating_sub(2).max(1), h, hsv(hue, 0.8, 0.9));
        }
    }
}
