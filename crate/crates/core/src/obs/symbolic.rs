//! Flat symbolic observation: the visible map window as per-tile one-hots
//! plus a light scalar, followed by scaled inventory and status fields.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::tables::{Block, CreatureKind, Item};
use crate::engine::{daylight, tile_light, Direction, GameState, Tier, LIGHT_THRESHOLD};
use crate::error::{Error, Result};
use crate::worldgen::Pos;

pub const LAYOUT_VERSION: &str = "delve-symbolic/1";

/// Blocks that can exist in Classic worlds, in one-hot order.
pub const CLASSIC_BLOCKS: [Block; 14] = [
    Block::Grass,
    Block::Water,
    Block::Stone,
    Block::Tree,
    Block::Path,
    Block::Coal,
    Block::Iron,
    Block::Diamond,
    Block::CraftingTable,
    Block::Furnace,
    Block::Sand,
    Block::Lava,
    Block::Plant,
    Block::RipePlant,
];

pub const CLASSIC_CREATURES: [CreatureKind; 4] =
    [CreatureKind::Zombie, CreatureKind::Cow, CreatureKind::Skeleton, CreatureKind::Arrow];

const EXTENDED_CREATURE_SLOTS: usize = 36;
const EXTENDED_INVENTORY_LEN: usize = 447;
const CLASSIC_INVENTORY_LEN: usize = 22;

/// How a field's raw value maps into the vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `sqrt(n) / 10`
    SqrtOver10,
    /// `n / 2`
    Over2,
    /// `n / 4`
    Over4,
    /// `x / 10`
    Over10,
    /// `1` fire, `2` ice, `0` none.
    Enchant,
    /// `0` or `1`.
    Indicator,
    /// Stored as-is.
    Identity,
    /// One entry per option, exactly one set.
    OneHot,
    /// Always zero.
    Reserved,
}

impl Scaling {
    pub fn apply(self, raw: f32) -> f32 {
        match self {
            Scaling::SqrtOver10 => raw.sqrt() / 10.0,
            Scaling::Over2 => raw / 2.0,
            Scaling::Over4 => raw / 4.0,
            Scaling::Over10 => raw / 10.0,
            Scaling::Enchant | Scaling::Indicator | Scaling::Identity | Scaling::OneHot => raw,
            Scaling::Reserved => 0.0,
        }
    }

    /// Inverse of [`Scaling::apply`]. Integer-valued scalings are rounded
    /// back to the nearest integer (or tenth for stats).
    pub fn invert(self, v: f32) -> f32 {
        match self {
            Scaling::SqrtOver10 => ((v * 10.0) * (v * 10.0)).round(),
            Scaling::Over2 => (v * 2.0).round(),
            Scaling::Over4 => (v * 4.0).round(),
            Scaling::Over10 => (v * 100.0).round() / 10.0,
            Scaling::Enchant | Scaling::Indicator => v.round(),
            Scaling::Identity | Scaling::OneHot | Scaling::Reserved => v,
        }
    }
}

/// A one-hot group (or the light scalar) inside each tile record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileSection {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub scaling: Scaling,
}

/// Machine-readable description of every index of the symbolic vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutManifest {
    pub version: String,
    pub tier: Tier,
    pub view_rows: usize,
    pub view_cols: usize,
    /// Tiles are stored row-major, each `per_tile` entries long.
    pub per_tile: usize,
    pub tile_sections: Vec<TileSection>,
    pub map_len: usize,
    pub inventory_offset: usize,
    pub inventory_len: usize,
    pub fields: Vec<FieldSpec>,
    pub total_len: usize,
}

impl LayoutManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("manifest serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn field(&self, name: &str) -> Option<&FieldSpec> {
        self.fields.iter().find(|f| f.name == name)
    }
}

type Getter = fn(&GameState) -> f32;

struct Field {
    name: &'static str,
    len: usize,
    scaling: Scaling,
    get: Getter,
}

const fn field(name: &'static str, scaling: Scaling, get: Getter) -> Field {
    Field { name, len: 1, scaling, get }
}

fn zero(_: &GameState) -> f32 {
    0.0
}

fn direction() -> Field {
    Field { name: "direction", len: 4, scaling: Scaling::OneHot, get: zero }
}

macro_rules! potion {
    ($name:literal, $i:literal) => {
        field($name, Scaling::SqrtOver10, |s| s.inventory.potions[$i] as f32)
    };
}

macro_rules! armour {
    ($name:literal, $ename:literal, $i:literal) => {
        (
            field($name, Scaling::Over2, |s| s.player.armour[$i] as f32),
            field($ename, Scaling::Enchant, |s| s.player.armour_enchants[$i].code()),
        )
    };
}

fn daylight_of(s: &GameState) -> f32 {
    daylight(s.time)
}

fn extended_fields() -> Vec<Field> {
    use Scaling::*;
    let a = [
        armour!("armour_0", "armour_enchant_0", 0),
        armour!("armour_1", "armour_enchant_1", 1),
        armour!("armour_2", "armour_enchant_2", 2),
        armour!("armour_3", "armour_enchant_3", 3),
    ];
    let [(a0, e0), (a1, e1), (a2, e2), (a3, e3)] = a;
    vec![
        field("wood", SqrtOver10, |s| s.inventory.wood as f32),
        field("stone", SqrtOver10, |s| s.inventory.stone as f32),
        field("coal", SqrtOver10, |s| s.inventory.coal as f32),
        field("iron", SqrtOver10, |s| s.inventory.iron as f32),
        field("diamond", SqrtOver10, |s| s.inventory.diamond as f32),
        field("sapphire", SqrtOver10, |s| s.inventory.sapphire as f32),
        field("ruby", SqrtOver10, |s| s.inventory.ruby as f32),
        field("sapling", SqrtOver10, |s| s.inventory.sapling as f32),
        field("torch", SqrtOver10, |s| s.inventory.torch as f32),
        field("arrow", SqrtOver10, |s| s.inventory.arrow as f32),
        potion!("potion_red", 0),
        potion!("potion_green", 1),
        potion!("potion_blue", 2),
        potion!("potion_pink", 3),
        potion!("potion_cyan", 4),
        potion!("potion_yellow", 5),
        field("book", Over2, |s| s.inventory.book as f32),
        field("pickaxe", Over4, |s| s.player.pickaxe_tier as f32),
        field("sword", Over4, |s| s.player.sword_tier as f32),
        field("sword_enchant", Enchant, |s| s.player.sword_enchant.code()),
        field("bow", Indicator, |s| s.player.bow as u8 as f32),
        a0,
        a1,
        a2,
        a3,
        e0,
        e1,
        e2,
        e3,
        field("health", Over10, |s| s.player.health),
        field("food", Over10, |s| s.player.food),
        field("drink", Over10, |s| s.player.drink),
        field("energy", Over10, |s| s.player.energy),
        field("mana", Over10, |s| s.player.mana),
        field("xp", Over10, |s| s.player.xp as f32),
        field("dexterity", Over10, |s| s.player.dexterity as f32),
        field("strength", Over10, |s| s.player.strength as f32),
        field("intelligence", Over10, |s| s.player.intelligence as f32),
        direction(),
        field("daylight", Identity, daylight_of),
        field("sleeping", Indicator, |s| s.player.sleeping as u8 as f32),
        field("resting", Indicator, |s| s.player.resting as u8 as f32),
        field("learned_fireball", Indicator, |s| s.player.learned_fireball as u8 as f32),
        field("learned_iceball", Indicator, |s| s.player.learned_iceball as u8 as f32),
        field("floor", Over10, |s| s.player.floor as f32),
        field("floor_cleared", Indicator, |s| s.cleared(s.floor()) as u8 as f32),
        field("boss_vulnerable", Indicator, |s| s.boss.vulnerable as u8 as f32),
    ]
}

fn classic_fields() -> Vec<Field> {
    use Scaling::*;
    vec![
        field("wood", SqrtOver10, |s| s.inventory.wood as f32),
        field("stone", SqrtOver10, |s| s.inventory.stone as f32),
        field("coal", SqrtOver10, |s| s.inventory.coal as f32),
        field("iron", SqrtOver10, |s| s.inventory.iron as f32),
        field("diamond", SqrtOver10, |s| s.inventory.diamond as f32),
        field("sapling", SqrtOver10, |s| s.inventory.sapling as f32),
        field("pickaxe", Over4, |s| s.player.pickaxe_tier as f32),
        field("sword", Over4, |s| s.player.sword_tier as f32),
        field("health", Over10, |s| s.player.health),
        field("food", Over10, |s| s.player.food),
        field("drink", Over10, |s| s.player.drink),
        field("energy", Over10, |s| s.player.energy),
        direction(),
        field("daylight", Identity, daylight_of),
        field("sleeping", Indicator, |s| s.player.sleeping as u8 as f32),
    ]
}

/// Precomputed layout for one tier.
pub(crate) struct Layout {
    pub manifest: LayoutManifest,
    fields: Vec<Field>,
    block_slot: [Option<u8>; Block::COUNT],
    creature_slot: [Option<u8>; CreatureKind::COUNT],
    item_slot: [Option<u8>; Item::COUNT],
    block_len: usize,
    item_len: usize,
    creature_len: usize,
}

impl Layout {
    fn build(tier: Tier) -> Layout {
        let (view_rows, view_cols) = tier.view();
        let mut block_slot = [None; Block::COUNT];
        let mut creature_slot = [None; CreatureKind::COUNT];
        let mut item_slot = [None; Item::COUNT];
        let (block_labels, item_labels, creature_labels): (Vec<String>, Vec<String>, Vec<String>) = match tier {
            Tier::Classic => {
                for (i, b) in CLASSIC_BLOCKS.iter().enumerate() {
                    block_slot[b.id() as usize] = Some(i as u8);
                }
                item_slot[Item::None.id() as usize] = Some(0);
                for (i, k) in CLASSIC_CREATURES.iter().enumerate() {
                    creature_slot[k.id() as usize] = Some(i as u8 + 1);
                }
                let mut creatures = vec!["none".to_string()];
                creatures.extend(CLASSIC_CREATURES.iter().map(|k| k.name().to_string()));
                (CLASSIC_BLOCKS.iter().map(|b| b.name().to_string()).collect(), vec!["none".to_string()], creatures)
            }
            Tier::Extended => {
                for b in Block::ALL {
                    block_slot[b.id() as usize] = Some(b.id());
                }
                for it in Item::ALL {
                    item_slot[it.id() as usize] = Some(it.id());
                }
                for k in CreatureKind::ALL {
                    creature_slot[k.id() as usize] = Some(k.id() + 1);
                }
                let mut creatures = vec!["none".to_string()];
                creatures.extend(CreatureKind::ALL.iter().map(|k| k.name().to_string()));
                let used = creatures.len();
                creatures.extend((0..EXTENDED_CREATURE_SLOTS - used).map(|i| format!("reserved_{i}")));
                (
                    Block::ALL.iter().map(|b| b.name().to_string()).collect(),
                    Item::ALL.iter().map(|i| i.name().to_string()).collect(),
                    creatures,
                )
            }
        };
        let (block_len, item_len, creature_len) = (block_labels.len(), item_labels.len(), creature_labels.len());
        let sections = vec![
            TileSection { name: "block".into(), offset: 0, len: block_len, labels: block_labels },
            TileSection { name: "item".into(), offset: block_len, len: item_len, labels: item_labels },
            TileSection {
                name: "creature".into(),
                offset: block_len + item_len,
                len: creature_len,
                labels: creature_labels,
            },
            TileSection {
                name: "light".into(),
                offset: block_len + item_len + creature_len,
                len: 1,
                labels: vec!["light".into()],
            },
        ];
        let per_tile = block_len + item_len + creature_len + 1;
        let map_len = per_tile * view_rows * view_cols;

        let (fields, inventory_len) = match tier {
            Tier::Classic => (classic_fields(), CLASSIC_INVENTORY_LEN),
            Tier::Extended => (extended_fields(), EXTENDED_INVENTORY_LEN),
        };
        let mut specs = Vec::new();
        let mut offset = map_len;
        for f in &fields {
            specs.push(FieldSpec { name: f.name.to_string(), offset, len: f.len, scaling: f.scaling });
            offset += f.len;
        }
        let used = offset - map_len;
        assert!(used <= inventory_len, "inventory fields overflow their section");
        if used < inventory_len {
            specs.push(FieldSpec {
                name: "reserved".into(),
                offset,
                len: inventory_len - used,
                scaling: Scaling::Reserved,
            });
        }
        let manifest = LayoutManifest {
            version: LAYOUT_VERSION.into(),
            tier,
            view_rows,
            view_cols,
            per_tile,
            tile_sections: sections,
            map_len,
            inventory_offset: map_len,
            inventory_len,
            fields: specs,
            total_len: map_len + inventory_len,
        };
        Layout { manifest, fields, block_slot, creature_slot, item_slot, block_len, item_len, creature_len }
    }

    pub(crate) fn get(tier: Tier) -> &'static Layout {
        static CLASSIC: OnceLock<Layout> = OnceLock::new();
        static EXTENDED: OnceLock<Layout> = OnceLock::new();
        match tier {
            Tier::Classic => CLASSIC.get_or_init(|| Layout::build(Tier::Classic)),
            Tier::Extended => EXTENDED.get_or_init(|| Layout::build(Tier::Extended)),
        }
    }
}

pub fn layout_manifest(tier: Tier) -> &'static LayoutManifest {
    &Layout::get(tier).manifest
}

pub fn symbolic_len(tier: Tier) -> usize {
    layout_manifest(tier).total_len
}

/// Offset from the player of the top-left tile of the view.
pub fn view_origin(tier: Tier) -> (i16, i16) {
    let (rows, cols) = tier.view();
    (-(rows as i16) / 2, -(cols as i16) / 2)
}

/// Map positions covered by the view, row-major.
pub fn view_positions(state: &GameState) -> impl Iterator<Item = Pos> + '_ {
    let (rows, cols) = state.tier.view();
    let (r0, c0) = view_origin(state.tier);
    let centre = state.player.pos;
    (0..rows as i16).flat_map(move |r| (0..cols as i16).map(move |c| centre.offset(r0 + r, c0 + c)))
}

/// Creature shown on a tile: mobs take precedence over projectiles.
pub fn creature_at(state: &GameState, p: Pos) -> Option<CreatureKind> {
    let arrays = &state.here().arrays;
    for arr in arrays {
        if let Some(lane) = arr.at(p) {
            return Some(arr.kind[lane]);
        }
    }
    None
}

/// Light seen by the player on a tile; the view is blank while sleeping.
pub fn visible_light(state: &GameState, p: Pos) -> f32 {
    if state.player.sleeping {
        0.0
    } else {
        tile_light(state, p)
    }
}

pub fn encode_symbolic(state: &GameState) -> Vec<f32> {
    let mut out = vec![0.0; symbolic_len(state.tier)];
    encode_symbolic_into(state, &mut out);
    out
}

/// Writes the observation into `out`, which must be exactly
/// [`symbolic_len`] long.
pub fn encode_symbolic_into(state: &GameState, out: &mut [f32]) {
    let layout = Layout::get(state.tier);
    let m = &layout.manifest;
    assert_eq!(out.len(), m.total_len, "observation buffer length");
    out.fill(0.0);

    let item_off = layout.block_len;
    let creature_off = item_off + layout.item_len;
    let light_off = creature_off + layout.creature_len;
    for (t, p) in view_positions(state).enumerate() {
        let tile = &mut out[t * m.per_tile..(t + 1) * m.per_tile];
        let light = visible_light(state, p);
        tile[light_off] = light;
        if light < LIGHT_THRESHOLD {
            continue;
        }
        let b = layout.block_slot[state.block(p).id() as usize].expect("block outside the tier's layout");
        tile[b as usize] = 1.0;
        let it = layout.item_slot[state.item(p).id() as usize].expect("item outside the tier's layout");
        tile[item_off + it as usize] = 1.0;
        let c = match creature_at(state, p) {
            Some(k) => layout.creature_slot[k.id() as usize].expect("creature outside the tier's layout"),
            None => 0,
        };
        tile[creature_off + c as usize] = 1.0;
    }

    for (f, spec) in layout.fields.iter().zip(&m.fields) {
        if spec.scaling == Scaling::OneHot {
            out[spec.offset + state.player.facing.index()] = 1.0;
        } else {
            out[spec.offset] = spec.scaling.apply((f.get)(state));
        }
    }
}

/// One visible tile recovered from an observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodedTile {
    pub light: f32,
    /// `None` when the tile is masked.
    pub block: Option<Block>,
    pub item: Option<Item>,
    /// `Some(None)` for a visible tile without a creature.
    pub creature: Option<Option<CreatureKind>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodedObservation {
    pub tiles: Vec<DecodedTile>,
    /// Raw (unscaled) values of every named inventory field, in layout
    /// order; the direction one-hot decodes to its index.
    pub fields: Vec<(String, f32)>,
}

impl DecodedObservation {
    pub fn field(&self, name: &str) -> Option<f32> {
        self.fields.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn direction(&self) -> Option<Direction> {
        self.field("direction").map(|i| Direction::ALL[i as usize])
    }
}

fn one_hot(group: &[f32], what: &str) -> Result<Option<usize>> {
    let mut hot = None;
    for (i, &v) in group.iter().enumerate() {
        if v == 1.0 {
            if hot.is_some() {
                return Err(Error::Codec(format!("{what} group has more than one bit set")));
            }
            hot = Some(i);
        } else if v != 0.0 {
            return Err(Error::Codec(format!("{what} group holds non-binary value {v}")));
        }
    }
    Ok(hot)
}

/// Inverts [`encode_symbolic`] using the manifest.
pub fn decode_symbolic(manifest: &LayoutManifest, obs: &[f32]) -> Result<DecodedObservation> {
    if obs.len() != manifest.total_len {
        return Err(Error::LengthMismatch { expected: manifest.total_len, got: obs.len() });
    }
    let section = |name: &str| manifest.tile_sections.iter().find(|s| s.name == name).expect("section");
    let (bs, is, cs, ls) = (section("block"), section("item"), section("creature"), section("light"));
    let mut tiles = Vec::with_capacity(manifest.view_rows * manifest.view_cols);
    for tile in obs[..manifest.map_len].chunks_exact(manifest.per_tile) {
        let light = tile[ls.offset];
        let b = one_hot(&tile[bs.offset..bs.offset + bs.len], "block")?;
        let i = one_hot(&tile[is.offset..is.offset + is.len], "item")?;
        let c = one_hot(&tile[cs.offset..cs.offset + cs.len], "creature")?;
        let decoded = match (b, i, c) {
            (None, None, None) => DecodedTile { light, block: None, item: None, creature: None },
            (Some(b), Some(i), Some(c)) => {
                let block = parse_label(&bs.labels[b], Block::ALL, |x| x.name())?;
                let item = parse_label(&is.labels[i], Item::ALL, |x| x.name())?;
                let creature =
                    if c == 0 { None } else { Some(parse_label(&cs.labels[c], CreatureKind::ALL, |x| x.name())?) };
                DecodedTile { light, block: Some(block), item: Some(item), creature: Some(creature) }
            }
            _ => return Err(Error::Codec("tile groups are partially masked".into())),
        };
        tiles.push(decoded);
    }
    let mut fields = Vec::new();
    for f in &manifest.fields {
        let slice = &obs[f.offset..f.offset + f.len];
        match f.scaling {
            Scaling::Reserved => {
                if slice.iter().any(|&v| v != 0.0) {
                    return Err(Error::Codec(format!("reserved entries at {} are nonzero", f.offset)));
                }
            }
            Scaling::OneHot => {
                let i = one_hot(slice, &f.name)?.ok_or_else(|| Error::Codec(format!("{} one-hot is empty", f.name)))?;
                fields.push((f.name.clone(), i as f32));
            }
            s => fields.push((f.name.clone(), s.invert(slice[0]))),
        }
    }
    Ok(DecodedObservation { tiles, fields })
}

fn parse_label<T: Copy>(label: &str, all: &[T], name: fn(&T) -> &'static str) -> Result<T> {
    all.iter().copied().find(|x| name(x) == label).ok_or_else(|| Error::Codec(format!("label {label:?} is reserved")))
}

/// Raw values of the named inventory fields for a state, in layout order.
pub(crate) fn raw_fields(state: &GameState) -> Vec<(&'static str, f32)> {
    Layout::get(state.tier)
        .fields
        .iter()
        .map(|f| {
            let v = if f.scaling == Scaling::OneHot { state.player.facing.index() as f32 } else { (f.get)(state) };
            (f.name, v)
        })
        .collect()
}
