//! Observation codecs: symbolic vector, text lines and RGB tiles.

mod symbolic;
mod text;
mod tiles;

pub use symbolic::{
    creature_at, decode_symbolic, encode_symbolic, encode_symbolic_into, layout_manifest, symbolic_len, view_origin,
    view_positions, visible_light, DecodedObservation, DecodedTile, FieldSpec, LayoutManifest, Scaling, TileSection,
    CLASSIC_BLOCKS, CLASSIC_CREATURES, LAYOUT_VERSION,
};
pub use text::render_text;
pub use tiles::{block_colour, render_tiles, strip_rows, Frame, TILE_SIZES};

/// Observation kind requested from batch stepping or the bench CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsMode {
    None,
    Symbolic,
    Tiles,
}

impl ObsMode {
    pub fn parse(s: &str) -> crate::Result<ObsMode> {
        match s {
            "none" => Ok(ObsMode::None),
            "symbolic" => Ok(ObsMode::Symbolic),
            "tiles" => Ok(ObsMode::Tiles),
            other => Err(crate::Error::InvalidArgument(format!("unknown observation mode {other:?}"))),
        }
    }
}
