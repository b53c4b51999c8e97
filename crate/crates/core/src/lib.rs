//! Deterministic two-tier survival roguelike environment with batched
//! stepping, observation codecs and level mutation operators.

pub mod batch;
pub mod bench;
pub mod codec;
pub mod engine;
pub mod error;
pub mod obs;
pub mod rng;
pub mod worldgen;

pub use engine::tables::{Achievement, Action, Block, CreatureKind, Item};
pub use engine::{reset, step, GameState, StepOutcome, Tier};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use worldgen::{generate_world, LevelParams, World};
