use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid action id {action} (tier has {count} actions)")]
    InvalidAction { action: u8, count: u8 },
    #[error("episode is already done; reset before stepping")]
    EpisodeDone,
    #[error("world was generated for {world:?} but {requested:?} was requested")]
    TierMismatch { world: crate::engine::Tier, requested: crate::engine::Tier },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("codec error: {0}")]
    Codec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
