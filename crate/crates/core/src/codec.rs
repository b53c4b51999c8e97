//! Versioned binary and JSON encodings of levels, worlds and game states.
//!
//! Binary layout: 4-byte magic `DLVE`, little-endian `u16` format version,
//! one payload-kind byte, then the bincode payload.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::engine::GameState;
use crate::error::{Error, Result};
use crate::worldgen::{LevelParams, World};

pub const MAGIC: [u8; 4] = *b"DLVE";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum PayloadKind {
    LevelParams = 1,
    World = 2,
    GameState = 3,
}

impl PayloadKind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(PayloadKind::LevelParams),
            2 => Some(PayloadKind::World),
            3 => Some(PayloadKind::GameState),
            _ => None,
        }
    }
}

/// Types with a binary payload kind.
pub trait Encodable: Serialize + DeserializeOwned {
    const KIND: PayloadKind;
}

impl Encodable for LevelParams {
    const KIND: PayloadKind = PayloadKind::LevelParams;
}

impl Encodable for World {
    const KIND: PayloadKind = PayloadKind::World;
}

impl Encodable for GameState {
    const KIND: PayloadKind = PayloadKind::GameState;
}

pub fn to_bytes<T: Encodable>(value: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(1024);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(T::KIND as u8);
    bincode::serialize_into(&mut out, value).expect("in-memory serialization cannot fail");
    out
}

pub fn from_bytes<T: Encodable>(bytes: &[u8]) -> Result<T> {
    if bytes.len() < HEADER_LEN || bytes[..4] != MAGIC {
        return Err(Error::Codec("missing DLVE header".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(Error::Codec(format!("unsupported format version {version}")));
    }
    match PayloadKind::from_byte(bytes[6]) {
        Some(k) if k == T::KIND => {}
        Some(k) => return Err(Error::Codec(format!("payload is {k:?}, expected {:?}", T::KIND))),
        None => return Err(Error::Codec(format!("unknown payload kind {}", bytes[6]))),
    }
    bincode::deserialize(&bytes[HEADER_LEN..]).map_err(|e| Error::Codec(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("in-memory serialization cannot fail")
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Codec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::engine::{reset, step_mut, Tier};
    use crate::worldgen::generate_world;
    use crate::RngStream;

    #[test]
    fn level_params_round_trip() {
        let p = LevelParams::new(42, Tier::Extended);
        assert_eq!(from_bytes::<LevelParams>(&to_bytes(&p)).unwrap(), p);
        assert_eq!(from_json::<LevelParams>(&to_json(&p)).unwrap(), p);
    }

    #[test]
    fn state_round_trip_and_continuation() {
        let w = Arc::new(generate_world(&LevelParams::new(4, Tier::Classic)));
        let mut s = reset(w, Tier::Classic, RngStream::from_seed(4)).unwrap();
        for a in 0..40u8 {
            step_mut(&mut s, a % 17).unwrap();
        }
        let mut a = from_bytes::<GameState>(&to_bytes(&s)).unwrap();
        let mut b = from_json::<GameState>(&to_json(&s)).unwrap();
        assert_eq!(a, s);
        assert_eq!(b, s);
        for i in 0..60u32 {
            let act = (i * 7 % 17) as u8;
            let r0 = step_mut(&mut s, act).unwrap();
            assert_eq!(step_mut(&mut a, act).unwrap(), r0);
            assert_eq!(step_mut(&mut b, act).unwrap(), r0);
        }
        assert_eq!(a, s);
    }

    #[test]
    fn header_is_checked() {
        let p = LevelParams::new(1, Tier::Classic);
        let mut bytes = to_bytes(&p);
        assert!(from_bytes::<World>(&bytes).is_err());
        bytes[4] = 9;
        assert!(from_bytes::<LevelParams>(&bytes).is_err());
        assert!(from_bytes::<LevelParams>(b"nope").is_err());
    }
}
