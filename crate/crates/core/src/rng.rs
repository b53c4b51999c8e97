//! Counter-based random streams.
//!
//! Every random decision in the simulator is drawn from an [`RngStream`], a
//! Philox4x32-10 generator addressed by a 64-bit key and a 64-bit counter.
//! Streams are plain values: a draw returns the value together with the
//! advanced stream, and child streams are derived with [`RngStream::split`]
//! without touching the parent. An episode is therefore a pure function of
//! its level parameters and the action sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

/// Stream ids for the fixed subsystems. New subsystems take new ids so
/// existing streams never shift.
pub mod streams {
    /// Noise angle fields of a level.
    pub const LEVEL_ANGLES: u64 = 0x4c41_4e47_0000_0001;
    /// Per-floor seeds of a level.
    pub const LEVEL_FLOORS: u64 = 0x4c46_4c52_0000_0002;
    /// Overworld tile-level draws (ores, trees).
    pub const OVERWORLD_TILES: u64 = 0x4f56_5254_0000_0003;
    /// Potion permutation and chest loot.
    pub const WORLD_LOOT: u64 = 0x4c4f_4f54_0000_0004;
    /// Retry substreams for floor generation, combined with the attempt index.
    pub const FLOOR_RETRY: u64 = 0x5245_5452_0000_0005;
    /// In-episode dynamics (creatures, spawns, saplings).
    pub const ENGINE: u64 = 0x454e_4749_0000_0006;
    /// Fresh worlds generated by the batch reset pool.
    pub const RESET_POOL: u64 = 0x504f_4f4c_0000_0007;
    /// Engine streams handed to environments on auto-reset.
    pub const RESET_ENGINE: u64 = 0x5253_454e_0000_0008;
    /// Default stream used by level mutation helpers.
    pub const MUTATION: u64 = 0x4d55_5441_0000_0009;
    /// Policies driven by the benchmark harness.
    pub const POLICY: u64 = 0x504f_4c49_0000_000a;
}

#[inline(always)]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = (a as u64) * (b as u64);
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
#[inline]
pub fn philox4x32(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// A splittable, counter-based random stream.
///
/// The 128 bits of generator state are the 64-bit key and the 64-bit
/// counter; `stream_id` is the label the stream was split with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    key: [u32; 2],
    counter: u64,
    stream_id: u64,
}

impl RngStream {
    /// Root stream for a user-facing seed.
    pub fn from_seed(seed: u64) -> Self {
        // Whiten the seed so neighbouring seeds get unrelated keys.
        let w = philox4x32([seed as u32, (seed >> 32) as u32, 0x5eed, 0], [PHILOX_W1, PHILOX_W0]);
        Self { key: [w[0], w[1]], counter: 0, stream_id: 0 }
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Derive a child stream. Depends only on the parent's key and label and
    /// on `stream_id`, never on how many draws the parent has made.
    pub fn split(&self, stream_id: u64) -> Self {
        let block = philox4x32(
            [
                stream_id as u32,
                (stream_id >> 32) as u32,
                self.stream_id as u32 ^ 0xa5a5_a5a5,
                (self.stream_id >> 32) as u32 ^ 0x3c3c_3c3c,
            ],
            self.key,
        );
        Self { key: [block[0] ^ block[2], block[1] ^ block[3]], counter: 0, stream_id }
    }

    /// Raw block at an absolute counter position; does not advance.
    #[inline]
    pub fn block_at(&self, index: u64) -> [u32; 4] {
        philox4x32([index as u32, (index >> 32) as u32, 0, 0], self.key)
    }

    /// Uniform `f64` in `[0, 1)` at an absolute position; does not advance.
    #[inline]
    pub fn unit_at(&self, index: u64) -> f64 {
        let b = self.block_at(index);
        let bits = ((b[0] as u64) << 32 | b[1] as u64) >> 11;
        bits as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let b = self.block_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        (b[0] as u64) << 32 | b[1] as u64
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, 1)`, 24 bits.
    #[inline]
    pub fn next_f32(&mut self) -> f32 {
        (self.next_u64() >> 40) as f32 * (1.0 / (1u32 << 24) as f32)
    }

    /// Bernoulli trial.
    #[inline]
    pub fn chance(&mut self, p: f32) -> bool {
        self.next_f32() < p
    }

    /// Uniform integer in `[0, n)`. `n` must be nonzero.
    #[inline]
    pub fn below(&mut self, n: u32) -> u32 {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; the bias is below 2^-32 for our ranges.
        ((self.next_u32() as u64 * n as u64) >> 32) as u32
    }

    /// Uniform integer in `[lo, hi]`.
    #[inline]
    pub fn range_inclusive(&mut self, lo: i32, hi: i32) -> i32 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u32) as i32
    }

    /// Value-style draw from `[lo, hi)`.
    pub fn uniform(self, lo: f64, hi: f64) -> Result<(f64, RngStream)> {
        if !(lo <= hi) {
            return Err(Error::InvalidArgument(format!("uniform: lo ({lo}) > hi ({hi})")));
        }
        let mut next = self;
        let u = next.next_f64();
        let v = lo + (hi - lo) * u;
        // Guard the open upper bound against rounding.
        let v = if v >= hi && hi > lo { lo.max(hi - (hi - lo) * f64::EPSILON) } else { v };
        Ok((v, next))
    }

    /// Value-style `u64` draw.
    pub fn draw_u64(self) -> (u64, RngStream) {
        let mut next = self;
        let v = next.next_u64();
        (v, next)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u32 + 1) as usize;
            items.swap(i, j);
        }
    }
}

pub fn split(parent: &RngStream, stream_id: u64) -> RngStream {
    parent.split(stream_id)
}

pub fn uniform(s: RngStream, lo: f64, hi: f64) -> Result<(f64, RngStream)> {
    s.uniform(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_draws(mut s: RngStream, n: usize) -> Vec<u64> {
        (0..n).map(|_| s.next_u64()).collect()
    }

    #[test]
    fn philox_known_answer() {
        // Random123 known-answer vectors for philox4x32_10.
        assert_eq!(philox4x32([0, 0, 0, 0], [0, 0]), [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]);
        assert_eq!(philox4x32([u32::MAX; 4], [u32::MAX; 2]), [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]);
        assert_eq!(
            philox4x32([0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344], [0xa409_3822, 0x299f_31d0]),
            [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]
        );
    }

    #[test]
    fn split_is_deterministic() {
        let k = RngStream::from_seed(42);
        assert_eq!(k.split(0), k.split(0));
        assert_eq!(first_draws(k.split(0), 8), first_draws(k.split(0), 8));
    }

    #[test]
    fn split_ignores_parent_draw_count() {
        let k = RngStream::from_seed(9);
        let mut advanced = k;
        advanced.next_u64();
        assert_eq!(k.split(3), advanced.split(3));
    }

    #[test]
    fn splits_differ_over_many_parents() {
        for seed in 0..1000u64 {
            let k = RngStream::from_seed(seed);
            assert_ne!(first_draws(k.split(0), 64), first_draws(k.split(1), 64), "seed {seed}");
            assert_ne!(first_draws(k.split(0).split(1), 64), first_draws(k.split(1).split(0), 64), "seed {seed}");
        }
    }

    #[test]
    fn uniform_degenerate_and_errors() {
        let s = RngStream::from_seed(1);
        let (v, next) = s.uniform(0.0, 0.0).unwrap();
        assert_eq!(v, 0.0);
        assert_ne!(next, s);
        assert!(s.uniform(1.0, 0.0).is_err());
        assert_eq!(s.uniform(0.0, 1.0).unwrap(), s.uniform(0.0, 1.0).unwrap());
    }

    #[test]
    fn uniform_mean_is_centered() {
        let mut s = RngStream::from_seed(2024);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let (v, next) = s.uniform(0.0, 1.0).unwrap();
            assert!((0.0..1.0).contains(&v));
            sum += v;
            s = next;
        }
        let mean = sum / n as f64;
        assert!((0.498..=0.502).contains(&mean), "mean {mean}");
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = RngStream::from_seed(5);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = s.below(7) as usize;
            seen[v] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }
}
