//! Gradient-lattice Perlin noise driven by explicit angle fields.
//!
//! Each octave owns a lattice of gradient angles with `(res_rows + 1) x
//! (res_cols + 1)` points, where `res = dims / period`. Gradients are
//! `(cos a, sin a)` and the lattice is interpolated with the quintic fade
//! `6t^5 - 15t^4 + 10t^3`, which is C2 across cell boundaries.

use serde::{Deserialize, Serialize};
use std::f64::consts::{SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One octave: lattice period in tiles and its amplitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Octave {
    pub period_rows: u32,
    pub period_cols: u32,
    pub amplitude: f64,
}

impl Octave {
    pub const fn square(period: u32, amplitude: f64) -> Self {
        Octave { period_rows: period, period_cols: period, amplitude }
    }

    pub fn lattice(&self, dims: (u32, u32)) -> Result<(u32, u32)> {
        let (h, w) = dims;
        if self.period_rows == 0 || self.period_cols == 0 || h % self.period_rows != 0 || w % self.period_cols != 0 {
            return Err(Error::InvalidArgument(format!(
                "dims {h}x{w} not divisible by lattice period {}x{}",
                self.period_rows, self.period_cols
            )));
        }
        Ok((h / self.period_rows, w / self.period_cols))
    }
}

/// Gradient angles for one octave, row-major over lattice points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub rows: u32,
    pub cols: u32,
    pub angles: Vec<f32>,
}

impl AngleGrid {
    pub fn random(res: (u32, u32), rng: &mut RngStream) -> Self {
        let rows = res.0 + 1;
        let cols = res.1 + 1;
        let angles = (0..rows * cols).map(|_| (rng.next_f64() * TAU) as f32).collect();
        AngleGrid { rows, cols, angles }.normalized()
    }

    pub fn constant(res: (u32, u32), angle: f32) -> Self {
        let rows = res.0 + 1;
        let cols = res.1 + 1;
        AngleGrid { rows, cols, angles: vec![angle; (rows * cols) as usize] }.normalized()
    }

    /// Wraps every angle into `[0, 2pi)`.
    pub fn normalized(mut self) -> Self {
        for a in &mut self.angles {
            *a = wrap_angle(*a);
        }
        self
    }
}

pub fn wrap_angle(a: f32) -> f32 {
    let tau = TAU as f32;
    let mut v = a.rem_euclid(tau);
    if v >= tau {
        v = 0.0;
    }
    v
}

#[inline(always)]
pub fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

/// Row-major `h x w` noise grid.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseGrid {
    pub rows: u32,
    pub cols: u32,
    pub values: Vec<f64>,
}

impl NoiseGrid {
    #[inline]
    pub fn get(&self, r: u32, c: u32) -> f64 {
        self.values[(r * self.cols + c) as usize]
    }
}

/// Adds `weight * noise` for a single octave into `out`.
fn accumulate_octave(dims: (u32, u32), grid: &AngleGrid, octave: &Octave, weight: f64, out: &mut [f64]) {
    let w = dims.1 as usize;
    let pr = octave.period_rows as usize;
    let pc = octave.period_cols as usize;
    let res_r = dims.0 as usize / pr;
    let res_c = w / pc;

    // Fractional offsets and fades are shared by every cell.
    let fr: Vec<f64> = (0..pr).map(|i| i as f64 / pr as f64).collect();
    let fc: Vec<f64> = (0..pc).map(|j| j as f64 / pc as f64).collect();
    let tr: Vec<f64> = fr.iter().map(|&x| fade(x)).collect();
    let tc: Vec<f64> = fc.iter().map(|&y| fade(y)).collect();
    let grads: Vec<(f64, f64)> = grid.angles.iter().map(|&a| (a as f64).sin_cos()).map(|(s, c)| (c, s)).collect();
    let gcols = grid.cols as usize;

    let scale = SQRT_2 * weight;
    for cr in 0..res_r {
        for cc in 0..res_c {
            let g00 = grads[cr * gcols + cc];
            let g10 = grads[(cr + 1) * gcols + cc];
            let g01 = grads[cr * gcols + cc + 1];
            let g11 = grads[(cr + 1) * gcols + cc + 1];
            for i in 0..pr {
                let x = fr[i];
                let t0 = tr[i];
                // Along a row both edge interpolants are affine in y.
                let a0 = x * g00.0 + t0 * ((x - 1.0) * g10.0 - x * g00.0);
                let b0 = g00.1 + t0 * (g10.1 - g00.1);
                let a1 = x * g01.0 - g01.1 + t0 * ((x - 1.0) * g11.0 - g11.1 - x * g01.0 + g01.1);
                let b1 = g01.1 + t0 * (g11.1 - g01.1);
                let start = (cr * pr + i) * w + cc * pc;
                let row = &mut out[start..start + pc];
                for ((o, &y), &t1) in row.iter_mut().zip(&fc).zip(&tc) {
                    let n0 = a0 + b0 * y;
                    let n1 = a1 + b1 * y;
                    *o += scale * (n0 + t1 * (n1 - n0));
                }
            }
        }
    }
}

/// Fractal Perlin noise; `angles[i]` drives `octaves[i]`.
///
/// The result is the amplitude-weighted mean of the octaves, each scaled by
/// sqrt(2) so a single octave spans `[-1, 1]`, then clamped to that range.
pub fn perlin(dims: (u32, u32), angles: &[AngleGrid], octaves: &[Octave]) -> Result<NoiseGrid> {
    if angles.len() != octaves.len() || octaves.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "perlin: {} angle grids for {} octaves",
            angles.len(),
            octaves.len()
        )));
    }
    let total_amp: f64 = octaves.iter().map(|o| o.amplitude).sum();
    if !(total_amp > 0.0) {
        return Err(Error::InvalidArgument("perlin: amplitudes must sum to a positive value".into()));
    }
    let mut values = vec![0.0; (dims.0 * dims.1) as usize];
    for (grid, octave) in angles.iter().zip(octaves) {
        let res = octave.lattice(dims)?;
        if grid.rows != res.0 + 1 || grid.cols != res.1 + 1 {
            return Err(Error::InvalidArgument(format!(
                "perlin: angle grid {}x{} does not match lattice {}x{}",
                grid.rows,
                grid.cols,
                res.0 + 1,
                res.1 + 1
            )));
        }
        accumulate_octave(dims, grid, octave, octave.amplitude / total_amp, &mut values);
    }
    for v in &mut values {
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(NoiseGrid { rows: dims.0, cols: dims.1, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct scalar evaluation at a continuous lattice coordinate; written
    /// independently of the cell-blocked loop above.
    fn scalar_reference(grid: &AngleGrid, px: f64, py: f64) -> f64 {
        let ix = px.floor();
        let iy = py.floor();
        let (dx, dy) = (px - ix, py - iy);
        let corner = |ox: f64, oy: f64| {
            let a = grid.angles[((ix + ox) as u32 * grid.cols + (iy + oy) as u32) as usize] as f64;
            a.cos() * (dx - ox) + a.sin() * (dy - oy)
        };
        let s = |t: f64| 10.0 * t.powi(3) - 15.0 * t.powi(4) + 6.0 * t.powi(5);
        let (u, v) = (s(dx), s(dy));
        let top = corner(0.0, 0.0) * (1.0 - u) + corner(1.0, 0.0) * u;
        let bottom = corner(0.0, 1.0) * (1.0 - u) + corner(1.0, 1.0) * u;
        SQRT_2 * (top * (1.0 - v) + bottom * v)
    }

    #[test]
    fn center_of_two_by_two_lattice_matches_scalar_oracle() {
        // 2x2 lattice cells over a 16x16 grid; period 8.
        let mut rng = RngStream::from_seed(77);
        let grid = AngleGrid::random((2, 2), &mut rng);
        let octave = Octave::square(8, 1.0);
        let field = perlin((16, 16), std::slice::from_ref(&grid), &[octave]).unwrap();
        for &(r, c) in &[(8u32, 8u32), (4, 4), (3, 11), (15, 0), (12, 5)] {
            let expect = scalar_reference(&grid, r as f64 / 8.0, c as f64 / 8.0).clamp(-1.0, 1.0);
            assert!((field.get(r, c) - expect).abs() < 1e-12, "({r},{c})");
        }
    }

    #[test]
    fn lattice_points_are_zero_for_identical_gradients() {
        let grid = AngleGrid::constant((4, 4), 1.234);
        let field = perlin((32, 32), &[grid], &[Octave::square(8, 1.0)]).unwrap();
        for r in (0..32).step_by(8) {
            for c in (0..32).step_by(8) {
                assert_eq!(field.get(r, c), 0.0);
            }
        }
    }

    #[test]
    fn deterministic_and_bounded() {
        let mut rng = RngStream::from_seed(3);
        let octaves = [Octave::square(16, 1.0), Octave::square(4, 0.3)];
        let grids: Vec<_> = octaves.iter().map(|o| AngleGrid::random(o.lattice((48, 48)).unwrap(), &mut rng)).collect();
        let a = perlin((48, 48), &grids, &octaves).unwrap();
        let b = perlin((48, 48), &grids, &octaves).unwrap();
        assert_eq!(a, b);
        assert!(a.values.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(a.values.iter().any(|v| v.abs() > 0.05));
    }

    #[test]
    fn rejects_non_divisible_dims() {
        let grid = AngleGrid::constant((3, 3), 0.0);
        assert!(perlin((50, 48), &[grid], &[Octave::square(16, 1.0)]).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-10.0f32, -0.0, 0.0, 6.2831855, 7.0, 100.0] {
            let w = wrap_angle(a);
            assert!((0.0..TAU as f32).contains(&w), "{a} -> {w}");
        }
    }
}
