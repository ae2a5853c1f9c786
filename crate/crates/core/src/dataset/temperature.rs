//! Synthetic temperature fields for change-detection experiments.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{ScalarGrid, UniformSampler};
use crate::error::{Error, Result};

const BASELINE: f64 = 22.0;
const BASE_BUMPS: usize = 4;
const HOTSPOTS: usize = 3;
/// Warming per year after the reference year 2000, at the hotspot peaks.
const WARMING_PER_YEAR: f64 = 0.15;

/// Perturbation amplitude for a year tag. Integer tags warm linearly after
/// 2000 (so "2000" is the unperturbed reference); other tags hash to an
/// amplitude in `[0.5, 1.5)`.
pub(crate) fn perturbation_scale(year_tag: &str) -> f64 {
    match year_tag.trim().parse::<i64>() {
        Ok(year) => (year - 2000).max(0) as f64 * WARMING_PER_YEAR,
        Err(_) => {
            // FNV-1a
            let mut h: u64 = 0xcbf29ce484222325;
            for b in year_tag.bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x100000001b3);
            }
            0.5 + (h % 1000) as f64 / 1000.0
        }
    }
}

/// Smooth random field: baseline plus Gaussian bumps, an irregular mask, and
/// a year-dependent warming concentrated on compactly supported hotspots.
///
/// The base field, mask and hotspot layout depend only on `seed`; the tag
/// only scales the hotspot perturbation. Hence fields of two integer tags
/// `a < b` (both >= 2000) satisfy `T_b - T_ref >= T_a - T_ref` cellwise.
pub fn synth_temperature_field(width: usize, height: usize, year_tag: &str, seed: u64) -> Result<ScalarGrid> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
    }
    let mut rng = UniformSampler::new(seed);
    let (h, w) = (height as f64, width as f64);
    let span = h.max(w);

    let bumps: Vec<[f64; 4]> = (0..BASE_BUMPS)
        .map(|_| {
            [
                rng.next_in(0.0, h),
                rng.next_in(0.0, w),
                rng.next_in(-4.0, 6.0),
                rng.next_in(0.15, 0.35) * span,
            ]
        })
        .collect();

    let phase = [rng.next_in(0.0, 2.0 * PI), rng.next_in(0.0, 2.0 * PI)];
    let radius = 0.45 * h.min(w);
    let centre = (0.5 * h, 0.5 * w);
    let mask = DMatrix::from_fn(height, width, |r, c| {
        let dy = r as f64 + 0.5 - centre.0;
        let dx = c as f64 + 0.5 - centre.1;
        let dist = dy.hypot(dx);
        let theta = dy.atan2(dx);
        let wobble = 1.0 + 0.15 * (3.0 * theta + phase[0]).sin() + 0.1 * (5.0 * theta + phase[1]).cos();
        dist <= (radius * wobble).max(0.75)
    });

    let valid: Vec<(usize, usize)> = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .filter(|&(r, c)| mask[(r, c)])
        .collect();
    let hot_radius = (0.12 * span).max(1.0);
    let hotspots: Vec<(f64, f64)> = (0..HOTSPOTS)
        .map(|_| {
            let (r, c) = valid[rng.next_index(valid.len())];
            (r as f64, c as f64)
        })
        .collect();

    let scale = perturbation_scale(year_tag);
    let values = DMatrix::from_fn(height, width, |r, c| {
        if !mask[(r, c)] {
            return f64::NAN;
        }
        let (y, x) = (r as f64, c as f64);
        let base: f64 = bumps
            .iter()
            .map(|&[by, bx, amp, s]| amp * (-((y - by).powi(2) + (x - bx).powi(2)) / (2.0 * s * s)).exp())
            .sum();
        let heat: f64 = hotspots
            .iter()
            .map(|&(hy, hx)| {
                let q = ((y - hy).powi(2) + (x - hx).powi(2)) / (hot_radius * hot_radius);
                (1.0 - q).max(0.0).powi(2)
            })
            .sum();
        BASELINE + base + scale * heat
    });
    ScalarGrid::new(values, mask)
}
