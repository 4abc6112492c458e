//! Training-time random erasing of the warped garment.
//!
//! With probability `alpha` (decided by the seeded generator), a free-form
//! stroke mask — a few random-walk brush strokes clipped to the garment's
//! occupancy mask — zeroes pixels and clears the mask there. The erased
//! area always lands inside the configured fraction bounds: the stroke
//! painter records pixels in paint order, trims overshoot, and extends with
//! more strokes (falling back to a deterministic scan) when strokes alone
//! come up short. Fully deterministic for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::warp::WarpedGarment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EraseParams {
    /// Bounds on the erased fraction of the occupancy mask.
    pub min_area_fraction: f64,
    pub max_area_fraction: f64,
    /// Stroke count range per application.
    pub min_strokes: u32,
    pub max_strokes: u32,
    /// Brush width range in pixels.
    pub min_width: f64,
    pub max_width: f64,
    /// Walk step count range per stroke.
    pub min_steps: u32,
    pub max_steps: u32,
}

impl Default for EraseParams {
    fn default() -> Self {
        EraseParams {
            min_area_fraction: 0.05,
            max_area_fraction: 0.25,
            min_strokes: 1,
            max_strokes: 4,
            min_width: 8.0,
            max_width: 24.0,
            min_steps: 20,
            max_steps: 60,
        }
    }
}

impl EraseParams {
    pub fn validate(&self) -> crate::error::Result<()> {
        let bad = |detail: String| crate::error::Error::MalformedJson {
            path: "<erase params>".into(),
            detail,
        };
        if !(0.0..=1.0).contains(&self.min_area_fraction)
            || !(0.0..=1.0).contains(&self.max_area_fraction)
            || self.min_area_fraction > self.max_area_fraction
        {
            return Err(bad(format!(
                "area fractions [{}, {}] must be an ordered subrange of [0, 1]",
                self.min_area_fraction, self.max_area_fraction
            )));
        }
        if self.min_strokes == 0 || self.min_strokes > self.max_strokes {
            return Err(bad(format!(
                "stroke range [{}, {}] must be ordered and positive",
                self.min_strokes, self.max_strokes
            )));
        }
        if !(self.min_width > 0.0) || self.min_width > self.max_width {
            return Err(bad(format!(
                "width range [{}, {}] must be ordered and positive",
                self.min_width, self.max_width
            )));
        }
        if self.min_steps == 0 || self.min_steps > self.max_steps {
            return Err(bad(format!(
                "step range [{}, {}] must be ordered and positive",
                self.min_steps, self.max_steps
            )));
        }
        Ok(())
    }
}

/// Paints a brush disc into `painted`, appending newly covered mask pixels
/// to `order` until `target` pixels are collected.
fn stamp_disc(
    cx: f64,
    cy: f64,
    radius: f64,
    garment: &WarpedGarment,
    painted: &mut [bool],
    order: &mut Vec<(u32, u32)>,
    target: usize,
) {
    let (w, h) = garment.dimensions();
    let x0 = (cx - radius).floor().max(0.0) as u32;
    let y0 = (cy - radius).floor().max(0.0) as u32;
    let x1 = ((cx + radius).ceil() as i64).clamp(0, w as i64 - 1) as u32;
    let y1 = ((cy + radius).ceil() as i64).clamp(0, h as i64 - 1) as u32;
    let r2 = radius * radius;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if order.len() >= target {
                return;
            }
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            if dx * dx + dy * dy > r2 {
                continue;
            }
            if !garment.mask.get(x, y) {
                continue;
            }
            let idx = (y as usize) * w as usize + x as usize;
            if painted[idx] {
                continue;
            }
            painted[idx] = true;
            order.push((x, y));
        }
    }
}

/// Erases parts of the warped garment with probability `alpha`.
///
/// When the seeded draw applies the erase, the erased pixel count lands
/// inside the configured fraction bounds of the occupancy area: a target is
/// drawn uniformly from the bound range, strokes paint up to it, and the
/// count never drops below the minimum bound. Masks too small to erase a
/// single pixel within the maximum fraction are returned unchanged.
/// Identical `(input, seed, alpha, params)` produce bit-identical output.
pub fn random_erase(
    garment: &WarpedGarment,
    seed: u64,
    alpha: f64,
    params: &EraseParams,
) -> WarpedGarment {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if rng.random::<f64>() >= alpha {
        return garment.clone();
    }
    let total = garment.mask.count_ones() as usize;
    if total == 0 {
        return garment.clone();
    }
    let (w, h) = garment.dimensions();

    let max_px = (params.max_area_fraction * total as f64).floor() as usize;
    if max_px == 0 {
        // No pixel count satisfies the fraction bound.
        return garment.clone();
    }
    let min_px = ((params.min_area_fraction * total as f64).ceil() as usize).clamp(1, max_px);
    let target = rng.random_range(min_px..=max_px);

    let mut painted = vec![false; w as usize * h as usize];
    let mut order: Vec<(u32, u32)> = Vec::with_capacity(target);

    // Collect the mask's pixels once for start-point sampling and the
    // deterministic fallback sweep.
    let mask_pixels: Vec<(u32, u32)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| garment.mask.get(x, y))
        .collect();

    let stroke_budget = rng.random_range(params.min_strokes..=params.max_strokes);
    // Strokes beyond the drawn budget only happen when the budgeted ones
    // could not reach the minimum area.
    let hard_cap = 64;
    let mut strokes = 0u32;
    while order.len() < target && strokes < hard_cap.max(stroke_budget) {
        if strokes >= stroke_budget && order.len() >= min_px {
            break;
        }
        strokes += 1;
        let (sx, sy) = mask_pixels[rng.random_range(0..mask_pixels.len())];
        let width = rng.random_range(params.min_width..=params.max_width);
        let steps = rng.random_range(params.min_steps..=params.max_steps);
        let mut x = sx as f64;
        let mut y = sy as f64;
        let mut heading = rng.random_range(0.0..std::f64::consts::TAU);
        let radius = width / 2.0;
        for _ in 0..steps {
            stamp_disc(x, y, radius, garment, &mut painted, &mut order, target);
            if order.len() >= target {
                break;
            }
            heading += rng.random_range(-0.7..0.7);
            let step_len = width * 0.5;
            x = (x + step_len * heading.cos()).clamp(0.0, (w - 1) as f64);
            y = (y + step_len * heading.sin()).clamp(0.0, (h - 1) as f64);
        }
    }

    // Deterministic sweep when strokes saturated without reaching the
    // minimum (tiny or fragmented masks).
    if order.len() < min_px {
        let offset = rng.random_range(0..mask_pixels.len());
        for i in 0..mask_pixels.len() {
            if order.len() >= min_px {
                break;
            }
            let (x, y) = mask_pixels[(offset + i) % mask_pixels.len()];
            let idx = (y as usize) * w as usize + x as usize;
            if !painted[idx] {
                painted[idx] = true;
                order.push((x, y));
            }
        }
    }

    let mut out = garment.clone();
    for &(x, y) in &order {
        out.image.put(x, y, &[0, 0, 0, 0]);
        out.mask.set(x, y, false);
    }
    out
}
