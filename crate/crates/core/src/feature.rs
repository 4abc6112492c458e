//! Real-valued feature maps: mean-fill inpainting of misaligned regions and
//! spatially adaptive modulation.
//!
//! Values are stored as `f32` so the on-disk format round-trips bit-exactly;
//! every reduction (means, variances) accumulates in `f64`.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// C×H×W grid of finite real values, row-major within each channel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: u32,
    width: u32,
    values: Vec<f32>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: u32, width: u32) -> Self {
        FeatureMap {
            channels,
            height,
            width,
            values: vec![0.0; channels * height as usize * width as usize],
        }
    }

    pub fn from_values(channels: usize, height: u32, width: u32, values: Vec<f32>) -> Result<Self> {
        if values.len() != channels * height as usize * width as usize {
            return Err(Error::ShapeMismatch {
                expected: (channels, height, width),
                got: (values.len(), 1, 1),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ShapeMismatch {
                expected: (channels, height, width),
                got: (0, 0, 0),
            });
        }
        Ok(FeatureMap {
            channels,
            height,
            width,
            values,
        })
    }

    pub fn shape(&self) -> (usize, u32, u32) {
        (self.channels, self.height, self.width)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    #[inline]
    fn idx(&self, c: usize, y: u32, x: u32) -> usize {
        (c * self.height as usize + y as usize) * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, c: usize, y: u32, x: u32) -> f32 {
        self.values[self.idx(c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: u32, x: u32, v: f32) {
        let i = self.idx(c, y, x);
        self.values[i] = v;
    }

    fn check_mask(&self, mask: &BinaryMask) -> Result<()> {
        if mask.dimensions() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                got: mask.dimensions(),
            });
        }
        Ok(())
    }
}

/// Fills misaligned feature pixels with the per-channel mean over the
/// aligned region.
///
/// Pixels outside the garment mask are zeroed first; aligned pixels pass
/// through; each misaligned pixel takes its channel's mean over the aligned
/// region. The masks must partition `garment` (`aligned ∧ misaligned = 0`,
/// `aligned ∨ misaligned = garment`), and the aligned region must be
/// nonempty whenever the misaligned one is.
pub fn inpaint_features(
    features: &FeatureMap,
    garment: &BinaryMask,
    aligned: &BinaryMask,
    misaligned: &BinaryMask,
) -> Result<FeatureMap> {
    features.check_mask(garment)?;
    features.check_mask(aligned)?;
    features.check_mask(misaligned)?;
    if !aligned.and(misaligned)?.is_empty() {
        return Err(Error::InvalidPartition {
            detail: "aligned and misaligned masks overlap".into(),
        });
    }
    if aligned.or(misaligned)? != *garment {
        return Err(Error::InvalidPartition {
            detail: "aligned and misaligned masks do not cover the garment mask".into(),
        });
    }
    let has_misaligned = !misaligned.is_empty();
    if has_misaligned && aligned.is_empty() {
        return Err(Error::EmptyAlignedRegion);
    }

    let (c_n, h, w) = features.shape();
    let mut out = FeatureMap::new(c_n, h, w);

    // Per-channel mean over the aligned region, accumulated in f64.
    let mut means = vec![0.0f64; c_n];
    if has_misaligned {
        let count = aligned.count_ones() as f64;
        for c in 0..c_n {
            let mut sum = 0.0f64;
            for y in 0..h {
                for x in 0..w {
                    if aligned.get(x, y) {
                        sum += features.get(c, y, x) as f64;
                    }
                }
            }
            means[c] = sum / count;
        }
    }

    for c in 0..c_n {
        for y in 0..h {
            for x in 0..w {
                let v = if !garment.get(x, y) {
                    0.0
                } else if misaligned.get(x, y) {
                    means[c] as f32
                } else {
                    features.get(c, y, x)
                };
                out.set(c, y, x, v);
            }
        }
    }
    Ok(out)
}

/// Per-channel standardization followed by an element-wise affine transform
/// with spatially varying gamma and beta maps.
///
/// For each channel the mean and population standard deviation are taken
/// over H×W; the output is `gamma * (h - mean) / (std + eps) + beta`.
pub fn spatially_adaptive_modulate(
    h: &FeatureMap,
    gamma: &FeatureMap,
    beta: &FeatureMap,
    eps: f64,
) -> Result<FeatureMap> {
    if gamma.shape() != h.shape() {
        return Err(Error::ShapeMismatch {
            expected: h.shape(),
            got: gamma.shape(),
        });
    }
    if beta.shape() != h.shape() {
        return Err(Error::ShapeMismatch {
            expected: h.shape(),
            got: beta.shape(),
        });
    }
    assert!(eps > 0.0, "eps must be positive");

    let (c_n, hh, ww) = h.shape();
    let n = (hh as usize * ww as usize) as f64;
    let mut out = FeatureMap::new(c_n, hh, ww);
    for c in 0..c_n {
        let mut sum = 0.0f64;
        for y in 0..hh {
            for x in 0..ww {
                sum += h.get(c, y, x) as f64;
            }
        }
        let mean = sum / n;
        let mut var = 0.0f64;
        for y in 0..hh {
            for x in 0..ww {
                let d = h.get(c, y, x) as f64 - mean;
                var += d * d;
            }
        }
        let std = (var / n).sqrt();
        for y in 0..hh {
            for x in 0..ww {
                let standardized = (h.get(c, y, x) as f64 - mean) / (std + eps);
                let v = gamma.get(c, y, x) as f64 * standardized + beta.get(c, y, x) as f64;
                out.set(c, y, x, v as f32);
            }
        }
    }
    Ok(out)
}

/// Default stabilizer added to the standard deviation.
pub const MODULATION_EPS: f64 = 1e-5;
