//! Binary masks and the misalignment mask algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One bit per pixel, stored as 0/1 bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![0; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (bits.len() as u32, 1),
            });
        }
        let bits = bits.into_iter().map(|b| (b != 0) as u8).collect();
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut m = BinaryMask::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn filled(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![1; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize] != 0
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value as u8;
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    fn check_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                expected: self.dimensions(),
                got: other.dimensions(),
            });
        }
        Ok(())
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(a, b)| a & b)
            .collect();
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(a, b)| a | b)
            .collect();
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    /// Set difference `self ∧ ¬other`.
    pub fn minus(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        let bits = self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(a, b)| a & !b & 1)
            .collect();
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits,
        })
    }

    pub fn intersection_count(&self, other: &BinaryMask) -> Result<u64> {
        self.check_dims(other)?;
        Ok(self
            .bits
            .iter()
            .zip(other.bits.iter())
            .map(|(a, b)| (a & b) as u64)
            .sum())
    }

    /// Intersection over union; 1.0 when both masks are empty.
    pub fn iou(&self, other: &BinaryMask) -> Result<f64> {
        let inter = self.intersection_count(other)? as f64;
        let union = (self.count_ones() + other.count_ones()) as f64 - inter;
        if union == 0.0 {
            Ok(1.0)
        } else {
            Ok(inter / union)
        }
    }

    /// 4-neighborhood erosion by one pixel; border pixels erode.
    pub fn eroded(&self) -> BinaryMask {
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            if !self.get(x, y) {
                return false;
            }
            if x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height {
                return false;
            }
            self.get(x - 1, y) && self.get(x + 1, y) && self.get(x, y - 1) && self.get(x, y + 1)
        })
    }
}

/// Splits a garment mask against a warp-occupancy mask:
/// the aligned part is their intersection, the misaligned part is the
/// remainder of the garment mask. Exact bitwise.
pub fn misalignment_masks(
    garment: &BinaryMask,
    warped: &BinaryMask,
) -> Result<(BinaryMask, BinaryMask)> {
    let aligned = garment.and(warped)?;
    let misaligned = garment.minus(&aligned)?;
    Ok((aligned, misaligned))
}
