//! 8-bit raster images with bilinear sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 8-bit image with 1, 3, or 4 interleaved channels. An alpha
/// channel, when present, marks pixel validity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RasterImage {
    width: u32,
    height: u32,
    channels: u8,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: u32, height: u32, channels: u8) -> Self {
        assert!(matches!(channels, 1 | 3 | 4), "channels must be 1, 3, or 4");
        RasterImage {
            width,
            height,
            channels,
            pixels: vec![0; width as usize * height as usize * channels as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, channels: u8, pixels: Vec<u8>) -> Result<Self> {
        assert!(matches!(channels, 1 | 3 | 4), "channels must be 1, 3, or 4");
        let expected = width as usize * height as usize * channels as usize;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: (expected as u32, 1),
                got: (pixels.len() as u32, 1),
            });
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        channels: u8,
        mut f: impl FnMut(u32, u32) -> [u8; 4],
    ) -> Self {
        let mut img = RasterImage::new(width, height, channels);
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                img.put(x, y, &px[..channels as usize]);
            }
        }
        img
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

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    /// The pixel's channels, padded with 0 (and alpha 255 for 1/3-channel
    /// images) to RGBA.
    #[inline]
    pub fn get_rgba(&self, x: u32, y: u32) -> [u8; 4] {
        let o = self.offset(x, y);
        match self.channels {
            1 => {
                let g = self.pixels[o];
                [g, g, g, 255]
            }
            3 => [self.pixels[o], self.pixels[o + 1], self.pixels[o + 2], 255],
            _ => [
                self.pixels[o],
                self.pixels[o + 1],
                self.pixels[o + 2],
                self.pixels[o + 3],
            ],
        }
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, values: &[u8]) {
        let o = self.offset(x, y);
        self.pixels[o..o + values.len()].copy_from_slice(values);
    }

    #[inline]
    pub fn channel(&self, x: u32, y: u32, c: u8) -> u8 {
        self.pixels[self.offset(x, y) + c as usize]
    }

    /// Alpha at a pixel; 255 for images without an alpha channel.
    #[inline]
    pub fn alpha(&self, x: u32, y: u32) -> u8 {
        if self.channels == 4 {
            self.pixels[self.offset(x, y) + 3]
        } else {
            255
        }
    }

    /// Bilinear sample of one channel at a fractional position. Returns
    /// `None` outside `[0, w-1] x [0, h-1]`.
    pub fn sample_bilinear(&self, x: f64, y: f64, c: u8) -> Option<f64> {
        if !(0.0..=(self.width - 1) as f64).contains(&x)
            || !(0.0..=(self.height - 1) as f64).contains(&y)
        {
            return None;
        }
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let x0 = x0 as u32;
        let y0 = y0 as u32;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let v00 = self.channel(x0, y0, c) as f64;
        let v10 = self.channel(x1, y0, c) as f64;
        let v01 = self.channel(x0, y1, c) as f64;
        let v11 = self.channel(x1, y1, c) as f64;
        Some(v00 * (1.0 - fx) * (1.0 - fy) + v10 * fx * (1.0 - fy) + v01 * (1.0 - fx) * fy
            + v11 * fx * fy)
    }

    /// Mean absolute difference of the RGB channels over pixels selected by
    /// `select`. Returns `None` when no pixel is selected.
    pub fn mean_abs_diff_rgb(
        &self,
        other: &RasterImage,
        mut select: impl FnMut(u32, u32) -> bool,
    ) -> Option<f64> {
        assert_eq!(self.dimensions(), other.dimensions());
        let mut sum = 0.0f64;
        let mut n = 0u64;
        for y in 0..self.height {
            for x in 0..self.width {
                if !select(x, y) {
                    continue;
                }
                let a = self.get_rgba(x, y);
                let b = other.get_rgba(x, y);
                for c in 0..3 {
                    sum += (a[c] as f64 - b[c] as f64).abs();
                    n += 1;
                }
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum / n as f64 / 255.0)
        }
    }
}
