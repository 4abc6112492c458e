//! PNG readers and writers for rasters, masks, and parsing maps.
//!
//! Encoding settings are fixed so identical inputs always produce identical
//! bytes.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::BinaryMask;
use crate::parsing::{LabelTable, ParsingMap};
use crate::raster::RasterImage;

use super::atomic_write;

fn decode_error(path: &Path, e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::IoError(io) => Error::io(path, io),
        other => Error::CorruptArchive {
            path: path.to_path_buf(),
            detail: other.to_string(),
        },
    }
}

fn encode_error(path: &Path, e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::io(path, io),
        other => Error::CorruptArchive {
            path: path.to_path_buf(),
            detail: other.to_string(),
        },
    }
}

fn encode_png(
    width: u32,
    height: u32,
    color: png::ColorType,
    palette: Option<Vec<u8>>,
    data: &[u8],
) -> std::result::Result<Vec<u8>, png::EncodingError> {
    let mut bytes = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut bytes, width, height);
        encoder.set_color(color);
        encoder.set_depth(png::BitDepth::Eight);
        if let Some(p) = palette {
            encoder.set_palette(p);
        }
        let mut writer = encoder.write_header()?;
        writer.write_image_data(data)?;
        writer.finish()?;
    }
    Ok(bytes)
}

/// Writes a raster as an 8-bit gray / RGB / RGBA PNG.
pub fn save_raster_png(image: &RasterImage, path: &Path) -> Result<()> {
    let color = match image.channels() {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        _ => png::ColorType::Rgba,
    };
    let bytes = encode_png(image.width(), image.height(), color, None, image.pixels())
        .map_err(|e| encode_error(path, e))?;
    atomic_write(path, &bytes)
}

struct DecodedPng {
    width: u32,
    height: u32,
    color: png::ColorType,
    data: Vec<u8>,
}

fn read_png(path: &Path, keep_indexed: bool) -> Result<DecodedPng> {
    let file = File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile {
                path: path.to_path_buf(),
            }
        } else {
            Error::io(path, e)
        }
    })?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    if keep_indexed {
        decoder.set_transformations(png::Transformations::IDENTITY);
    } else {
        decoder.set_transformations(png::Transformations::normalize_to_color8());
    }
    let mut reader = decoder.read_info().map_err(|e| decode_error(path, e))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or_default()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| decode_error(path, e))?;
    buf.truncate(info.buffer_size());
    Ok(DecodedPng {
        width: info.width,
        height: info.height,
        color: info.color_type,
        data: buf,
    })
}

/// Reads an 8-bit gray / RGB / RGBA PNG into a raster.
pub fn load_raster_png(path: &Path) -> Result<RasterImage> {
    let png = read_png(path, false)?;
    let channels = match png.color {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        other => {
            return Err(Error::CorruptArchive {
                path: path.to_path_buf(),
                detail: format!("unsupported color type {other:?}"),
            })
        }
    };
    RasterImage::from_pixels(png.width, png.height, channels, png.data)
}

/// Writes a binary mask as a grayscale PNG with samples 0 and 255.
pub fn save_mask_png(mask: &BinaryMask, path: &Path) -> Result<()> {
    let data: Vec<u8> = mask.bits().iter().map(|&b| if b != 0 { 255 } else { 0 }).collect();
    let bytes = encode_png(
        mask.width(),
        mask.height(),
        png::ColorType::Grayscale,
        None,
        &data,
    )
    .map_err(|e| encode_error(path, e))?;
    atomic_write(path, &bytes)
}

/// Reads a binary mask; any sample other than 0 or 255 is an error rather
/// than a silent repair.
pub fn load_mask_png(path: &Path) -> Result<BinaryMask> {
    let png = read_png(path, false)?;
    if png.color != png::ColorType::Grayscale {
        return Err(Error::CorruptArchive {
            path: path.to_path_buf(),
            detail: format!("mask PNG must be grayscale, got {:?}", png.color),
        });
    }
    if let Some(bad) = png.data.iter().find(|&&v| v != 0 && v != 255) {
        return Err(Error::CorruptArchive {
            path: path.to_path_buf(),
            detail: format!("non-binary mask sample {bad}"),
        });
    }
    BinaryMask::from_bits(png.width, png.height, png.data)
}

/// Deterministic palette color for a parsing label.
fn palette_color(label: u8) -> [u8; 3] {
    if label == 0 {
        return [0, 0, 0];
    }
    // Spread hues with the golden-ratio increment.
    let hue = (label as f64 * 0.618_033_988_749_895) % 1.0;
    let sector = (hue * 6.0).floor() as u32 % 6;
    let f = hue * 6.0 - (hue * 6.0).floor();
    let (v, p, q, t) = (230u8, 40u8, (230.0 - 190.0 * f) as u8, (40.0 + 190.0 * f) as u8);
    match sector {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Writes a parsing map as an indexed 8-bit PNG whose palette index is the
/// raw label.
pub fn save_parsing_png(parsing: &ParsingMap, path: &Path) -> Result<()> {
    let max_label = parsing.labels().iter().copied().max().unwrap_or(0);
    let mut palette = Vec::with_capacity((max_label as usize + 1) * 3);
    for label in 0..=max_label {
        palette.extend_from_slice(&palette_color(label));
    }
    let bytes = encode_png(
        parsing.width(),
        parsing.height(),
        png::ColorType::Indexed,
        Some(palette),
        parsing.labels(),
    )
    .map_err(|e| encode_error(path, e))?;
    atomic_write(path, &bytes)
}

/// Reads a parsing map from an indexed or grayscale 8-bit PNG; samples are
/// raw labels, validated against the table.
pub fn load_parsing_png(path: &Path, table: LabelTable) -> Result<ParsingMap> {
    let png = read_png(path, true)?;
    match png.color {
        png::ColorType::Indexed | png::ColorType::Grayscale => {}
        other => {
            return Err(Error::CorruptArchive {
                path: path.to_path_buf(),
                detail: format!("parsing PNG must be indexed or grayscale, got {other:?}"),
            })
        }
    }
    ParsingMap::new(png.width, png.height, png.data, table)
}
