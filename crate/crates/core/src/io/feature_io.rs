//! Flat binary feature-map files: a 16-byte header (magic `FMP1`, then C,
//! H, W as little-endian u32) followed by little-endian f32 values,
//! row-major per channel.

use std::path::Path;

use crate::error::{Error, Result};
use crate::feature::FeatureMap;

use super::atomic_write;

pub const FEATURE_MAGIC: [u8; 4] = *b"FMP1";

pub fn save_feature_map(map: &FeatureMap, path: &Path) -> Result<()> {
    let (c, h, w) = map.shape();
    let mut bytes = Vec::with_capacity(16 + map.values().len() * 4);
    bytes.extend_from_slice(&FEATURE_MAGIC);
    bytes.extend_from_slice(&(c as u32).to_le_bytes());
    bytes.extend_from_slice(&h.to_le_bytes());
    bytes.extend_from_slice(&w.to_le_bytes());
    for v in map.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    atomic_write(path, &bytes)
}

pub fn load_feature_map(path: &Path) -> Result<FeatureMap> {
    let bytes = std::fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile {
                path: path.to_path_buf(),
            }
        } else {
            Error::io(path, e)
        }
    })?;
    let corrupt = |detail: String| Error::CorruptArchive {
        path: path.to_path_buf(),
        detail,
    };
    if bytes.len() < 16 {
        return Err(corrupt("shorter than the 16-byte header".into()));
    }
    if bytes[..4] != FEATURE_MAGIC {
        return Err(corrupt(format!("bad magic {:?}", &bytes[..4])));
    }
    let read_u32 = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let c = read_u32(4) as usize;
    let h = read_u32(8);
    let w = read_u32(12);
    let count = c * h as usize * w as usize;
    if bytes.len() != 16 + count * 4 {
        return Err(corrupt(format!(
            "payload is {} bytes, expected {} for {c}x{h}x{w}",
            bytes.len() - 16,
            count * 4
        )));
    }
    let values: Vec<f32> = bytes[16..]
        .chunks_exact(4)
        .map(|chunk| f32::from_le_bytes(chunk.try_into().unwrap()))
        .collect();
    FeatureMap::from_values(c, h, w, values)
        .map_err(|e| corrupt(format!("invalid feature values: {e}")))
}
