//! Patch-set archives: a directory with a manifest, one RGBA PNG and one
//! mask PNG per slot, and a SHA-256 digest per member file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Quadrilateral;
use crate::layout::{GarmentCategory, PatchSlot};
use crate::pose::PoseSkeleton;
use crate::warp::{NormalizedPatch, PatchSet, TEMPLATE_SIZE};

use super::png_codec::{load_mask_png, load_raster_png, save_mask_png, save_raster_png};
use super::{atomic_write, sha256_hex};

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    category: GarmentCategory,
    source_pose: PoseSkeleton,
    slots: BTreeMap<String, SlotEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SlotEntry {
    source_quad: Quadrilateral,
    h_source_to_norm: crate::geometry::Homography,
    image: String,
    image_sha256: String,
    valid_mask: String,
    valid_mask_sha256: String,
}

fn corrupt(dir: &Path, detail: impl Into<String>) -> Error {
    Error::CorruptArchive {
        path: dir.to_path_buf(),
        detail: detail.into(),
    }
}

/// Writes a patch set. Existing member files are overwritten; the manifest
/// is canonical JSON so identical sets produce identical bytes.
pub fn save_patchset(set: &PatchSet, dir: &Path) -> Result<()> {
    set.validate()?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut slots = BTreeMap::new();
    for (slot, patch) in &set.patches {
        let image_name = format!("{}.png", slot.name());
        let mask_name = format!("{}.mask.png", slot.name());
        let image_path = dir.join(&image_name);
        let mask_path = dir.join(&mask_name);
        save_raster_png(&patch.image, &image_path)?;
        save_mask_png(&patch.valid_mask, &mask_path)?;
        let image_bytes = std::fs::read(&image_path).map_err(|e| Error::io(&image_path, e))?;
        let mask_bytes = std::fs::read(&mask_path).map_err(|e| Error::io(&mask_path, e))?;
        slots.insert(
            slot.name().to_string(),
            SlotEntry {
                source_quad: patch.source_quad,
                h_source_to_norm: patch.h_source_to_norm,
                image: image_name,
                image_sha256: sha256_hex(&image_bytes),
                valid_mask: mask_name,
                valid_mask_sha256: sha256_hex(&mask_bytes),
            },
        );
    }
    let manifest = Manifest {
        format_version: ARCHIVE_FORMAT_VERSION,
        category: set.category,
        source_pose: set.source_pose.clone(),
        slots,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    atomic_write(&dir.join(MANIFEST_NAME), &json)
}

/// Loads a patch set, verifying digests and every patch invariant.
pub fn load_patchset(dir: &Path) -> Result<PatchSet> {
    let manifest_path = dir.join(MANIFEST_NAME);
    let bytes = std::fs::read(&manifest_path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile {
                path: manifest_path.clone(),
            }
        } else {
            Error::io(&manifest_path, e)
        }
    })?;
    let manifest: Manifest =
        serde_json::from_slice(&bytes).map_err(|e| Error::MalformedJson {
            path: manifest_path.clone(),
            detail: e.to_string(),
        })?;
    if manifest.format_version != ARCHIVE_FORMAT_VERSION {
        return Err(corrupt(
            dir,
            format!("unsupported format_version {}", manifest.format_version),
        ));
    }

    let mut patches = BTreeMap::new();
    for (name, entry) in &manifest.slots {
        let slot = PatchSlot::from_name(name)
            .ok_or_else(|| corrupt(dir, format!("unknown slot name {name:?}")))?;
        if !manifest.category.slots().contains(&slot) {
            return Err(corrupt(
                dir,
                format!("slot {name} not allowed in a {} archive", manifest.category),
            ));
        }

        let image_path = dir.join(&entry.image);
        let image_bytes = std::fs::read(&image_path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                corrupt(dir, format!("member file {} missing", entry.image))
            } else {
                Error::io(&image_path, e)
            }
        })?;
        if sha256_hex(&image_bytes) != entry.image_sha256 {
            return Err(corrupt(dir, format!("digest mismatch for {}", entry.image)));
        }
        let mask_path = dir.join(&entry.valid_mask);
        let mask_bytes = std::fs::read(&mask_path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                corrupt(dir, format!("member file {} missing", entry.valid_mask))
            } else {
                Error::io(&mask_path, e)
            }
        })?;
        if sha256_hex(&mask_bytes) != entry.valid_mask_sha256 {
            return Err(corrupt(
                dir,
                format!("digest mismatch for {}", entry.valid_mask),
            ));
        }

        let image = load_raster_png(&image_path)?;
        let valid_mask = load_mask_png(&mask_path)?;
        if image.dimensions() != (TEMPLATE_SIZE, TEMPLATE_SIZE) || image.channels() != 4 {
            return Err(corrupt(
                dir,
                format!("{} is not a 128x128 RGBA template", entry.image),
            ));
        }
        if valid_mask.dimensions() != (TEMPLATE_SIZE, TEMPLATE_SIZE) {
            return Err(corrupt(
                dir,
                format!("{} is not a 128x128 mask", entry.valid_mask),
            ));
        }
        for y in 0..TEMPLATE_SIZE {
            for x in 0..TEMPLATE_SIZE {
                if valid_mask.get(x, y) && image.alpha(x, y) == 0 {
                    return Err(corrupt(
                        dir,
                        format!("{name}: valid mask exceeds alpha coverage at ({x},{y})"),
                    ));
                }
            }
        }

        patches.insert(
            slot,
            NormalizedPatch {
                slot,
                image,
                source_quad: entry.source_quad,
                h_source_to_norm: entry.h_source_to_norm,
                valid_mask,
            },
        );
    }

    let set = PatchSet {
        category: manifest.category,
        patches,
        source_pose: manifest.source_pose,
    };
    set.validate()?;
    Ok(set)
}
