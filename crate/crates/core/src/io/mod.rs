//! Loading and validation of external inputs, and serialization of every
//! artifact with bit-exact round trips.
//!
//! A person directory holds `image.png`, `pose.json`, `parsing.png`, and
//! `labels.json`; patch sets live in archive directories with a digest-
//! carrying manifest; feature maps use a small binary format. All byte
//! layouts are documented in FORMATS.md at the repository root. Writes go
//! through a temp-file-and-rename so partially written artifacts are never
//! observed.

mod archive;
mod feature_io;
mod png_codec;

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

pub use archive::{load_patchset, save_patchset, ARCHIVE_FORMAT_VERSION, MANIFEST_NAME};
pub use feature_io::{load_feature_map, save_feature_map, FEATURE_MAGIC};
pub use png_codec::{
    load_mask_png, load_parsing_png, load_raster_png, save_mask_png, save_parsing_png,
    save_raster_png,
};

use crate::error::{Error, Result};
use crate::parsing::{LabelTable, ParsingMap, SemanticClass};
use crate::pose::PoseSkeleton;
use crate::raster::RasterImage;
use crate::warp::WarpedGarment;

pub const IMAGE_FILE: &str = "image.png";
pub const POSE_FILE: &str = "pose.json";
pub const PARSING_FILE: &str = "parsing.png";
pub const LABELS_FILE: &str = "labels.json";

/// Lowercase hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Writes bytes to a temp file in the target directory, then renames it
/// into place.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("artifact");
    let tmp = dir.join(format!(".{}.{}.tmp", name, std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// One person's inputs: image, pose, and parsing with agreeing dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonRecord {
    pub id: String,
    pub image: RasterImage,
    pub pose: PoseSkeleton,
    pub parsing: ParsingMap,
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    Ok(())
}

/// Reads and validates a pose JSON file.
pub fn load_pose(path: &Path) -> Result<PoseSkeleton> {
    require_file(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::MalformedJson {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

pub fn save_pose(pose: &PoseSkeleton, path: &Path) -> Result<()> {
    let mut json = serde_json::to_vec_pretty(pose).expect("pose serializes");
    json.push(b'\n');
    atomic_write(path, &json)
}

/// Reads a label table: a JSON object mapping decimal label strings to
/// semantic class names.
pub fn load_label_table(path: &Path) -> Result<LabelTable> {
    require_file(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let wire: BTreeMap<String, SemanticClass> =
        serde_json::from_slice(&bytes).map_err(|e| Error::MalformedJson {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    let mut classes = BTreeMap::new();
    for (key, class) in wire {
        let label: u8 = key.parse().map_err(|_| Error::MalformedJson {
            path: path.to_path_buf(),
            detail: format!("label key {key:?} is not an 8-bit integer"),
        })?;
        classes.insert(label, class);
    }
    Ok(LabelTable::new(classes))
}

pub fn save_label_table(table: &LabelTable, path: &Path) -> Result<()> {
    let wire: BTreeMap<String, SemanticClass> = table
        .labels()
        .map(|(label, class)| (label.to_string(), class))
        .collect();
    let mut json = serde_json::to_vec_pretty(&wire).expect("label table serializes");
    json.push(b'\n');
    atomic_write(path, &json)
}

/// Loads a person directory, enforcing every dimension and label invariant.
pub fn load_person(dir: &Path) -> Result<PersonRecord> {
    let image_path = dir.join(IMAGE_FILE);
    let pose_path = dir.join(POSE_FILE);
    let parsing_path = dir.join(PARSING_FILE);
    let labels_path = dir.join(LABELS_FILE);
    require_file(&image_path)?;
    require_file(&pose_path)?;
    require_file(&parsing_path)?;
    require_file(&labels_path)?;

    let image = load_raster_png(&image_path)?;
    let pose = load_pose(&pose_path)?;
    let table = load_label_table(&labels_path)?;
    let parsing = load_parsing_png(&parsing_path, table)?;

    if parsing.dimensions() != image.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: image.dimensions(),
            got: parsing.dimensions(),
        });
    }
    if pose.canvas() != image.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: image.dimensions(),
            got: pose.canvas(),
        });
    }

    let id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "person".to_string());
    Ok(PersonRecord {
        id,
        image,
        pose,
        parsing,
    })
}

/// Writes a person record into a directory in the layout `load_person`
/// expects.
pub fn save_person(record: &PersonRecord, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_raster_png(&record.image, &dir.join(IMAGE_FILE))?;
    save_pose(&record.pose, &dir.join(POSE_FILE))?;
    save_parsing_png(&record.parsing, &dir.join(PARSING_FILE))?;
    save_label_table(record.parsing.table(), &dir.join(LABELS_FILE))
}

/// Writes a warped garment as `<stem>.png` plus `<stem>.mask.png`.
pub fn save_warped_garment(garment: &WarpedGarment, dir: &Path, stem: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_raster_png(&garment.image, &dir.join(format!("{stem}.png")))?;
    save_mask_png(&garment.mask, &dir.join(format!("{stem}.mask.png")))
}

pub fn load_warped_garment(dir: &Path, stem: &str) -> Result<WarpedGarment> {
    let image = load_raster_png(&dir.join(format!("{stem}.png")))?;
    let mask = load_mask_png(&dir.join(format!("{stem}.mask.png")))?;
    if mask.dimensions() != image.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: image.dimensions(),
            got: mask.dimensions(),
        });
    }
    Ok(WarpedGarment { image, mask })
}
