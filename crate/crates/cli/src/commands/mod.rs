pub mod batch;
pub mod decompose;
pub mod edit;
pub mod inspect;
pub mod masks;
pub mod retarget;

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use patchwarp::io::PersonRecord;
use patchwarp::layout::GarmentCategory;
use patchwarp::parsing::{infer_category, DetectedCategory};
use patchwarp::warp::PatchSet;

use crate::diag;

/// Category argument: explicit or inferred from the parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CategoryArg {
    Auto,
    Upper,
    Lower,
    Dress,
}

/// Resolves the category, warning when an upper+lower wardrobe forces a
/// choice.
pub fn resolve_category(arg: CategoryArg, person: &PersonRecord) -> Result<GarmentCategory> {
    Ok(match arg {
        CategoryArg::Upper => GarmentCategory::Upper,
        CategoryArg::Lower => GarmentCategory::Lower,
        CategoryArg::Dress => GarmentCategory::Dress,
        CategoryArg::Auto => match infer_category(&person.parsing)? {
            DetectedCategory::Upper => GarmentCategory::Upper,
            DetectedCategory::Lower => GarmentCategory::Lower,
            DetectedCategory::Dress => GarmentCategory::Dress,
            DetectedCategory::UpperAndLower => {
                diag::emit_warning(
                    "AmbiguousCategory",
                    &format!(
                        "{}: wears both upper and lower garments; decomposing the upper",
                        person.id
                    ),
                );
                GarmentCategory::Upper
            }
        },
    })
}

/// Serializable per-slot homography report for a retargeted garment.
pub fn homography_report(
    set: &PatchSet,
    info: &patchwarp::warp::RetargetInfo,
) -> Result<serde_json::Value> {
    let mut slots = BTreeMap::new();
    for (slot, h_norm_to_target) in &info.h_norm_to_target {
        let patch = &set.patches[slot];
        let source_to_target =
            patchwarp::geometry::compose(h_norm_to_target, &patch.h_source_to_norm)?;
        slots.insert(
            slot.name(),
            serde_json::json!({
                "norm_to_target": h_norm_to_target,
                "source_to_norm": patch.h_source_to_norm,
                "source_to_target": source_to_target,
            }),
        );
    }
    Ok(serde_json::json!({ "slots": slots }))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    patchwarp::io::atomic_write(path, &bytes)?;
    Ok(())
}
