//! `decompose`: pose-guided segmentation and patch normalization of one
//! person's garment into an archive.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use patchwarp::io::{load_person, save_patchset};
use patchwarp::layout::build_layout;
use patchwarp::parsing::garment_mask;
use patchwarp::warp::{normalize_patch, PatchSet};

use crate::commands::{resolve_category, CategoryArg};
use crate::config::RunConfig;
use crate::diag;

pub fn run(
    person_dir: &Path,
    out_archive: &Path,
    category: CategoryArg,
    config: &RunConfig,
) -> Result<()> {
    let person = load_person(person_dir)?;
    let set = decompose_person(&person, category, config)?;
    save_patchset(&set, out_archive)?;
    println!(
        "decomposed {} into {} ({} {} slots)",
        person.id,
        out_archive.display(),
        set.patches.len(),
        set.category,
    );
    Ok(())
}

pub fn decompose_person(
    person: &patchwarp::io::PersonRecord,
    category: CategoryArg,
    config: &RunConfig,
) -> Result<PatchSet> {
    let category = resolve_category(category, person)?;
    let garment = garment_mask(&person.parsing, category)?;
    let layout = build_layout(&person.pose, category, &config.layout)?;

    for slot in category.slots() {
        if !layout.is_present(*slot) {
            diag::emit_warning(
                "SlotDropped",
                &format!("{}: slot {} has no usable quad", person.id, slot.name()),
            );
        }
    }

    let mut patches = BTreeMap::new();
    for (slot, quad) in &layout.quads {
        patches.insert(
            *slot,
            normalize_patch(&person.image, quad, *slot, &garment)?,
        );
    }
    Ok(PatchSet {
        category,
        patches,
        source_pose: person.pose.clone(),
    })
}
