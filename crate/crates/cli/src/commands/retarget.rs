//! `retarget`: render an archived patch set onto a target person's pose,
//! stitch, and optionally apply the random erase.

use std::path::Path;

use anyhow::Result;
use patchwarp::erase::random_erase;
use patchwarp::io::{load_patchset, load_person, save_warped_garment};
use patchwarp::layout::build_layout;
use patchwarp::warp::{retarget_set, PatchSet, RetargetInfo, WarpedGarment};

use crate::commands::{homography_report, write_json};
use crate::config::RunConfig;

pub struct RetargetOutcome {
    pub set: PatchSet,
    pub warped: WarpedGarment,
    pub info: RetargetInfo,
}

/// The retarget pipeline on loaded inputs; canvas falls back to the target
/// person's canvas unless overridden.
pub fn retarget_to_person(
    set: PatchSet,
    target: &patchwarp::io::PersonRecord,
    config: &RunConfig,
    canvas_override: Option<(u32, u32)>,
    erase_seed: u64,
    alpha: f64,
) -> Result<RetargetOutcome> {
    let layout = build_layout(&target.pose, set.category, &config.layout)?;
    let canvas = canvas_override.unwrap_or_else(|| target.pose.canvas());
    let z_order = config.z_order_slots();
    let (mut warped, info) = retarget_set(&set, &layout.quads, canvas, &z_order)?;
    if alpha > 0.0 {
        warped = random_erase(&warped, erase_seed, alpha, &config.erase);
    }
    Ok(RetargetOutcome { set, warped, info })
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    archive: &Path,
    target_dir: &Path,
    out_dir: &Path,
    config: &RunConfig,
    canvas_override: Option<(u32, u32)>,
    erase_seed: Option<u64>,
    alpha: Option<f64>,
) -> Result<()> {
    let set = load_patchset(archive)?;
    let target = load_person(target_dir)?;
    let outcome = retarget_to_person(
        set,
        &target,
        config,
        canvas_override,
        erase_seed.unwrap_or(config.seed),
        alpha.unwrap_or(config.alpha),
    )?;
    std::fs::create_dir_all(out_dir)?;
    save_warped_garment(&outcome.warped, out_dir, "warped")?;
    let report = homography_report(&outcome.set, &outcome.info)?;
    write_json(&out_dir.join("homographies.json"), &report)?;
    println!(
        "retargeted {} slots onto {} -> {}",
        outcome.info.target_quads.len(),
        target.id,
        out_dir.display(),
    );
    Ok(())
}
