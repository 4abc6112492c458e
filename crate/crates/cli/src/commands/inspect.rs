//! `inspect`: print a human-readable summary of any artifact this tool
//! produces or consumes.

use std::path::Path;

use anyhow::{bail, Result};
use patchwarp::io::{
    load_feature_map, load_mask_png, load_patchset, load_person, load_raster_png, MANIFEST_NAME,
    POSE_FILE,
};

pub fn run(path: &Path) -> Result<()> {
    if path.is_dir() {
        if path.join(MANIFEST_NAME).is_file() {
            return inspect_archive(path);
        }
        if path.join(POSE_FILE).is_file() {
            return inspect_person(path);
        }
        bail!(
            "directory {} is neither a patch archive nor a person directory",
            path.display()
        );
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("fmap") => inspect_feature_map(path),
        Some("png") => inspect_png(path),
        _ => bail!("cannot inspect {}", path.display()),
    }
}

fn inspect_archive(path: &Path) -> Result<()> {
    let set = load_patchset(path)?;
    println!("patch archive {}", path.display());
    println!("  category: {}", set.category);
    println!("  source canvas: {:?}", set.source_pose.canvas());
    println!("  slots ({}):", set.patches.len());
    for (slot, patch) in &set.patches {
        println!(
            "    {:<16} valid {:>5} px, quad area {:>9.1} px^2",
            slot.name(),
            patch.valid_mask.count_ones(),
            patch.source_quad.area(),
        );
    }
    Ok(())
}

fn inspect_person(path: &Path) -> Result<()> {
    let person = load_person(path)?;
    println!("person {}", person.id);
    println!("  canvas: {:?}", person.image.dimensions());
    println!("  channels: {}", person.image.channels());
    let confident = person
        .pose
        .joints()
        .iter()
        .filter(|(_, c)| *c >= 0.2)
        .count();
    println!("  confident joints: {confident}/18");
    match patchwarp::parsing::infer_category(&person.parsing) {
        Ok(category) => println!("  detected garments: {category:?}"),
        Err(err) => println!("  detected garments: none ({err})"),
    }
    Ok(())
}

fn inspect_feature_map(path: &Path) -> Result<()> {
    let map = load_feature_map(path)?;
    let (c, h, w) = map.shape();
    let mut min = f32::INFINITY;
    let mut max = f32::NEG_INFINITY;
    for &v in map.values() {
        min = min.min(v);
        max = max.max(v);
    }
    println!("feature map {}", path.display());
    println!("  shape: {c}x{h}x{w}");
    println!("  value range: [{min}, {max}]");
    Ok(())
}

fn inspect_png(path: &Path) -> Result<()> {
    // Try the stricter mask reader first, fall back to a plain raster.
    if let Ok(mask) = load_mask_png(path) {
        println!("binary mask {}", path.display());
        println!("  size: {:?}", mask.dimensions());
        println!("  set pixels: {}", mask.count_ones());
        return Ok(());
    }
    let image = load_raster_png(path)?;
    println!("image {}", path.display());
    println!("  size: {:?}", image.dimensions());
    println!("  channels: {}", image.channels());
    Ok(())
}
