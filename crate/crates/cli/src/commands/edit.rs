//! `edit`: apply a JSON edit script to a try-on bundle, writing edited
//! archives and a composite preview.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use patchwarp::edit::{
    local_shape_edit, set_dressing_order, DressedLayer, DressingOrder, EditCommand, TrimEnd,
    TryOnBundle,
};
use patchwarp::io::{load_patchset, load_person, save_patchset, save_raster_png};
use patchwarp::layout::PatchSlot;
use patchwarp::raster::RasterImage;
use serde::Deserialize;

use crate::config::RunConfig;

/// Which bundle layer a patch-level command addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
enum LayerArg {
    #[default]
    Upper,
    Lower,
}

/// Wire form of one script command.
#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum WireCommand {
    SetDressingOrder {
        order: DressingOrder,
    },
    TrimPatch {
        #[serde(default)]
        layer: LayerArg,
        slot: String,
        fraction: f64,
        #[serde(default)]
        end: TrimEnd,
    },
    DropPatch {
        #[serde(default)]
        layer: LayerArg,
        slot: String,
    },
    ReplacePatch {
        #[serde(default)]
        layer: LayerArg,
        slot: String,
        donor: PathBuf,
    },
}

fn parse_slot(name: &str) -> Result<PatchSlot> {
    PatchSlot::from_name(name).with_context(|| format!("unknown slot {name:?}"))
}

pub fn run(
    upper_archive: Option<&Path>,
    lower_archive: Option<&Path>,
    target_dir: &Path,
    script_path: &Path,
    out_dir: &Path,
    config: &RunConfig,
) -> Result<()> {
    let target = load_person(target_dir)?;
    let script_text = std::fs::read_to_string(script_path)
        .with_context(|| format!("reading script {}", script_path.display()))?;
    let script: Vec<WireCommand> = serde_json::from_str(&script_text)
        .with_context(|| format!("parsing script {}", script_path.display()))?;

    let load_layer = |path: Option<&Path>| -> Result<Option<DressedLayer>> {
        match path {
            None => Ok(None),
            Some(p) => {
                let set = load_patchset(p)?;
                Ok(Some(DressedLayer::from_set(set, &target.pose, &config.layout)?))
            }
        }
    };
    let mut bundle = TryOnBundle::new(
        load_layer(upper_archive)?,
        load_layer(lower_archive)?,
        target.pose.clone(),
    )?;

    let mut order_was_set = false;
    for command in &script {
        match command {
            WireCommand::SetDressingOrder { order } => {
                bundle = set_dressing_order(&bundle, *order)?;
                order_was_set = true;
            }
            WireCommand::TrimPatch {
                layer,
                slot,
                fraction,
                end,
            } => {
                apply_to_layer(&mut bundle, *layer, config, |patches| {
                    local_shape_edit(
                        patches,
                        &EditCommand::TrimPatch {
                            slot: parse_slot(slot)?,
                            fraction: *fraction,
                            end: *end,
                        },
                    )
                    .map_err(Into::into)
                })?;
            }
            WireCommand::DropPatch { layer, slot } => {
                apply_to_layer(&mut bundle, *layer, config, |patches| {
                    local_shape_edit(
                        patches,
                        &EditCommand::DropPatch {
                            slot: parse_slot(slot)?,
                        },
                    )
                    .map_err(Into::into)
                })?;
            }
            WireCommand::ReplacePatch { layer, slot, donor } => {
                let donor_set = load_patchset(donor)?;
                apply_to_layer(&mut bundle, *layer, config, |patches| {
                    local_shape_edit(
                        patches,
                        &EditCommand::ReplacePatch {
                            slot: parse_slot(slot)?,
                            donor: donor_set.clone(),
                        },
                    )
                    .map_err(Into::into)
                })?;
            }
        }
    }

    // Export: the dressing order is materialized into the written archives
    // only when the script set one, so a no-op script round-trips inputs
    // byte for byte.
    let (upper_out, lower_out) = if order_was_set {
        bundle.materialize()?
    } else {
        (bundle.upper.clone(), bundle.lower.clone())
    };

    std::fs::create_dir_all(out_dir)?;
    if let Some(layer) = &upper_out {
        save_patchset(&layer.patches, &out_dir.join("upper"))?;
    }
    if let Some(layer) = &lower_out {
        save_patchset(&layer.patches, &out_dir.join("lower"))?;
    }

    let preview = render_preview(&bundle, &target.image)?;
    save_raster_png(&preview, &out_dir.join("preview.png"))?;
    println!(
        "edited bundle written to {} ({} commands applied)",
        out_dir.display(),
        script.len(),
    );
    Ok(())
}

fn apply_to_layer(
    bundle: &mut TryOnBundle,
    layer: LayerArg,
    config: &RunConfig,
    f: impl FnOnce(&patchwarp::warp::PatchSet) -> Result<patchwarp::warp::PatchSet>,
) -> Result<()> {
    let target_pose = bundle.target_pose.clone();
    let slot = match layer {
        LayerArg::Upper => &mut bundle.upper,
        LayerArg::Lower => &mut bundle.lower,
    };
    let Some(existing) = slot.take() else {
        bail!(patchwarp::Error::MissingLayer {
            layer: match layer {
                LayerArg::Upper => "upper",
                LayerArg::Lower => "lower",
            }
        });
    };
    let edited = f(&existing.patches)?;
    *slot = Some(DressedLayer::from_set(edited, &target_pose, &config.layout)?);
    Ok(())
}

/// Composite preview: the bundle rendering pasted over the target image.
fn render_preview(bundle: &TryOnBundle, target_image: &RasterImage) -> Result<RasterImage> {
    let composite = bundle.composite()?;
    let (w, h) = target_image.dimensions();
    let mut out = RasterImage::new(w, h, 3);
    for y in 0..h {
        for x in 0..w {
            let px = if composite.mask.get(x, y) {
                composite.image.get_rgba(x, y)
            } else {
                target_image.get_rgba(x, y)
            };
            out.put(x, y, &px[..3]);
        }
    }
    Ok(out)
}
