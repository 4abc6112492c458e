//! Patch-level garment editing: dressing-order control, local shape edits,
//! shape/texture transfer pairing, and outfit composition.
//!
//! Edits act on valid masks in normalized template space, never in canvas
//! space, so they survive retargeting through the patch homographies. A
//! try-on bundle keeps its layers pristine and applies the dressing order
//! when materializing or compositing, which makes order toggling an exact
//! involution on the rendered output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{apply_homography, estimate_homography_dlt, Point2, Quadrilateral};
use crate::io::PersonRecord;
use crate::layout::{build_layout, GarmentCategory, LayoutParams, PatchSlot};
use crate::parsing::{infer_category, DetectedCategory};
use crate::pose::PoseSkeleton;
use crate::warp::{
    retarget_set, warp_garment_with_info, PatchSet, WarpedGarment, DEFAULT_Z_ORDER,
    TEMPLATE_CORNERS, TEMPLATE_SIZE,
};

/// Whether the upper garment tucks into the lower one or hangs over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DressingOrder {
    TuckIn,
    TuckOut,
}

/// Which end of a patch's limb axis a trim keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrimEnd {
    #[default]
    Proximal,
    Distal,
}

/// A single edit command. Donor patch sets arrive already loaded; the CLI
/// resolves archive paths before building commands.
#[derive(Debug, Clone)]
pub enum EditCommand {
    SetDressingOrder(DressingOrder),
    TrimPatch {
        slot: PatchSlot,
        fraction: f64,
        end: TrimEnd,
    },
    DropPatch {
        slot: PatchSlot,
    },
    ReplacePatch {
        slot: PatchSlot,
        donor: PatchSet,
    },
}

/// Distance of a template pixel from the patch's proximal edge, measured
/// along the slot's limb axis in template space.
///
/// Limb patches run proximal-to-distal along +x; the torso runs
/// shoulders-to-hips along +y; the neck attaches at its bottom edge, so its
/// axis runs upward.
fn axis_distance(slot: PatchSlot, x: u32, y: u32) -> u32 {
    match slot {
        PatchSlot::Torso => y,
        PatchSlot::Neck => TEMPLATE_SIZE - 1 - y,
        _ => x,
    }
}

/// Applies a trim or drop to one patch, leaving every other patch
/// bit-identical.
pub fn local_shape_edit(patches: &PatchSet, cmd: &EditCommand) -> Result<PatchSet> {
    let mut out = patches.clone();
    match cmd {
        EditCommand::DropPatch { slot } => {
            if out.patches.remove(slot).is_none() {
                return Err(Error::SlotAbsent { slot: *slot });
            }
        }
        EditCommand::TrimPatch {
            slot,
            fraction,
            end,
        } => {
            let patch = out
                .patches
                .get_mut(slot)
                .ok_or(Error::SlotAbsent { slot: *slot })?;
            let keep = fraction.clamp(0.0, 1.0) * TEMPLATE_SIZE as f64;
            for y in 0..TEMPLATE_SIZE {
                for x in 0..TEMPLATE_SIZE {
                    if !patch.valid_mask.get(x, y) {
                        continue;
                    }
                    let d = axis_distance(*slot, x, y) as f64;
                    let kept = match end {
                        TrimEnd::Proximal => d < keep,
                        TrimEnd::Distal => d >= TEMPLATE_SIZE as f64 - keep,
                    };
                    if !kept {
                        patch.valid_mask.set(x, y, false);
                    }
                }
            }
        }
        EditCommand::ReplacePatch { slot, donor } => {
            if !out.category.slots().contains(slot) {
                return Err(Error::SlotAbsent { slot: *slot });
            }
            let donor_patch = donor
                .patches
                .get(slot)
                .ok_or(Error::SlotAbsent { slot: *slot })?;
            out.patches.insert(*slot, donor_patch.clone());
        }
        EditCommand::SetDressingOrder(_) => {
            return Err(Error::CategoryMismatch {
                detail: "dressing order applies to a bundle, not a patch set".into(),
            });
        }
    }
    Ok(out)
}

/// One retargeted garment layer: its normalized patches, the target quads
/// they render into, and the stitched result.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedLayer {
    pub patches: PatchSet,
    pub target_quads: BTreeMap<PatchSlot, Quadrilateral>,
    pub warped: WarpedGarment,
}

impl DressedLayer {
    /// Builds a layer by retargeting a patch set onto a target pose.
    pub fn from_set(
        patches: PatchSet,
        target_pose: &PoseSkeleton,
        params: &LayoutParams,
    ) -> Result<DressedLayer> {
        let layout = build_layout(target_pose, patches.category, params)?;
        let (warped, info) = retarget_set(
            &patches,
            &layout.quads,
            target_pose.canvas(),
            &DEFAULT_Z_ORDER,
        )?;
        Ok(DressedLayer {
            patches,
            target_quads: info.target_quads,
            warped,
        })
    }

    fn rerender(&self, patches: &PatchSet) -> Result<WarpedGarment> {
        let canvas = self.warped.dimensions();
        let (warped, _) = retarget_set(patches, &self.target_quads, canvas, &DEFAULT_Z_ORDER)?;
        Ok(warped)
    }
}

/// Upper and lower garment layers retargeted onto one pose, plus the
/// dressing order used when rendering them together.
#[derive(Debug, Clone, PartialEq)]
pub struct TryOnBundle {
    pub upper: Option<DressedLayer>,
    pub lower: Option<DressedLayer>,
    pub dressing_order: DressingOrder,
    pub target_pose: PoseSkeleton,
}

impl TryOnBundle {
    pub fn new(
        upper: Option<DressedLayer>,
        lower: Option<DressedLayer>,
        target_pose: PoseSkeleton,
    ) -> Result<TryOnBundle> {
        if upper.is_none() && lower.is_none() {
            return Err(Error::MissingLayer { layer: "upper" });
        }
        for layer in [&upper, &lower].into_iter().flatten() {
            if layer.warped.dimensions() != target_pose.canvas() {
                return Err(Error::CanvasMismatch {
                    expected: target_pose.canvas(),
                    got: layer.warped.dimensions(),
                });
            }
        }
        Ok(TryOnBundle {
            upper,
            lower,
            dressing_order: DressingOrder::TuckIn,
            target_pose,
        })
    }

    fn require_both(&self) -> Result<(&DressedLayer, &DressedLayer)> {
        let upper = self.upper.as_ref().ok_or(Error::MissingLayer { layer: "upper" })?;
        let lower = self.lower.as_ref().ok_or(Error::MissingLayer { layer: "lower" })?;
        Ok((upper, lower))
    }

    /// Materializes the dressing order into edited patch sets and
    /// re-rendered layers. Only the two torso valid masks can differ from
    /// the pristine layers.
    pub fn materialize(&self) -> Result<(Option<DressedLayer>, Option<DressedLayer>)> {
        let (Some(upper), Some(lower)) = (&self.upper, &self.lower) else {
            return Ok((self.upper.clone(), self.lower.clone()));
        };
        match self.dressing_order {
            DressingOrder::TuckIn => {
                let clipped = clip_upper_torso_below_waistline(upper, lower)?;
                let warped = upper.rerender(&clipped)?;
                Ok((
                    Some(DressedLayer {
                        patches: clipped,
                        target_quads: upper.target_quads.clone(),
                        warped,
                    }),
                    Some(lower.clone()),
                ))
            }
            DressingOrder::TuckOut => {
                let clipped = clip_lower_torso_by_coverage(lower, &upper.warped)?;
                let warped = lower.rerender(&clipped)?;
                Ok((
                    Some(upper.clone()),
                    Some(DressedLayer {
                        patches: clipped,
                        target_quads: lower.target_quads.clone(),
                        warped,
                    }),
                ))
            }
        }
    }

    /// Renders the bundle: layers composited in dressing order (the
    /// occluding garment last).
    pub fn composite(&self) -> Result<WarpedGarment> {
        let (w, h) = self.target_pose.canvas();
        let (upper, lower) = self.materialize()?;
        let mut ordered: Vec<&DressedLayer> = Vec::new();
        match self.dressing_order {
            DressingOrder::TuckIn => {
                // Lower garment over the tucked upper.
                ordered.extend(upper.as_ref());
                ordered.extend(lower.as_ref());
            }
            DressingOrder::TuckOut => {
                ordered.extend(lower.as_ref());
                ordered.extend(upper.as_ref());
            }
        }
        let mut out = WarpedGarment::empty(w, h);
        for layer in ordered {
            for y in 0..h {
                for x in 0..w {
                    if layer.warped.mask.get(x, y) {
                        out.image.put(x, y, &layer.warped.image.get_rgba(x, y));
                        out.mask.set(x, y, true);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Sets the dressing order. Requires both layers.
pub fn set_dressing_order(bundle: &TryOnBundle, order: DressingOrder) -> Result<TryOnBundle> {
    bundle.require_both()?;
    let mut out = bundle.clone();
    out.dressing_order = order;
    Ok(out)
}

/// Clears the upper torso's valid mask wherever it lands strictly below the
/// lower garment's waistline — the line through the top edge of the lower
/// torso target quad, with "below" the side holding that quad's centroid.
fn clip_upper_torso_below_waistline(
    upper: &DressedLayer,
    lower: &DressedLayer,
) -> Result<PatchSet> {
    let mut out = upper.patches.clone();
    let (Some(upper_quad), Some(lower_quad)) = (
        upper.target_quads.get(&PatchSlot::Torso),
        lower.target_quads.get(&PatchSlot::Torso),
    ) else {
        return Ok(out);
    };
    let Some(patch) = out.patches.get_mut(&PatchSlot::Torso) else {
        return Ok(out);
    };

    let c = lower_quad.corners();
    let (a, b) = (c[0], c[1]); // waistline endpoints
    let centroid = Point2::new(
        c.iter().map(|p| p.x).sum::<f64>() / 4.0,
        c.iter().map(|p| p.y).sum::<f64>() / 4.0,
    );
    let side = |p: Point2| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    let below_sign = side(centroid).signum();

    let h_norm_to_target = estimate_homography_dlt(&TEMPLATE_CORNERS, upper_quad.corners())?;
    for y in 0..TEMPLATE_SIZE {
        for x in 0..TEMPLATE_SIZE {
            if !patch.valid_mask.get(x, y) {
                continue;
            }
            let Ok(p) = apply_homography(&h_norm_to_target, Point2::new(x as f64, y as f64))
            else {
                continue;
            };
            if side(p) * below_sign > 0.0 {
                patch.valid_mask.set(x, y, false);
            }
        }
    }
    Ok(out)
}

/// Clears the lower torso's valid mask wherever the upper garment's
/// rendered coverage occludes it.
fn clip_lower_torso_by_coverage(
    lower: &DressedLayer,
    upper_warped: &WarpedGarment,
) -> Result<PatchSet> {
    let mut out = lower.patches.clone();
    let Some(lower_quad) = lower.target_quads.get(&PatchSlot::Torso) else {
        return Ok(out);
    };
    let Some(patch) = out.patches.get_mut(&PatchSlot::Torso) else {
        return Ok(out);
    };
    let (w, h) = upper_warped.dimensions();
    let h_norm_to_target = estimate_homography_dlt(&TEMPLATE_CORNERS, lower_quad.corners())?;
    for y in 0..TEMPLATE_SIZE {
        for x in 0..TEMPLATE_SIZE {
            if !patch.valid_mask.get(x, y) {
                continue;
            }
            let Ok(p) = apply_homography(&h_norm_to_target, Point2::new(x as f64, y as f64))
            else {
                continue;
            };
            let px = p.x.round();
            let py = p.y.round();
            if px < 0.0 || py < 0.0 || px >= w as f64 || py >= h as f64 {
                continue;
            }
            if upper_warped.mask.get(px as u32, py as u32) {
                patch.valid_mask.set(x, y, false);
            }
        }
    }
    Ok(out)
}

/// Pairs the shape of one garment with the texture of another: returns the
/// shape source's normalized patches and a warped garment stitched from the
/// texture source's patches, both restricted to their shared slots.
pub fn transfer_pairing(
    shape_source: &PatchSet,
    texture_source: &PatchSet,
    target_pose: &PoseSkeleton,
    params: &LayoutParams,
) -> Result<(PatchSet, WarpedGarment)> {
    if shape_source.category != texture_source.category {
        return Err(Error::CategoryMismatch {
            detail: format!(
                "shape source is {}, texture source is {}",
                shape_source.category, texture_source.category
            ),
        });
    }
    let shared: Vec<PatchSlot> = shape_source
        .patches
        .keys()
        .filter(|s| texture_source.patches.contains_key(s))
        .copied()
        .collect();
    if shared.is_empty() {
        return Err(Error::NoCommonSlots);
    }

    let mut shape_patches = shape_source.clone();
    shape_patches.patches.retain(|slot, _| shared.contains(slot));

    let mut texture_patches = texture_source.clone();
    texture_patches.patches.retain(|slot, _| shared.contains(slot));

    let layout = build_layout(target_pose, texture_patches.category, params)?;
    let (warped, _) = retarget_set(
        &texture_patches,
        &layout.quads,
        target_pose.canvas(),
        &DEFAULT_Z_ORDER,
    )?;
    Ok((shape_patches, warped))
}

/// Builds a try-on bundle by warping an upper-body garment from one person
/// and a lower-body garment from another onto a target pose. Default order
/// is tuck-in.
pub fn outfit_compose(
    upper_source: &PersonRecord,
    lower_source: &PersonRecord,
    target: &PersonRecord,
    params: &LayoutParams,
) -> Result<TryOnBundle> {
    let upper_category = match infer_category(&upper_source.parsing)? {
        DetectedCategory::Dress => GarmentCategory::Dress,
        DetectedCategory::Upper | DetectedCategory::UpperAndLower => GarmentCategory::Upper,
        DetectedCategory::Lower => {
            return Err(Error::CategoryMismatch {
                detail: "upper source wears only a lower-body garment".into(),
            })
        }
    };
    match infer_category(&lower_source.parsing)? {
        DetectedCategory::Lower | DetectedCategory::UpperAndLower => {}
        other => {
            return Err(Error::CategoryMismatch {
                detail: format!("lower source wears {other:?}, need a lower-body garment"),
            })
        }
    }

    let (upper_set, upper_warped, upper_info) = warp_garment_with_info(
        &upper_source.image,
        &upper_source.parsing,
        &upper_source.pose,
        &target.pose,
        upper_category,
        params,
    )?;
    let (lower_set, lower_warped, lower_info) = warp_garment_with_info(
        &lower_source.image,
        &lower_source.parsing,
        &lower_source.pose,
        &target.pose,
        GarmentCategory::Lower,
        params,
    )?;

    TryOnBundle::new(
        Some(DressedLayer {
            patches: upper_set,
            target_quads: upper_info.target_quads,
            warped: upper_warped,
        }),
        Some(DressedLayer {
            patches: lower_set,
            target_quads: lower_info.target_quads,
            warped: lower_warped,
        }),
        target.pose.clone(),
    )
}
