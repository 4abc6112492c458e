//! Patch normalization, retargeting, and stitching.
//!
//! Each garment patch is normalized onto a fixed 128×128 template by the
//! homography that carries its source quad corners onto the template
//! corners, then retargeted onto another pose by the homography from the
//! template corners to the target quad. Rendering is backward-mapping with
//! bilinear interpolation; reads outside the source are transparent. The
//! stitched composite applies the painter's algorithm over a fixed,
//! overridable z-order and records its occupancy mask.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    apply_homography, estimate_homography_dlt, invert, Homography, Point2, Quadrilateral,
};
use crate::layout::{build_layout, GarmentCategory, LayoutParams, PatchSlot};
use crate::mask::BinaryMask;
use crate::parsing::{garment_mask, ParsingMap};
use crate::pose::PoseSkeleton;
use crate::raster::RasterImage;

/// Side length of the normalization template.
pub const TEMPLATE_SIZE: u32 = 128;

/// Template corners, paired index-for-index with a quad's anchor-first
/// corner order.
pub const TEMPLATE_CORNERS: [Point2; 4] = [
    Point2::new(0.0, 0.0),
    Point2::new(127.0, 0.0),
    Point2::new(127.0, 127.0),
    Point2::new(0.0, 127.0),
];

/// Template quadrilateral as a [`Quadrilateral`] value.
pub fn template_quad() -> Quadrilateral {
    Quadrilateral::new(TEMPLATE_CORNERS).expect("template corners are non-degenerate")
}

/// Default stitch z-order, bottom to top: torso, upper legs, lower legs,
/// upper arms, lower arms, neck. Later entries overwrite earlier ones.
pub const DEFAULT_Z_ORDER: [PatchSlot; 10] = [
    PatchSlot::Torso,
    PatchSlot::LeftUpperLeg,
    PatchSlot::RightUpperLeg,
    PatchSlot::LeftLowerLeg,
    PatchSlot::RightLowerLeg,
    PatchSlot::LeftUpperArm,
    PatchSlot::RightUpperArm,
    PatchSlot::LeftLowerArm,
    PatchSlot::RightLowerArm,
    PatchSlot::Neck,
];

/// Orders present slots by a z-order list; slots missing from the list keep
/// their relative order after the listed ones.
pub fn sort_by_z_order(slots: &mut Vec<PatchSlot>, z_order: &[PatchSlot]) {
    slots.sort_by_key(|s| {
        z_order
            .iter()
            .position(|z| z == s)
            .unwrap_or(z_order.len())
    });
}

/// A garment patch normalized onto the 128×128 template, with its
/// provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPatch {
    pub slot: PatchSlot,
    /// 128×128 RGBA template image; alpha marks resampled coverage.
    pub image: RasterImage,
    pub source_quad: Quadrilateral,
    pub h_source_to_norm: Homography,
    /// Garment validity in template space; always a subset of the nonzero
    /// alpha region.
    pub valid_mask: BinaryMask,
}

/// An ordered collection of normalized patches for one garment.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSet {
    pub category: GarmentCategory,
    pub patches: BTreeMap<PatchSlot, NormalizedPatch>,
    pub source_pose: PoseSkeleton,
}

impl PatchSet {
    pub fn slots(&self) -> impl Iterator<Item = PatchSlot> + '_ {
        self.patches.keys().copied()
    }

    /// Slot-set consistency: every patch slot must belong to the category.
    pub fn validate(&self) -> Result<()> {
        for slot in self.patches.keys() {
            if !self.category.slots().contains(slot) {
                return Err(Error::CategoryMismatch {
                    detail: format!(
                        "slot {:?} not allowed in a {} patch set",
                        slot, self.category
                    ),
                });
            }
        }
        Ok(())
    }
}

/// The stitched target-pose garment image and its occupancy mask.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedGarment {
    /// RGBA canvas; alpha is nonzero exactly where the mask is set.
    pub image: RasterImage,
    pub mask: BinaryMask,
}

impl WarpedGarment {
    pub fn empty(width: u32, height: u32) -> Self {
        WarpedGarment {
            image: RasterImage::new(width, height, 4),
            mask: BinaryMask::new(width, height),
        }
    }

    pub fn dimensions(&self) -> (u32, u32) {
        self.image.dimensions()
    }
}

/// Samples a binary mask as a 0/1 field with bilinear weights; `true` when
/// the interpolated coverage reaches one half.
fn sample_mask(mask: &BinaryMask, x: f64, y: f64) -> bool {
    let (w, h) = mask.dimensions();
    if !(0.0..=(w - 1) as f64).contains(&x) || !(0.0..=(h - 1) as f64).contains(&y) {
        return false;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let x0 = x0 as u32;
    let y0 = y0 as u32;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let v = mask.get(x0, y0) as u8 as f64 * (1.0 - fx) * (1.0 - fy)
        + mask.get(x1, y0) as u8 as f64 * fx * (1.0 - fy)
        + mask.get(x0, y1) as u8 as f64 * (1.0 - fx) * fy
        + mask.get(x1, y1) as u8 as f64 * fx * fy;
    v >= 0.5
}

#[inline]
fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Warps a source quad onto the 128×128 template.
///
/// Template pixels are backward-mapped through the inverse of
/// `h_source_to_norm` and bilinearly resampled; validity is the warped
/// garment mask intersected with the in-bounds indicator. Invalid pixels are
/// fully transparent.
pub fn normalize_patch(
    source: &RasterImage,
    quad: &Quadrilateral,
    slot: PatchSlot,
    garment: &BinaryMask,
) -> Result<NormalizedPatch> {
    if garment.dimensions() != source.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: source.dimensions(),
            got: garment.dimensions(),
        });
    }
    let h_source_to_norm = estimate_homography_dlt(quad.corners(), &TEMPLATE_CORNERS)?;
    let h_norm_to_source = invert(&h_source_to_norm)?;

    let mut image = RasterImage::new(TEMPLATE_SIZE, TEMPLATE_SIZE, 4);
    let mut valid = BinaryMask::new(TEMPLATE_SIZE, TEMPLATE_SIZE);
    for ty in 0..TEMPLATE_SIZE {
        for tx in 0..TEMPLATE_SIZE {
            let src = match apply_homography(&h_norm_to_source, Point2::new(tx as f64, ty as f64))
            {
                Ok(p) => p,
                Err(_) => continue,
            };
            let r = source.sample_bilinear(src.x, src.y, 0);
            let (r, g, b) = match source.channels() {
                1 => {
                    let v = r;
                    (v, v, v)
                }
                _ => (
                    r,
                    source.sample_bilinear(src.x, src.y, 1),
                    source.sample_bilinear(src.x, src.y, 2),
                ),
            };
            let (Some(r), Some(g), Some(b)) = (r, g, b) else {
                continue; // out-of-bounds read: transparent
            };
            if !sample_mask(garment, src.x, src.y) {
                continue;
            }
            image.put(tx, ty, &[to_u8(r), to_u8(g), to_u8(b), 255]);
            valid.set(tx, ty, true);
        }
    }
    Ok(NormalizedPatch {
        slot,
        image,
        source_quad: *quad,
        h_source_to_norm,
        valid_mask: valid,
    })
}

/// Renders a normalized patch onto a transparent canvas at a target quad.
///
/// Returns the rendered RGBA canvas and the homography from template
/// corners to the target quad corners.
pub fn retarget_patch(
    patch: &NormalizedPatch,
    target_quad: &Quadrilateral,
    canvas: (u32, u32),
) -> Result<(RasterImage, Homography)> {
    let h_norm_to_target = estimate_homography_dlt(&TEMPLATE_CORNERS, target_quad.corners())?;
    let h_target_to_norm = invert(&h_norm_to_target)?;
    let (cw, ch) = canvas;
    let mut out = RasterImage::new(cw, ch, 4);

    // Only the bounding box of the target quad can receive pixels.
    let (min, max) = target_quad.bounding_box();
    let x0 = min.x.floor().max(0.0) as u32;
    let y0 = min.y.floor().max(0.0) as u32;
    let x1 = (max.x.ceil() as i64).clamp(0, cw as i64) as u32;
    let y1 = (max.y.ceil() as i64).clamp(0, ch as i64) as u32;

    let limit = (TEMPLATE_SIZE - 1) as f64;
    for y in y0..y1.min(ch) {
        for x in x0..x1.min(cw) {
            let t = match apply_homography(&h_target_to_norm, Point2::new(x as f64, y as f64)) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if !(0.0..=limit).contains(&t.x) || !(0.0..=limit).contains(&t.y) {
                continue;
            }
            if !sample_mask(&patch.valid_mask, t.x, t.y) {
                continue;
            }
            let (Some(r), Some(g), Some(b)) = (
                patch.image.sample_bilinear(t.x, t.y, 0),
                patch.image.sample_bilinear(t.x, t.y, 1),
                patch.image.sample_bilinear(t.x, t.y, 2),
            ) else {
                continue;
            };
            out.put(x, y, &[to_u8(r), to_u8(g), to_u8(b), 255]);
        }
    }
    Ok((out, h_norm_to_target))
}

/// Painter's-algorithm composite of rendered patches in the given order;
/// later images overwrite earlier ones where both have alpha. The mask is
/// the union of per-patch coverage.
pub fn stitch(rendered: &[(PatchSlot, RasterImage)]) -> Result<WarpedGarment> {
    let Some(first) = rendered.first() else {
        return Ok(WarpedGarment::empty(0, 0));
    };
    let (w, h) = first.1.dimensions();
    for (_, img) in rendered {
        if img.dimensions() != (w, h) {
            return Err(Error::CanvasMismatch {
                expected: (w, h),
                got: img.dimensions(),
            });
        }
    }
    let mut garment = WarpedGarment::empty(w, h);
    for (_, img) in rendered {
        for y in 0..h {
            for x in 0..w {
                if img.alpha(x, y) > 0 {
                    garment.image.put(x, y, &img.get_rgba(x, y));
                    garment.mask.set(x, y, true);
                }
            }
        }
    }
    Ok(garment)
}

/// Target quads and rendered homographies for one retargeted garment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetargetInfo {
    pub target_quads: BTreeMap<PatchSlot, Quadrilateral>,
    pub h_norm_to_target: BTreeMap<PatchSlot, Homography>,
}

/// Retargets every patch of a set onto the quads present in a target
/// layout, stitching in z-order. Slots without a target quad are skipped;
/// an empty intersection is an error.
pub fn retarget_set(
    patches: &PatchSet,
    target_quads: &BTreeMap<PatchSlot, Quadrilateral>,
    canvas: (u32, u32),
    z_order: &[PatchSlot],
) -> Result<(WarpedGarment, RetargetInfo)> {
    let mut slots: Vec<PatchSlot> = patches
        .patches
        .keys()
        .filter(|s| target_quads.contains_key(s))
        .copied()
        .collect();
    if slots.is_empty() {
        return Err(Error::NoCommonSlots);
    }
    sort_by_z_order(&mut slots, z_order);

    let mut rendered = Vec::with_capacity(slots.len());
    let mut info = RetargetInfo {
        target_quads: BTreeMap::new(),
        h_norm_to_target: BTreeMap::new(),
    };
    for slot in slots {
        let patch = &patches.patches[&slot];
        let quad = &target_quads[&slot];
        let (img, h) = retarget_patch(patch, quad, canvas)?;
        info.target_quads.insert(slot, *quad);
        info.h_norm_to_target.insert(slot, h);
        rendered.push((slot, img));
    }
    let garment = stitch(&rendered)?;
    Ok((garment, info))
}

/// Full pipeline: source layout → normalization → target layout →
/// retargeting → stitch. Slots present in only one pose are dropped.
pub fn warp_garment(
    source_image: &RasterImage,
    source_parsing: &ParsingMap,
    source_pose: &PoseSkeleton,
    target_pose: &PoseSkeleton,
    category: GarmentCategory,
    params: &LayoutParams,
) -> Result<(PatchSet, WarpedGarment)> {
    let (set, garment, _) = warp_garment_with_info(
        source_image,
        source_parsing,
        source_pose,
        target_pose,
        category,
        params,
    )?;
    Ok((set, garment))
}

/// As [`warp_garment`], also returning the per-slot retargeting info.
pub fn warp_garment_with_info(
    source_image: &RasterImage,
    source_parsing: &ParsingMap,
    source_pose: &PoseSkeleton,
    target_pose: &PoseSkeleton,
    category: GarmentCategory,
    params: &LayoutParams,
) -> Result<(PatchSet, WarpedGarment, RetargetInfo)> {
    if source_parsing.dimensions() != source_image.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: source_image.dimensions(),
            got: source_parsing.dimensions(),
        });
    }
    let garment = garment_mask(source_parsing, category)?;
    let source_layout = build_layout(source_pose, category, params)?;
    let target_layout = build_layout(target_pose, category, params)?;

    let mut patches = BTreeMap::new();
    for (slot, quad) in &source_layout.quads {
        if !target_layout.is_present(*slot) {
            continue;
        }
        patches.insert(*slot, normalize_patch(source_image, quad, *slot, &garment)?);
    }
    if patches.is_empty() {
        return Err(Error::NoCommonSlots);
    }
    let set = PatchSet {
        category,
        patches,
        source_pose: source_pose.clone(),
    };
    let (warped, info) = retarget_set(
        &set,
        &target_layout.quads,
        target_pose.canvas(),
        &DEFAULT_Z_ORDER,
    )?;
    Ok((set, warped, info))
}
