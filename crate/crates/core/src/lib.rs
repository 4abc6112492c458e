//! Pose-guided garment patch decomposition and warping.
//!
//! The pipeline decomposes a garment into pose-aligned quadrilateral
//! patches, normalizes each patch onto a fixed 128x128 template through a
//! homography, retargets the patches onto another pose, and stitches the
//! result into a coarse warped garment. Around that core sit the mask
//! algebra and feature utilities consumed by downstream synthesis stages
//! (misalignment masks, mean-fill feature inpainting, spatially adaptive
//! modulation), training-time random erasing, patch-level garment editing,
//! and serialization for every artifact.

pub mod edit;
pub mod erase;
pub mod error;
pub mod feature;
pub mod geometry;
pub mod io;
pub mod layout;
pub mod mask;
pub mod parsing;
pub mod pose;
pub mod raster;
pub mod synth;
pub mod warp;

pub use error::{Error, Result};
pub use feature::FeatureMap;
pub use geometry::{
    apply_homography, compose, estimate_homography_dlt, invert, refine_homography_lm, Homography,
    LmOptions, Point2, Quadrilateral,
};
pub use layout::{build_layout, limb_quad, GarmentCategory, LayoutParams, PatchLayout, PatchSlot};
pub use mask::{misalignment_masks, BinaryMask};
pub use parsing::ParsingMap;
pub use pose::{Joint, PoseSkeleton};
pub use raster::RasterImage;
pub use warp::{warp_garment, NormalizedPatch, PatchSet, WarpedGarment};
