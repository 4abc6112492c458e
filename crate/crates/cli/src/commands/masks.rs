//! `masks`: garment-mask extraction and the misalignment mask algebra,
//! written as three PNGs.

use std::path::Path;

use anyhow::Result;
use patchwarp::io::{
    load_label_table, load_mask_png, load_parsing_png, load_raster_png, save_mask_png,
};
use patchwarp::mask::misalignment_masks;
use patchwarp::parsing::garment_mask;
use patchwarp::Error;

use crate::commands::CategoryArg;
use crate::diag;

#[allow(clippy::too_many_arguments)]
pub fn run(
    warped_png: &Path,
    warp_mask_png: &Path,
    parsing_png: &Path,
    labels_json: &Path,
    out_dir: &Path,
    category: CategoryArg,
) -> Result<()> {
    let warped = load_raster_png(warped_png)?;
    let warp_mask = load_mask_png(warp_mask_png)?;
    let table = load_label_table(labels_json)?;
    let parsing = load_parsing_png(parsing_png, table)?;

    if warp_mask.dimensions() != warped.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: warped.dimensions(),
            got: warp_mask.dimensions(),
        }
        .into());
    }
    if parsing.dimensions() != warped.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: warped.dimensions(),
            got: parsing.dimensions(),
        }
        .into());
    }

    let category = match category {
        CategoryArg::Upper => patchwarp::GarmentCategory::Upper,
        CategoryArg::Lower => patchwarp::GarmentCategory::Lower,
        CategoryArg::Dress => patchwarp::GarmentCategory::Dress,
        CategoryArg::Auto => {
            use patchwarp::parsing::DetectedCategory;
            match patchwarp::parsing::infer_category(&parsing)? {
                DetectedCategory::Upper => patchwarp::GarmentCategory::Upper,
                DetectedCategory::Lower => patchwarp::GarmentCategory::Lower,
                DetectedCategory::Dress => patchwarp::GarmentCategory::Dress,
                DetectedCategory::UpperAndLower => {
                    diag::emit_warning(
                        "AmbiguousCategory",
                        "parsing carries both upper and lower garments; using the upper",
                    );
                    patchwarp::GarmentCategory::Upper
                }
            }
        }
    };

    let garment = garment_mask(&parsing, category)?;
    let (aligned, misaligned) = misalignment_masks(&garment, &warp_mask)?;

    std::fs::create_dir_all(out_dir)?;
    save_mask_png(&garment, &out_dir.join("garment_mask.png"))?;
    save_mask_png(&aligned, &out_dir.join("aligned_mask.png"))?;
    save_mask_png(&misaligned, &out_dir.join("misaligned_mask.png"))?;
    println!(
        "masks written to {} (garment {}, aligned {}, misaligned {})",
        out_dir.display(),
        garment.count_ones(),
        aligned.count_ones(),
        misaligned.count_ones(),
    );
    Ok(())
}
