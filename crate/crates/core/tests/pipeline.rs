//! End-to-end library tests for the warp pipeline.

use patchwarp::edit::outfit_compose;
use patchwarp::layout::{build_layout, GarmentCategory, LayoutParams};
use patchwarp::mask::BinaryMask;
use patchwarp::parsing::garment_mask;
use patchwarp::pose::PoseSkeleton;
use patchwarp::synth::{self, SynthSpec, Texture, Wardrobe};
use patchwarp::warp::warp_garment;

fn striped_person(seed: u64) -> patchwarp::io::PersonRecord {
    synth::synth_person(&SynthSpec {
        id: format!("p{seed}"),
        canvas: (256, 384),
        wardrobe: Wardrobe::UpperOnly,
        upper_texture: Texture::Waves { period: 26.0 },
        lower_texture: Texture::Solid([60, 60, 120]),
        pose_seed: Some(seed),
    })
    .unwrap()
}

#[test]
fn same_pose_warp_reconstructs_garment_interior() {
    let person = striped_person(31);
    let params = LayoutParams::default();
    let (set, warped) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &person.pose,
        GarmentCategory::Upper,
        &params,
    )
    .unwrap();
    assert_eq!(set.patches.len(), 10);

    let garment = garment_mask(&person.parsing, GarmentCategory::Upper).unwrap();
    let interior = warped.mask.and(&garment).unwrap().eroded();
    let mae = warped
        .image
        .mean_abs_diff_rgb(&person.image, |x, y| interior.get(x, y))
        .unwrap();
    assert!(mae <= 2.0 / 255.0, "interior MAE {mae}");

    // The coarse warp is deliberately not identical to the intact source:
    // pixels outside the quad union never render.
    let union = synth::rasterize_quads(
        build_layout(&person.pose, GarmentCategory::Upper, &params)
            .unwrap()
            .quads
            .values(),
        person.pose.canvas(),
    );
    let outside = garment.minus(&union).unwrap();
    for y in 0..outside.height() {
        for x in 0..outside.width() {
            if outside.get(x, y) {
                assert!(!warped.mask.get(x, y));
            }
        }
    }
}

#[test]
fn uniform_garment_warps_uniform() {
    // Uniform color everywhere and garment labels everywhere: every
    // bilinear tap sees the same color, so the warp is exactly uniform
    // within its mask.
    let mut person = striped_person(32);
    person.image =
        patchwarp::RasterImage::from_fn(256, 384, 3, |_, _| [10, 180, 90, 255]);
    person.parsing = patchwarp::parsing::ParsingMap::new(
        256,
        384,
        vec![5u8; 256 * 384],
        patchwarp::parsing::LabelTable::default_lip20(),
    )
    .unwrap();
    let target = striped_person(33);
    let (_, warped) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &target.pose,
        GarmentCategory::Upper,
        &LayoutParams::default(),
    )
    .unwrap();
    let mut covered = 0u64;
    for y in 0..warped.mask.height() {
        for x in 0..warped.mask.width() {
            if warped.mask.get(x, y) {
                covered += 1;
                assert_eq!(warped.image.get_rgba(x, y), [10, 180, 90, 255]);
            }
        }
    }
    assert!(covered > 5_000);
}

#[test]
fn warp_translation_equivariance() {
    let person = striped_person(34);
    let params = LayoutParams::default();
    let (_, base) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &person.pose,
        GarmentCategory::Upper,
        &params,
    )
    .unwrap();

    let shifted_pose: PoseSkeleton = person.pose.translated(0.0, 20.0).unwrap();
    let (_, shifted) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &shifted_pose,
        GarmentCategory::Upper,
        &params,
    )
    .unwrap();

    // The shifted warp equals the same-pose warp moved down 20 px, except
    // for a knife-edge ring at quad boundaries.
    let (w, h) = base.dimensions();
    let mut both = 0u64;
    let mut boundary_disagreements = 0u64;
    for y in 0..h - 20 {
        for x in 0..w {
            let a = base.mask.get(x, y);
            let b = shifted.mask.get(x, y + 20);
            match (a, b) {
                (true, true) => {
                    both += 1;
                    assert_eq!(
                        base.image.get_rgba(x, y),
                        shifted.image.get_rgba(x, y + 20),
                        "pixel ({x},{y})"
                    );
                }
                (false, false) => {}
                _ => boundary_disagreements += 1,
            }
        }
    }
    assert!(both > 10_000, "coverage {both}");
    assert!(
        boundary_disagreements * 100 <= both,
        "too many boundary disagreements: {boundary_disagreements} vs {both}"
    );
}

#[test]
fn self_outfit_composition_reconstructs_own_garments() {
    let person = synth::synth_person(&SynthSpec {
        id: "self".into(),
        canvas: (256, 384),
        wardrobe: Wardrobe::UpperAndLower,
        upper_texture: Texture::Waves { period: 30.0 },
        lower_texture: Texture::Gradient([50, 50, 130], [90, 140, 90]),
        pose_seed: Some(35),
    })
    .unwrap();
    let bundle = outfit_compose(&person, &person, &person, &LayoutParams::default()).unwrap();
    let composite = bundle.composite().unwrap();

    let upper = garment_mask(&person.parsing, GarmentCategory::Upper).unwrap();
    let lower = garment_mask(&person.parsing, GarmentCategory::Lower).unwrap();
    let garments = upper.or(&lower).unwrap();
    let interior = composite.mask.and(&garments).unwrap().eroded().eroded();
    assert!(interior.count_ones() > 5_000);

    // Up to seams: compare away from patch boundaries only.
    let mae = composite
        .image
        .mean_abs_diff_rgb(&person.image, |x, y| interior.get(x, y))
        .unwrap();
    assert!(mae <= 4.0 / 255.0, "self-composition MAE {mae}");
}

#[test]
fn layout_exports_as_slot_name_to_corner_map() {
    let pose = synth::t_pose((320, 512));
    let layout = build_layout(&pose, GarmentCategory::Lower, &LayoutParams::default()).unwrap();
    let json = serde_json::to_value(&layout.quads).unwrap();
    let map = json.as_object().unwrap();
    assert_eq!(map.len(), 5);
    let torso = map["torso"].as_array().unwrap();
    assert_eq!(torso.len(), 4);
    assert_eq!(torso[0].as_array().unwrap().len(), 2);

    // Round trip through JSON preserves the quads exactly.
    let back: std::collections::BTreeMap<
        patchwarp::layout::PatchSlot,
        patchwarp::Quadrilateral,
    > = serde_json::from_value(json).unwrap();
    assert_eq!(back, layout.quads);
}

#[test]
fn masks_match_alpha_after_erase() {
    let person = striped_person(36);
    let (_, warped) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &person.pose,
        GarmentCategory::Upper,
        &LayoutParams::default(),
    )
    .unwrap();
    let erased = patchwarp::erase::random_erase(
        &warped,
        9,
        1.0,
        &patchwarp::erase::EraseParams::default(),
    );
    let from_alpha = BinaryMask::from_fn(erased.image.width(), erased.image.height(), |x, y| {
        erased.image.alpha(x, y) > 0
    });
    assert_eq!(erased.mask, from_alpha);
}
