//! Benchmarks for the hot paths: homography estimation and refinement,
//! patch normalization and retargeting, stitching, mask algebra, feature
//! inpainting, modulation, and the random erase.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use patchwarp::erase::{random_erase, EraseParams};
use patchwarp::feature::{inpaint_features, spatially_adaptive_modulate, FeatureMap};
use patchwarp::geometry::{
    estimate_homography_dlt, refine_homography_lm, apply_homography, LmOptions, Point2,
    Quadrilateral,
};
use patchwarp::layout::{build_layout, GarmentCategory, LayoutParams, PatchSlot};
use patchwarp::mask::{misalignment_masks, BinaryMask};
use patchwarp::parsing::garment_mask;
use patchwarp::synth::{self, SynthSpec, Texture, Wardrobe};
use patchwarp::warp::{normalize_patch, retarget_patch, warp_garment};

fn sample_quads() -> (Quadrilateral, Quadrilateral) {
    let src = Quadrilateral::new([
        Point2::new(100.0, 40.0),
        Point2::new(420.0, 60.0),
        Point2::new(395.0, 280.0),
        Point2::new(85.0, 255.0),
    ])
    .unwrap();
    let dst = Quadrilateral::new([
        Point2::new(130.0, 55.0),
        Point2::new(400.0, 35.0),
        Point2::new(430.0, 300.0),
        Point2::new(95.0, 270.0),
    ])
    .unwrap();
    (src, dst)
}

fn bench_geometry(c: &mut Criterion) {
    let (src, dst) = sample_quads();
    c.bench_function("dlt_4pt", |b| {
        b.iter(|| estimate_homography_dlt(black_box(src.corners()), black_box(dst.corners())))
    });

    let h = estimate_homography_dlt(src.corners(), dst.corners()).unwrap();
    let correspondences: Vec<(Point2, Point2)> = (0..12)
        .map(|i| {
            let t = i as f64 / 11.0;
            let p = Point2::new(100.0 + 300.0 * t, 60.0 + 180.0 * (1.0 - t) * t * 4.0);
            let q = apply_homography(&h, p).unwrap();
            (p, Point2::new(q.x + 0.3 * (i % 3) as f64, q.y - 0.2 * (i % 4) as f64))
        })
        .collect();
    c.bench_function("lm_refine_12pts", |b| {
        b.iter(|| {
            refine_homography_lm(
                black_box(&h),
                black_box(&correspondences),
                &LmOptions::default(),
            )
        })
    });
}

fn bench_warp(c: &mut Criterion) {
    let person = synth::synth_person(&SynthSpec {
        id: "bench".into(),
        canvas: (320, 512),
        wardrobe: Wardrobe::UpperOnly,
        upper_texture: Texture::Waves { period: 28.0 },
        lower_texture: Texture::Solid([60, 60, 120]),
        pose_seed: Some(1),
    })
    .unwrap();
    let params = LayoutParams::default();
    let layout = build_layout(&person.pose, GarmentCategory::Upper, &params).unwrap();
    let garment = garment_mask(&person.parsing, GarmentCategory::Upper).unwrap();
    let torso_quad = layout.quads[&PatchSlot::Torso];

    c.bench_function("normalize_patch_torso", |b| {
        b.iter(|| {
            normalize_patch(
                black_box(&person.image),
                black_box(&torso_quad),
                PatchSlot::Torso,
                black_box(&garment),
            )
        })
    });

    let patch = normalize_patch(&person.image, &torso_quad, PatchSlot::Torso, &garment).unwrap();
    c.bench_function("retarget_patch_torso", |b| {
        b.iter(|| retarget_patch(black_box(&patch), black_box(&torso_quad), (320, 512)))
    });

    let target = synth::jittered_pose(&person.pose, 7, 0.02);
    c.bench_function("warp_garment_full", |b| {
        b.iter(|| {
            warp_garment(
                black_box(&person.image),
                black_box(&person.parsing),
                black_box(&person.pose),
                black_box(&target),
                GarmentCategory::Upper,
                &params,
            )
        })
    });

    let (_, warped) = warp_garment(
        &person.image,
        &person.parsing,
        &person.pose,
        &person.pose,
        GarmentCategory::Upper,
        &params,
    )
    .unwrap();
    c.bench_function("random_erase", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            random_erase(black_box(&warped), seed, 1.0, &EraseParams::default())
        })
    });
}

fn bench_masks_features(c: &mut Criterion) {
    let garment = BinaryMask::from_fn(320, 512, |x, y| (x / 40 + y / 50) % 2 == 0);
    let warp = BinaryMask::from_fn(320, 512, |x, y| (x / 55 + y / 35) % 2 == 0);
    c.bench_function("misalignment_masks_320x512", |b| {
        b.iter(|| misalignment_masks(black_box(&garment), black_box(&warp)))
    });

    let (aligned, misaligned) = misalignment_masks(&garment, &warp).unwrap();
    let features = FeatureMap::from_values(
        8,
        512,
        320,
        (0..8 * 512 * 320)
            .map(|i| ((i as f32) * 0.137).sin())
            .collect(),
    )
    .unwrap();
    c.bench_function("inpaint_features_8x512x320", |b| {
        b.iter(|| {
            inpaint_features(
                black_box(&features),
                black_box(&garment),
                black_box(&aligned),
                black_box(&misaligned),
            )
        })
    });

    let ones = FeatureMap::from_values(8, 512, 320, vec![1.0; 8 * 512 * 320]).unwrap();
    let zeros = FeatureMap::new(8, 512, 320);
    c.bench_function("modulate_8x512x320", |b| {
        b.iter(|| {
            spatially_adaptive_modulate(black_box(&features), black_box(&ones), &zeros, 1e-5)
        })
    });
}

criterion_group!(geometry, bench_geometry);
criterion_group!(warp, bench_warp);
criterion_group!(masks, bench_masks_features);
criterion_main!(geometry, warp, masks);
