//! Acceptance suite: one test per release criterion, each asserting its
//! tolerances and runtime budget and printing a pass line.
//!
//! Run with `cargo test -p patchwarp-cli --test acceptance -- --nocapture`
//! to see the per-criterion lines.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use patchwarp::erase::{random_erase, EraseParams};
use patchwarp::feature::{inpaint_features, spatially_adaptive_modulate, FeatureMap};
use patchwarp::geometry::{
    apply_homography, estimate_homography_dlt, refine_homography_lm, Homography, LmOptions,
    Point2, Quadrilateral,
};
use patchwarp::layout::{build_layout, GarmentCategory, LayoutParams, PatchSlot};
use patchwarp::mask::{misalignment_masks, BinaryMask};
use patchwarp::synth::{self, SynthSpec, Texture, Wardrobe};
use patchwarp::warp::{warp_garment, WarpedGarment};
use patchwarp::{io, RasterImage};

fn finish(criterion: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!("acceptance {criterion}: PASS in {elapsed:.2?} (budget {budget:.2?})");
    assert!(
        elapsed <= budget,
        "{criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

/// Random quad with one corner per quadrant: simple, positively oriented,
/// inside the 512x320 canvas, with bounded distortion.
fn random_quad(rng: &mut ChaCha12Rng) -> Quadrilateral {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let cx = rng.random_range(140.0..372.0);
    let cy = rng.random_range(90.0..230.0);
    let base: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let radii: [f64; 4] = std::array::from_fn(|_| rng.random_range(40.0f64..90.0));
    let jitter: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.45f64..0.45));
    let angles = [
        base,
        base + half_pi + jitter[0],
        base + 2.0 * half_pi + jitter[1],
        base + 3.0 * half_pi + jitter[2],
    ];
    Quadrilateral::new([0, 1, 2, 3].map(|i| {
        Point2::new(
            cx + radii[i] * angles[i].cos(),
            cy + radii[i] * angles[i].sin(),
        )
    }))
    .expect("quadrant quads are non-degenerate")
}

#[test]
fn c01_homography_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let src = random_quad(&mut rng);
        let dst = random_quad(&mut rng);
        let h = estimate_homography_dlt(src.corners(), dst.corners()).unwrap();
        for (s, d) in src.corners().iter().zip(dst.corners().iter()) {
            let err = apply_homography(&h, *s).unwrap().distance(d);
            worst = worst.max(err);
        }
    }
    assert!(worst < 1e-9, "max corner reprojection {worst:.3e}");
    finish("criterion 1 (homography exactness)", start, Duration::from_secs(2));
}

fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = rng.random_range(1e-12f64..1.0);
    let u2: f64 = rng.random_range(0.0f64..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn point_in_quad(rng: &mut ChaCha12Rng, quad: &Quadrilateral) -> Point2 {
    let (min, max) = quad.bounding_box();
    loop {
        let p = Point2::new(
            rng.random_range(min.x..max.x),
            rng.random_range(min.y..max.y),
        );
        if quad.contains(p) {
            return p;
        }
    }
}

fn rms_forward(h: &Homography, corr: &[(Point2, Point2)]) -> f64 {
    let mut sum = 0.0;
    for (p, q) in corr {
        let m = apply_homography(h, *p).unwrap();
        sum += (m.x - q.x).powi(2) + (m.y - q.y).powi(2);
    }
    (sum / corr.len() as f64).sqrt()
}

#[test]
fn c02_lm_improvement() {
    let start = Instant::now();
    let trials = 100u64;
    let mut improved = 0u32;
    let mut sum_initial = 0.0;
    let mut sum_refined = 0.0;
    for trial in 0..trials {
        let mut rng = ChaCha12Rng::seed_from_u64(1_000 + trial);
        let src_quad = random_quad(&mut rng);
        let dst_quad = random_quad(&mut rng);
        let ground_truth =
            estimate_homography_dlt(src_quad.corners(), dst_quad.corners()).unwrap();

        // Four spread points (shrunk corners) then eight interior points,
        // each mapped through the ground truth with sigma = 0.5 px noise.
        let centroid = {
            let c = src_quad.corners();
            Point2::new(
                c.iter().map(|p| p.x).sum::<f64>() / 4.0,
                c.iter().map(|p| p.y).sum::<f64>() / 4.0,
            )
        };
        let mut corr = Vec::with_capacity(12);
        for corner in src_quad.corners() {
            let p = Point2::new(
                corner.x + 0.1 * (centroid.x - corner.x),
                corner.y + 0.1 * (centroid.y - corner.y),
            );
            let q = apply_homography(&ground_truth, p).unwrap();
            corr.push((
                p,
                Point2::new(q.x + 0.5 * gaussian(&mut rng), q.y + 0.5 * gaussian(&mut rng)),
            ));
        }
        for _ in 0..8 {
            let p = point_in_quad(&mut rng, &src_quad);
            let q = apply_homography(&ground_truth, p).unwrap();
            corr.push((
                p,
                Point2::new(q.x + 0.5 * gaussian(&mut rng), q.y + 0.5 * gaussian(&mut rng)),
            ));
        }

        let initial = estimate_homography_dlt(
            &[corr[0].0, corr[1].0, corr[2].0, corr[3].0],
            &[corr[0].1, corr[1].1, corr[2].1, corr[3].1],
        )
        .unwrap();
        let refined = refine_homography_lm(&initial, &corr, &LmOptions::default()).unwrap();

        let rms_initial = rms_forward(&initial, &corr);
        let rms_refined = rms_forward(&refined, &corr);
        if rms_refined <= rms_initial {
            improved += 1;
        }
        sum_initial += rms_initial;
        sum_refined += rms_refined;
    }
    let mean_reduction = 1.0 - sum_refined / sum_initial;
    assert!(improved >= 95, "improved in only {improved}/100 trials");
    assert!(
        mean_reduction >= 0.20,
        "mean error reduction {:.2}% below 20%",
        mean_reduction * 100.0
    );
    // Frozen oracle values measured for this seeded harness.
    assert!((sum_initial / 100.0 - 0.7318).abs() < 0.05);
    assert!((sum_refined / 100.0 - 0.5720).abs() < 0.05);
    finish("criterion 2 (LM improvement)", start, Duration::from_secs(5));
}

#[test]
fn c03_patch_round_trip() {
    let start = Instant::now();
    let fixtures: [(Wardrobe, Texture, u64); 10] = [
        (Wardrobe::UpperOnly, Texture::Waves { period: 28.0 }, 1),
        (Wardrobe::UpperOnly, Texture::Gradient([40, 80, 160], [220, 120, 60]), 2),
        (Wardrobe::UpperOnly, Texture::Solid([180, 60, 40]), 3),
        (Wardrobe::UpperOnly, Texture::Radial, 4),
        (Wardrobe::UpperOnly, Texture::Checker { period: 32.0 }, 5),
        (Wardrobe::Dress, Texture::Waves { period: 30.0 }, 6),
        (Wardrobe::Dress, Texture::Gradient([30, 150, 90], [200, 40, 120]), 7),
        (Wardrobe::LowerOnly, Texture::Solid([60, 60, 140]), 8),
        (Wardrobe::LowerOnly, Texture::Waves { period: 26.0 }, 9),
        (Wardrobe::UpperAndLower, Texture::Checker { period: 36.0 }, 10),
    ];
    for (index, (wardrobe, texture, seed)) in fixtures.into_iter().enumerate() {
        let person = synth::synth_person(&SynthSpec {
            id: format!("fixture{index}"),
            canvas: (256, 384),
            wardrobe,
            upper_texture: texture,
            lower_texture: texture,
            pose_seed: Some(seed),
        })
        .unwrap();
        let category = match wardrobe {
            Wardrobe::UpperOnly | Wardrobe::UpperAndLower => GarmentCategory::Upper,
            Wardrobe::LowerOnly => GarmentCategory::Lower,
            Wardrobe::Dress => GarmentCategory::Dress,
        };
        let params = LayoutParams::default();
        let (_, warped) = warp_garment(
            &person.image,
            &person.parsing,
            &person.pose,
            &person.pose,
            category,
            &params,
        )
        .unwrap();

        let garment = patchwarp::parsing::garment_mask(&person.parsing, category).unwrap();
        let interior = warped.mask.and(&garment).unwrap().eroded();
        assert!(interior.count_ones() > 2_000, "fixture {index} too small");
        let mae = warped
            .image
            .mean_abs_diff_rgb(&person.image, |x, y| interior.get(x, y))
            .unwrap();
        assert!(
            mae <= 2.0 / 255.0,
            "fixture {index}: interior MAE {mae:.5} above 2/255"
        );

        // Occupancy against the union of source quads gated by the garment
        // mask, rasterized independently.
        let layout = build_layout(&person.pose, category, &params).unwrap();
        let union = synth::rasterize_quads(layout.quads.values(), person.pose.canvas());
        let expected = union.and(&garment).unwrap();
        let iou = warped.mask.iou(&expected).unwrap();
        assert!(iou >= 0.95, "fixture {index}: occupancy IoU {iou:.4}");
    }
    finish("criterion 3 (patch round trip)", start, Duration::from_secs(10));
}

#[test]
fn c04_mask_algebra_exhaustive() {
    let start = Instant::now();
    let masks: Vec<BinaryMask> = (0u32..512)
        .map(|bits| {
            BinaryMask::from_bits(3, 3, (0..9).map(|i| ((bits >> i) & 1) as u8).collect())
                .unwrap()
        })
        .collect();
    for garment in &masks {
        for warp in &masks {
            let (aligned, misaligned) = misalignment_masks(garment, warp).unwrap();
            // Partition identities, exact.
            assert!(aligned.and(&misaligned).unwrap().is_empty());
            assert_eq!(&aligned.or(&misaligned).unwrap(), garment);
            assert_eq!(aligned, garment.and(warp).unwrap());
            assert_eq!(misaligned, garment.minus(&aligned).unwrap());
        }
    }
    finish("criterion 4 (mask algebra, 2^9 x 2^9 exhaustive)", start, Duration::from_secs(5));
}

#[test]
fn c05_inpainting_properties() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(505);
    for case in 0..1_000 {
        let c_n = rng.random_range(1..=4usize);
        let h = rng.random_range(1..=16u32);
        let w = rng.random_range(1..=16u32);
        let values: Vec<f32> = (0..c_n * (h * w) as usize)
            .map(|_| rng.random_range(-1.0f32..1.0))
            .collect();
        let features = FeatureMap::from_values(c_n, h, w, values).unwrap();

        let mut garment = BinaryMask::new(w, h);
        let mut aligned = BinaryMask::new(w, h);
        let mut misaligned = BinaryMask::new(w, h);
        let mut first = None;
        for y in 0..h {
            for x in 0..w {
                if rng.random_range(0.0..1.0) < 0.7 {
                    garment.set(x, y, true);
                    first.get_or_insert((x, y));
                    if rng.random_range(0.0..1.0) < 0.6 {
                        aligned.set(x, y, true);
                    } else {
                        misaligned.set(x, y, true);
                    }
                }
            }
        }
        if let Some((x, y)) = first {
            aligned.set(x, y, true);
            misaligned.set(x, y, false);
        }

        let out = inpaint_features(&features, &garment, &aligned, &misaligned).unwrap();

        // Independent per-channel means over the aligned region.
        let count = aligned.count_ones() as f64;
        let mut means = vec![0.0f64; c_n];
        for c in 0..c_n {
            let mut sum = 0.0;
            for y in 0..h {
                for x in 0..w {
                    if aligned.get(x, y) {
                        sum += features.get(c, y, x) as f64;
                    }
                }
            }
            if count > 0.0 {
                means[c] = sum / count;
            }
        }

        for c in 0..c_n {
            for y in 0..h {
                for x in 0..w {
                    let v = out.get(c, y, x) as f64;
                    if !garment.get(x, y) {
                        assert_eq!(v, 0.0, "case {case}: nonzero outside garment");
                    } else if misaligned.get(x, y) {
                        assert!(
                            (v - means[c]).abs() < 1e-6,
                            "case {case}: mean fill off by {}",
                            (v - means[c]).abs()
                        );
                    } else {
                        assert_eq!(v, features.get(c, y, x) as f64, "case {case}: locality");
                    }
                }
            }
        }

        let twice = inpaint_features(&out, &garment, &aligned, &misaligned).unwrap();
        assert_eq!(out, twice, "case {case}: not idempotent");
    }
    finish("criterion 5 (feature inpainting)", start, Duration::from_secs(5));
}

#[test]
fn c06_modulation_properties() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(606);
    for case in 0..1_000 {
        let c_n = rng.random_range(1..=4usize);
        let h = rng.random_range(2..=16u32);
        let w = rng.random_range(2..=16u32);
        let mut values: Vec<f32> = (0..c_n * (h * w) as usize)
            .map(|_| rng.random_range(-10.0f32..10.0))
            .collect();
        // Every eighth case gets a zero-variance channel.
        if case % 8 == 0 {
            for v in values.iter_mut().take((h * w) as usize) {
                *v = 3.25;
            }
        }
        let input = FeatureMap::from_values(c_n, h, w, values).unwrap();
        let ones =
            FeatureMap::from_values(c_n, h, w, vec![1.0; c_n * (h * w) as usize]).unwrap();
        let zeros = FeatureMap::new(c_n, h, w);
        let out = spatially_adaptive_modulate(&input, &ones, &zeros, 1e-5).unwrap();

        let n = (h * w) as f64;
        for c in 0..c_n {
            let mut sum = 0.0f64;
            let mut in_best = (0u32, 0u32);
            let mut in_best_v = f32::NEG_INFINITY;
            let mut out_best = (0u32, 0u32);
            let mut out_best_v = f32::NEG_INFINITY;
            for y in 0..h {
                for x in 0..w {
                    let v = out.get(c, y, x);
                    assert!(v.is_finite(), "case {case}: non-finite output");
                    sum += v as f64;
                    if input.get(c, y, x) > in_best_v {
                        in_best_v = input.get(c, y, x);
                        in_best = (x, y);
                    }
                    if v > out_best_v {
                        out_best_v = v;
                        out_best = (x, y);
                    }
                }
            }
            assert!(
                (sum / n).abs() < 1e-6,
                "case {case}: channel {c} mean {}",
                sum / n
            );
            assert_eq!(in_best, out_best, "case {case}: argmax moved");
        }
    }
    finish("criterion 6 (modulation)", start, Duration::from_secs(5));
}

#[test]
fn c07_erase_statistics() {
    let start = Instant::now();
    // Fixture garment on a 192x120 canvas.
    let image = RasterImage::from_fn(192, 120, 4, |x, y| {
        if x >= 24 && x < 168 && y >= 15 && y < 105 {
            [160, 80, 60, 255]
        } else {
            [0, 0, 0, 0]
        }
    });
    let mask = BinaryMask::from_fn(192, 120, |x, y| image.alpha(x, y) > 0);
    let garment = WarpedGarment { image, mask };
    let total = garment.mask.count_ones() as f64;
    let params = EraseParams::default();

    let alpha = 0.9;
    let mut applied = 0u32;
    for seed in 0..10_000u64 {
        let out = random_erase(&garment, seed, alpha, &params);
        let erased = total - out.mask.count_ones() as f64;
        if erased > 0.0 {
            applied += 1;
            let fraction = erased / total;
            assert!(
                (params.min_area_fraction..=params.max_area_fraction).contains(&fraction),
                "seed {seed}: erased fraction {fraction:.4}"
            );
        }
    }
    // 0.9 +- 0.009 (three binomial sigmas at n = 10000).
    let rate = applied as f64 / 10_000.0;
    assert!(
        (0.891..=0.909).contains(&rate),
        "application rate {rate:.4} outside 0.9 +- 0.009"
    );

    // Determinism spot check across the seed range.
    for seed in (0..10_000u64).step_by(500) {
        let a = random_erase(&garment, seed, alpha, &params);
        let b = random_erase(&garment, seed, alpha, &params);
        assert_eq!(a.image, b.image, "seed {seed} not deterministic");
        assert_eq!(a.mask, b.mask, "seed {seed} not deterministic");
    }
    finish("criterion 7 (erase statistics)", start, Duration::from_secs(10));
}

#[test]
fn c08_layout_covariance() {
    let start = Instant::now();
    let params = LayoutParams::default();
    let base = synth::a_pose((320, 512));
    let mut rng = ChaCha12Rng::seed_from_u64(808);
    for trial in 0..500u64 {
        let pose = synth::jittered_pose(&base, trial, 0.02);

        let upper = build_layout(&pose, GarmentCategory::Upper, &params).unwrap();
        let lower = build_layout(&pose, GarmentCategory::Lower, &params).unwrap();
        assert_eq!(upper.present_count(), 10, "trial {trial}");
        assert_eq!(lower.present_count(), 5, "trial {trial}");

        // Translation covariance.
        let (dx, dy) = (rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
        let moved = build_layout(&pose.translated(dx, dy).unwrap(), GarmentCategory::Upper, &params)
            .unwrap();
        for (slot, quad) in &upper.quads {
            for (a, b) in moved.quads[slot].corners().iter().zip(quad.corners().iter()) {
                assert!((a.x - (b.x + dx)).abs() < 1e-9, "trial {trial} {slot:?}");
                assert!((a.y - (b.y + dy)).abs() < 1e-9, "trial {trial} {slot:?}");
            }
        }

        // Similarity covariance about a random center.
        let center = Point2::new(rng.random_range(0.0..320.0), rng.random_range(0.0..512.0));
        let k = rng.random_range(0.85..1.15);
        let scaled = build_layout(
            &pose.scaled_about(center, k).unwrap(),
            GarmentCategory::Upper,
            &params,
        )
        .unwrap();
        for (slot, quad) in &upper.quads {
            for (a, b) in scaled.quads[slot].corners().iter().zip(quad.corners().iter()) {
                assert!(
                    (a.x - (center.x + k * (b.x - center.x))).abs() < 1e-9,
                    "trial {trial} {slot:?}"
                );
                assert!(
                    (a.y - (center.y + k * (b.y - center.y))).abs() < 1e-9,
                    "trial {trial} {slot:?}"
                );
            }
        }

        // Mirror covariance: left/right slots swap to mirrored corners.
        let w = pose.canvas().0 as f64;
        let mirrored = build_layout(&pose.mirrored().unwrap(), GarmentCategory::Upper, &params)
            .unwrap();
        for (slot, quad) in &upper.quads {
            let twin = &mirrored.quads[&slot.mirrored()];
            let mut expected: Vec<(f64, f64)> =
                quad.corners().iter().map(|p| (w - p.x, p.y)).collect();
            expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got: Vec<(f64, f64)> = twin.corners().iter().map(|p| (p.x, p.y)).collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, e) in got.iter().zip(expected.iter()) {
                assert!((g.0 - e.0).abs() < 1e-9, "trial {trial} {slot:?}");
                assert!((g.1 - e.1).abs() < 1e-9, "trial {trial} {slot:?}");
            }
        }
    }
    finish("criterion 8 (layout covariance)", start, Duration::from_secs(2));
}

#[test]
fn c09_edit_locality_and_involution() {
    use patchwarp::edit::{
        local_shape_edit, outfit_compose, set_dressing_order, DressingOrder, EditCommand,
    };

    let start = Instant::now();
    let params = LayoutParams::default();
    let mk = |id: &str, seed, wardrobe| {
        synth::synth_person(&SynthSpec {
            id: id.into(),
            canvas: (256, 384),
            wardrobe,
            upper_texture: Texture::Solid([200, 40, 40]),
            lower_texture: Texture::Solid([40, 40, 200]),
            pose_seed: Some(seed),
        })
        .unwrap()
    };
    let upper_src = mk("u", 21, Wardrobe::UpperOnly);
    let lower_src = mk("l", 22, Wardrobe::LowerOnly);
    let target = mk("t", 23, Wardrobe::UpperOnly);
    let bundle = outfit_compose(&upper_src, &lower_src, &target, &params).unwrap();

    // Edit locality: a trim touches only the named patch.
    let set = bundle.upper.as_ref().unwrap().patches.clone();
    let trimmed = local_shape_edit(
        &set,
        &EditCommand::TrimPatch {
            slot: PatchSlot::LeftLowerArm,
            fraction: 0.5,
            end: patchwarp::edit::TrimEnd::Proximal,
        },
    )
    .unwrap();
    for (slot, patch) in &set.patches {
        if *slot == PatchSlot::LeftLowerArm {
            assert_eq!(trimmed.patches[slot].image, patch.image);
            assert_eq!(
                trimmed.patches[slot].h_source_to_norm.to_row_major(),
                patch.h_source_to_norm.to_row_major()
            );
            assert_ne!(trimmed.patches[slot].valid_mask, patch.valid_mask);
        } else {
            assert_eq!(&trimmed.patches[slot], patch, "{slot:?} must be untouched");
        }
    }

    // Order toggling is an involution on the rendering.
    let toggled = set_dressing_order(
        &set_dressing_order(&bundle, DressingOrder::TuckIn).unwrap(),
        DressingOrder::TuckOut,
    )
    .unwrap();
    let direct = set_dressing_order(&bundle, DressingOrder::TuckOut).unwrap();
    let a = toggled.composite().unwrap();
    let b = direct.composite().unwrap();
    assert_eq!(a.image, b.image);
    assert_eq!(a.mask, b.mask);

    // Dropping a patch equals stitching without it, exactly.
    let dropped = local_shape_edit(
        &set,
        &EditCommand::DropPatch {
            slot: PatchSlot::Neck,
        },
    )
    .unwrap();
    let layer = bundle.upper.as_ref().unwrap();
    let canvas = target.pose.canvas();
    let (with_drop, _) = patchwarp::warp::retarget_set(
        &dropped,
        &layer.target_quads,
        canvas,
        &patchwarp::warp::DEFAULT_Z_ORDER,
    )
    .unwrap();
    let mut quads_without = layer.target_quads.clone();
    quads_without.remove(&PatchSlot::Neck);
    let mut set_without = set.clone();
    set_without.patches.remove(&PatchSlot::Neck);
    let (omitted, _) = patchwarp::warp::retarget_set(
        &set_without,
        &quads_without,
        canvas,
        &patchwarp::warp::DEFAULT_Z_ORDER,
    )
    .unwrap();
    assert_eq!(with_drop.image, omitted.image);
    assert_eq!(with_drop.mask, omitted.mask);

    finish("criterion 9 (edit locality and involution)", start, Duration::from_secs(5));
}

fn tree_files(root: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    files.sort();
    files
}

#[test]
fn c10_end_to_end_determinism() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");

    // Five persons; twenty retarget jobs over ordered pairs.
    let wardrobes = [
        Wardrobe::UpperOnly,
        Wardrobe::UpperAndLower,
        Wardrobe::Dress,
        Wardrobe::LowerOnly,
        Wardrobe::UpperOnly,
    ];
    for (i, wardrobe) in wardrobes.into_iter().enumerate() {
        let person = synth::synth_person(&SynthSpec {
            id: format!("p{i}"),
            canvas: (160, 256),
            wardrobe,
            upper_texture: Texture::Waves { period: 26.0 },
            lower_texture: Texture::Gradient([40, 40, 140], [120, 200, 80]),
            pose_seed: Some(40 + i as u64),
        })
        .unwrap();
        io::save_person(&person, &data.join(format!("p{i}"))).unwrap();
    }

    let mut manifest = String::new();
    let mut job = 0;
    for s in 0..5 {
        for t in 0..5 {
            if s == t || job >= 20 {
                continue;
            }
            manifest.push_str(&format!(
                "{{\"id\":\"job{job:02}\",\"op\":\"retarget\",\"source\":\"p{s}\",\"target\":\"p{t}\",\"seed\":{},\"alpha\":0.9}}\n",
                100 + job
            ));
            job += 1;
        }
    }
    let manifest_path = tmp.path().join("jobs.jsonl");
    std::fs::write(&manifest_path, &manifest).unwrap();
    let config_path = tmp.path().join("config.toml");
    std::fs::write(
        &config_path,
        format!("data_root = {:?}\n", data.to_str().unwrap()),
    )
    .unwrap();

    let run_batch = |out_name: &str, jobs: &str| {
        let out_root = tmp.path().join(out_name);
        let output = std::process::Command::new(env!("CARGO_BIN_EXE_patchwarp"))
            .args([
                "batch",
                manifest_path.to_str().unwrap(),
                out_root.to_str().unwrap(),
                "--config",
                config_path.to_str().unwrap(),
                "--jobs",
                jobs,
            ])
            .output()
            .expect("batch runs");
        assert_eq!(
            output.status.code(),
            Some(0),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        out_root
    };
    let serial = run_batch("serial", "1");
    let parallel = run_batch("parallel", "4");

    let files_serial = tree_files(&serial);
    let files_parallel = tree_files(&parallel);
    assert_eq!(files_serial, files_parallel, "output trees differ in shape");
    assert_eq!(files_serial.len(), 20 * 4, "each job writes four files");
    for rel in &files_serial {
        let a = std::fs::read(serial.join(rel)).unwrap();
        let b = std::fs::read(parallel.join(rel)).unwrap();
        assert_eq!(a, b, "file {} differs between parallelism 1 and 4", rel.display());
    }

    // Serialization round trips, bit-exact: archive, warped garment,
    // feature map, mask.
    let person = io::load_person(&data.join("p0")).unwrap();
    let archive_dir = tmp.path().join("arch");
    let garment =
        patchwarp::parsing::garment_mask(&person.parsing, GarmentCategory::Upper).unwrap();
    let layout = build_layout(&person.pose, GarmentCategory::Upper, &LayoutParams::default())
        .unwrap();
    let mut patches = std::collections::BTreeMap::new();
    for (slot, quad) in &layout.quads {
        patches.insert(
            *slot,
            patchwarp::warp::normalize_patch(&person.image, quad, *slot, &garment).unwrap(),
        );
    }
    let set = patchwarp::warp::PatchSet {
        category: GarmentCategory::Upper,
        patches,
        source_pose: person.pose.clone(),
    };
    io::save_patchset(&set, &archive_dir).unwrap();
    let set_back = io::load_patchset(&archive_dir).unwrap();
    assert_eq!(set.category, set_back.category);
    assert_eq!(set.source_pose, set_back.source_pose);
    for (slot, patch) in &set.patches {
        assert_eq!(patch, &set_back.patches[slot]);
    }

    let fmap = FeatureMap::from_values(
        3,
        8,
        8,
        (0..192).map(|i| (i as f32 * 0.713).sin() * 4.0).collect(),
    )
    .unwrap();
    let fmap_path = tmp.path().join("f.fmap");
    io::save_feature_map(&fmap, &fmap_path).unwrap();
    assert_eq!(io::load_feature_map(&fmap_path).unwrap(), fmap);

    let mask_path = tmp.path().join("m.png");
    io::save_mask_png(&garment, &mask_path).unwrap();
    assert_eq!(io::load_mask_png(&mask_path).unwrap(), garment);

    finish("criterion 10 (end-to-end determinism)", start, Duration::from_secs(30));
}
