//! Deterministic synthetic fixtures: poses, garments, and whole person
//! records with mutually consistent image, parsing, and pose.
//!
//! The parsing is painted first by rasterizing the pose-derived patch quads,
//! so the garment mask recovered from it matches the quad union exactly;
//! the image is then colored from the parsing with band-limited textures.
//! Everything is a pure function of the spec, which keeps batch outputs
//! byte-reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::Result;
use crate::geometry::{Point2, Quadrilateral};
use crate::io::PersonRecord;
use crate::layout::{build_layout, GarmentCategory, LayoutParams, PatchSlot};
use crate::mask::BinaryMask;
use crate::parsing::{LabelTable, ParsingMap};
use crate::pose::{Joint, PoseSkeleton, JOINT_COUNT};
use crate::raster::RasterImage;

/// Canonical T-pose: arms horizontal, all confidences 1.
pub fn t_pose(canvas: (u32, u32)) -> PoseSkeleton {
    let (w, h) = (canvas.0 as f64, canvas.1 as f64);
    let mut joints = [(Point2::new(0.0, 0.0), 1.0); JOINT_COUNT];
    let mut set = |j: Joint, fx: f64, fy: f64| {
        joints[j as usize] = (Point2::new(fx * w, fy * h), 1.0);
    };
    set(Joint::Nose, 0.50, 0.10);
    set(Joint::Neck, 0.50, 0.18);
    set(Joint::RightShoulder, 0.38, 0.20);
    set(Joint::RightElbow, 0.24, 0.20);
    set(Joint::RightWrist, 0.10, 0.20);
    set(Joint::LeftShoulder, 0.62, 0.20);
    set(Joint::LeftElbow, 0.76, 0.20);
    set(Joint::LeftWrist, 0.90, 0.20);
    set(Joint::RightHip, 0.42, 0.52);
    set(Joint::RightKnee, 0.41, 0.72);
    set(Joint::RightAnkle, 0.40, 0.92);
    set(Joint::LeftHip, 0.58, 0.52);
    set(Joint::LeftKnee, 0.59, 0.72);
    set(Joint::LeftAnkle, 0.60, 0.92);
    set(Joint::RightEye, 0.47, 0.08);
    set(Joint::LeftEye, 0.53, 0.08);
    set(Joint::RightEar, 0.44, 0.09);
    set(Joint::LeftEar, 0.56, 0.09);
    PoseSkeleton::new(joints, canvas).expect("canonical pose is valid")
}

/// A-pose: arms angled downward, legs slightly apart.
pub fn a_pose(canvas: (u32, u32)) -> PoseSkeleton {
    let (w, h) = (canvas.0 as f64, canvas.1 as f64);
    let mut joints = *t_pose(canvas).joints();
    let set = |joints: &mut [(Point2, f64); JOINT_COUNT], j: Joint, fx: f64, fy: f64| {
        joints[j as usize].0 = Point2::new(fx * w, fy * h);
    };
    set(&mut joints, Joint::RightElbow, 0.28, 0.33);
    set(&mut joints, Joint::RightWrist, 0.22, 0.46);
    set(&mut joints, Joint::LeftElbow, 0.72, 0.33);
    set(&mut joints, Joint::LeftWrist, 0.78, 0.46);
    PoseSkeleton::new(joints, canvas).expect("canonical pose is valid")
}

/// Jitters every joint of a base pose by up to `amount` of the canvas
/// dimensions, deterministically per seed.
pub fn jittered_pose(base: &PoseSkeleton, seed: u64, amount: f64) -> PoseSkeleton {
    let (w, h) = (base.canvas().0 as f64, base.canvas().1 as f64);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut joints = *base.joints();
    for (p, _) in &mut joints {
        p.x += rng.random_range(-amount..amount) * w;
        p.y += rng.random_range(-amount..amount) * h;
    }
    PoseSkeleton::new(joints, base.canvas()).expect("jitter keeps joints in tolerance")
}

/// Band-limited test textures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Texture {
    Solid([u8; 3]),
    /// Horizontal linear gradient between two colors.
    Gradient([u8; 3], [u8; 3]),
    /// Smooth sinusoidal stripes along x with the given period in pixels.
    Waves { period: f64 },
    /// Product of sinusoids in x and y.
    Checker { period: f64 },
    /// Radial gradient from the canvas center.
    Radial,
}

impl Texture {
    fn color_at(&self, x: u32, y: u32, canvas: (u32, u32)) -> [u8; 3] {
        match self {
            Texture::Solid(c) => *c,
            Texture::Gradient(a, b) => {
                let t = x as f64 / canvas.0.max(1) as f64;
                let mut out = [0u8; 3];
                for i in 0..3 {
                    out[i] = (a[i] as f64 + t * (b[i] as f64 - a[i] as f64)).round() as u8;
                }
                out
            }
            Texture::Waves { period } => {
                let v = 140.0 + 80.0 * (x as f64 * std::f64::consts::TAU / period).sin();
                [v as u8, (v * 0.6) as u8, 90]
            }
            Texture::Checker { period } => {
                let vx = (x as f64 * std::f64::consts::TAU / period).sin();
                let vy = (y as f64 * std::f64::consts::TAU / period).sin();
                let v = 140.0 + 70.0 * vx * vy;
                [40, v as u8, (255.0 - v) as u8]
            }
            Texture::Radial => {
                let cx = canvas.0 as f64 / 2.0;
                let cy = canvas.1 as f64 / 2.0;
                let d = ((x as f64 - cx).hypot(y as f64 - cy))
                    / (cx.hypot(cy)).max(1.0);
                let v = 200.0 - 120.0 * d;
                [v as u8, 70, (v * 0.8) as u8]
            }
        }
    }
}

/// Which garments the synthetic person wears.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wardrobe {
    UpperOnly,
    LowerOnly,
    Dress,
    UpperAndLower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub id: String,
    pub canvas: (u32, u32),
    pub wardrobe: Wardrobe,
    pub upper_texture: Texture,
    pub lower_texture: Texture,
    /// Jitter seed; `None` keeps the canonical A-pose.
    pub pose_seed: Option<u64>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            id: "person".into(),
            canvas: (320, 512),
            wardrobe: Wardrobe::UpperOnly,
            upper_texture: Texture::Waves { period: 28.0 },
            lower_texture: Texture::Solid([60, 60, 120]),
            pose_seed: None,
        }
    }
}

/// Rasterizes quads into a mask using the integer-coordinate convention the
/// warp uses (a pixel belongs to the quad when its integer point is inside).
pub fn rasterize_quads<'a>(
    quads: impl IntoIterator<Item = &'a Quadrilateral>,
    canvas: (u32, u32),
) -> BinaryMask {
    let mut mask = BinaryMask::new(canvas.0, canvas.1);
    for quad in quads {
        let (min, max) = quad.bounding_box();
        let x0 = min.x.floor().max(0.0) as u32;
        let y0 = min.y.floor().max(0.0) as u32;
        let x1 = (max.x.ceil() as i64).clamp(0, canvas.0 as i64 - 1) as u32;
        let y1 = (max.y.ceil() as i64).clamp(0, canvas.1 as i64 - 1) as u32;
        for y in y0..=y1 {
            for x in x0..=x1 {
                if quad.contains(Point2::new(x as f64, y as f64)) {
                    mask.set(x, y, true);
                }
            }
        }
    }
    mask
}

const LABEL_BACKGROUND: u8 = 0;
const LABEL_UPPER: u8 = 5;
const LABEL_DRESS: u8 = 6;
const LABEL_LOWER: u8 = 9;
const LABEL_FACE: u8 = 13;
const LABEL_RIGHT_ARM: u8 = 15;
const LABEL_RIGHT_LEG: u8 = 17;

fn paint_mask(labels: &mut [u8], width: u32, mask: &BinaryMask, label: u8) {
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                labels[(y * width + x) as usize] = label;
            }
        }
    }
}

/// Builds a person whose parsing garment regions coincide exactly with the
/// pose-derived patch quads.
pub fn synth_person(spec: &SynthSpec) -> Result<PersonRecord> {
    let pose = match spec.pose_seed {
        Some(seed) => jittered_pose(&a_pose(spec.canvas), seed, 0.02),
        None => a_pose(spec.canvas),
    };
    let params = LayoutParams::default();
    let canvas = spec.canvas;
    let (w, h) = canvas;

    let upper_layout = build_layout(&pose, GarmentCategory::Upper, &params)?;
    let lower_layout = build_layout(&pose, GarmentCategory::Lower, &params)?;

    let upper_body_slots = [
        PatchSlot::Torso,
        PatchSlot::Neck,
        PatchSlot::LeftUpperArm,
        PatchSlot::LeftLowerArm,
        PatchSlot::RightUpperArm,
        PatchSlot::RightLowerArm,
    ];
    let shirt_quads: Vec<&Quadrilateral> = upper_body_slots
        .iter()
        .filter_map(|s| upper_layout.quads.get(s))
        .collect();
    let shirt = rasterize_quads(shirt_quads.into_iter(), canvas);
    let pants = rasterize_quads(lower_layout.quads.values(), canvas);
    let dress_slots = [
        PatchSlot::Torso,
        PatchSlot::Neck,
        PatchSlot::LeftUpperArm,
        PatchSlot::RightUpperArm,
        PatchSlot::LeftUpperLeg,
        PatchSlot::RightUpperLeg,
    ];
    let dress = rasterize_quads(
        dress_slots
            .iter()
            .filter_map(|s| upper_layout.quads.get(s)),
        canvas,
    );

    let mut labels = vec![LABEL_BACKGROUND; w as usize * h as usize];

    // Bare skin strips under the garments: lower legs for dresses, arms for
    // lower-only, legs for upper-only.
    let leg_quads = rasterize_quads(
        [PatchSlot::LeftLowerLeg, PatchSlot::RightLowerLeg]
            .iter()
            .filter_map(|s| lower_layout.quads.get(s)),
        canvas,
    );
    let arm_quads = rasterize_quads(
        [
            PatchSlot::LeftUpperArm,
            PatchSlot::LeftLowerArm,
            PatchSlot::RightUpperArm,
            PatchSlot::RightLowerArm,
        ]
        .iter()
        .filter_map(|s| upper_layout.quads.get(s)),
        canvas,
    );

    // Face disc, painted before garments so garment regions stay exact.
    let nose = pose.position(Joint::Nose);
    let radius = 0.05 * h as f64;
    for y in 0..h {
        for x in 0..w {
            if (x as f64 - nose.x).hypot(y as f64 - nose.y) <= radius {
                labels[(y * w + x) as usize] = LABEL_FACE;
            }
        }
    }

    match spec.wardrobe {
        Wardrobe::UpperOnly => {
            paint_mask(&mut labels, w, &leg_quads, LABEL_RIGHT_LEG);
            paint_mask(&mut labels, w, &shirt, LABEL_UPPER);
        }
        Wardrobe::LowerOnly => {
            paint_mask(&mut labels, w, &arm_quads, LABEL_RIGHT_ARM);
            paint_mask(&mut labels, w, &pants, LABEL_LOWER);
        }
        Wardrobe::Dress => {
            paint_mask(&mut labels, w, &leg_quads, LABEL_RIGHT_LEG);
            paint_mask(&mut labels, w, &dress, LABEL_DRESS);
        }
        Wardrobe::UpperAndLower => {
            paint_mask(&mut labels, w, &leg_quads, LABEL_RIGHT_LEG);
            paint_mask(&mut labels, w, &pants, LABEL_LOWER);
            paint_mask(&mut labels, w, &shirt, LABEL_UPPER);
        }
    }

    let parsing = ParsingMap::new(w, h, labels, LabelTable::default_lip20())?;

    let image = RasterImage::from_fn(w, h, 3, |x, y| {
        let label = parsing.label(x, y);
        let rgb = match label {
            LABEL_UPPER => spec.upper_texture.color_at(x, y, canvas),
            LABEL_DRESS => spec.upper_texture.color_at(x, y, canvas),
            LABEL_LOWER => spec.lower_texture.color_at(x, y, canvas),
            LABEL_FACE => [205, 170, 150],
            LABEL_RIGHT_ARM | LABEL_RIGHT_LEG => [198, 160, 138],
            _ => [235, 235, 235],
        };
        [rgb[0], rgb[1], rgb[2], 255]
    });

    Ok(PersonRecord {
        id: spec.id.clone(),
        image,
        pose,
        parsing,
    })
}
