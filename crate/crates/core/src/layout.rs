//! Pose-guided quadrilateral patch layout: ten upper-body slots and five
//! lower-body slots derived from a skeleton.
//!
//! The corner rules are:
//! - torso (upper/dress): the shoulder and hip joints, each pushed outward
//!   from their centroid by `torso_margin_ratio` times the shoulder-to-hip
//!   distance;
//! - torso (lower): a pelvis band between the waist (hips raised toward the
//!   shoulders by [`WAIST_RISE`]) and the seat (hips extended downward by
//!   [`SEAT_DROP`]), pushed outward the same way — its top edge is the
//!   waistline used by dressing-order edits;
//! - limbs: oriented rectangles around each bone via [`limb_quad`], with
//!   width proportional to segment length; a lower segment reuses the upper
//!   segment's joint edge so adjacent patches share that edge exactly;
//! - neck: a rectangle spanning the shoulders horizontally, extending upward
//!   from the neck joint by `neck_height_ratio` times the shoulder width.
//!
//! Slots whose governing joints fall below the confidence threshold are
//! dropped rather than extrapolated, as are slots whose joints collapse into
//! a degenerate quadrilateral. A missing torso is an error: the layout
//! cannot anchor without it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Quadrilateral};
use crate::pose::{Joint, PoseSkeleton};

/// Garment category selecting the slot set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GarmentCategory {
    Upper,
    Lower,
    Dress,
}

impl GarmentCategory {
    /// The slots this category may populate (10 for upper/dress, 5 for
    /// lower).
    pub fn slots(&self) -> &'static [PatchSlot] {
        match self {
            GarmentCategory::Upper | GarmentCategory::Dress => &UPPER_SLOTS,
            GarmentCategory::Lower => &LOWER_SLOTS,
        }
    }
}

impl std::fmt::Display for GarmentCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GarmentCategory::Upper => "upper",
            GarmentCategory::Lower => "lower",
            GarmentCategory::Dress => "dress",
        };
        f.write_str(s)
    }
}

/// One named patch position. Torso and the leg slots appear in both the
/// upper and lower slot sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchSlot {
    Torso,
    Neck,
    LeftUpperArm,
    LeftLowerArm,
    RightUpperArm,
    RightLowerArm,
    LeftUpperLeg,
    LeftLowerLeg,
    RightUpperLeg,
    RightLowerLeg,
}

pub const UPPER_SLOTS: [PatchSlot; 10] = [
    PatchSlot::Torso,
    PatchSlot::Neck,
    PatchSlot::LeftUpperArm,
    PatchSlot::LeftLowerArm,
    PatchSlot::RightUpperArm,
    PatchSlot::RightLowerArm,
    PatchSlot::LeftUpperLeg,
    PatchSlot::LeftLowerLeg,
    PatchSlot::RightUpperLeg,
    PatchSlot::RightLowerLeg,
];

pub const LOWER_SLOTS: [PatchSlot; 5] = [
    PatchSlot::Torso,
    PatchSlot::LeftUpperLeg,
    PatchSlot::LeftLowerLeg,
    PatchSlot::RightUpperLeg,
    PatchSlot::RightLowerLeg,
];

impl PatchSlot {
    pub fn name(&self) -> &'static str {
        match self {
            PatchSlot::Torso => "torso",
            PatchSlot::Neck => "neck",
            PatchSlot::LeftUpperArm => "left_upper_arm",
            PatchSlot::LeftLowerArm => "left_lower_arm",
            PatchSlot::RightUpperArm => "right_upper_arm",
            PatchSlot::RightLowerArm => "right_lower_arm",
            PatchSlot::LeftUpperLeg => "left_upper_leg",
            PatchSlot::LeftLowerLeg => "left_lower_leg",
            PatchSlot::RightUpperLeg => "right_upper_leg",
            PatchSlot::RightLowerLeg => "right_lower_leg",
        }
    }

    pub fn from_name(name: &str) -> Option<PatchSlot> {
        Some(match name {
            "torso" => PatchSlot::Torso,
            "neck" => PatchSlot::Neck,
            "left_upper_arm" => PatchSlot::LeftUpperArm,
            "left_lower_arm" => PatchSlot::LeftLowerArm,
            "right_upper_arm" => PatchSlot::RightUpperArm,
            "right_lower_arm" => PatchSlot::RightLowerArm,
            "left_upper_leg" => PatchSlot::LeftUpperLeg,
            "left_lower_leg" => PatchSlot::LeftLowerLeg,
            "right_upper_leg" => PatchSlot::RightUpperLeg,
            "right_lower_leg" => PatchSlot::RightLowerLeg,
            _ => return None,
        })
    }

    /// The slot at the mirrored position when left and right swap.
    pub fn mirrored(&self) -> PatchSlot {
        match self {
            PatchSlot::Torso => PatchSlot::Torso,
            PatchSlot::Neck => PatchSlot::Neck,
            PatchSlot::LeftUpperArm => PatchSlot::RightUpperArm,
            PatchSlot::LeftLowerArm => PatchSlot::RightLowerArm,
            PatchSlot::RightUpperArm => PatchSlot::LeftUpperArm,
            PatchSlot::RightLowerArm => PatchSlot::LeftLowerArm,
            PatchSlot::LeftUpperLeg => PatchSlot::RightUpperLeg,
            PatchSlot::LeftLowerLeg => PatchSlot::RightLowerLeg,
            PatchSlot::RightUpperLeg => PatchSlot::LeftUpperLeg,
            PatchSlot::RightLowerLeg => PatchSlot::LeftLowerLeg,
        }
    }
}

/// Tunable corner-rule parameters. All widths are proportional to joint
/// distances so the layout is translation-, scale-, and mirror-covariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    pub arm_width_ratio: f64,
    pub leg_width_ratio: f64,
    pub neck_height_ratio: f64,
    pub torso_margin_ratio: f64,
    pub min_confidence: f64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            arm_width_ratio: 0.45,
            leg_width_ratio: 0.50,
            neck_height_ratio: 0.35,
            torso_margin_ratio: 0.15,
            min_confidence: 0.2,
        }
    }
}

impl LayoutParams {
    pub fn validate(&self) -> Result<()> {
        let ratios = [
            ("arm_width_ratio", self.arm_width_ratio),
            ("leg_width_ratio", self.leg_width_ratio),
            ("neck_height_ratio", self.neck_height_ratio),
            ("torso_margin_ratio", self.torso_margin_ratio),
        ];
        for (name, v) in ratios {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::MalformedJson {
                    path: "<layout params>".into(),
                    detail: format!("{name} must be positive, got {v}"),
                });
            }
        }
        if !(0.0..=1.0).contains(&self.min_confidence) {
            return Err(Error::MalformedJson {
                path: "<layout params>".into(),
                detail: format!("min_confidence {} outside [0, 1]", self.min_confidence),
            });
        }
        Ok(())
    }
}

/// Fraction of the shoulder-to-hip distance the lower-garment torso quad
/// rises above the hip line (its top edge is the waistline).
pub const WAIST_RISE: f64 = 0.35;
/// Fraction of the shoulder-to-hip distance it extends below the hip line.
pub const SEAT_DROP: f64 = 0.25;

/// The quadrilateral layout for one pose and category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchLayout {
    pub category: GarmentCategory,
    /// Present slots only; a slot absent from the map has `present = false`.
    pub quads: BTreeMap<PatchSlot, Quadrilateral>,
}

impl PatchLayout {
    pub fn is_present(&self, slot: PatchSlot) -> bool {
        self.quads.contains_key(&slot)
    }

    pub fn present_count(&self) -> usize {
        self.quads.len()
    }
}

/// Oriented rectangle around a limb segment.
///
/// With axis direction `a = (distal - proximal) / |..|` and normal
/// `n = (a.y, -a.x)`, the corners are
/// `[proximal + w/2 n, distal + w/2 n, distal - w/2 n, proximal - w/2 n]`,
/// anchor first; the proximal edge joins corners 0 and 3.
pub fn limb_quad(proximal: Point2, distal: Point2, width: f64) -> Result<Quadrilateral> {
    let len = proximal.distance(&distal);
    if len <= 2.0 {
        return Err(Error::DegenerateQuad {
            detail: format!("limb segment length {len:.3} px (need > 2)"),
        });
    }
    let ax = (distal.x - proximal.x) / len;
    let ay = (distal.y - proximal.y) / len;
    let (nx, ny) = (ay, -ax);
    let h = width / 2.0;
    Quadrilateral::new([
        Point2::new(proximal.x + h * nx, proximal.y + h * ny),
        Point2::new(distal.x + h * nx, distal.y + h * ny),
        Point2::new(distal.x - h * nx, distal.y - h * ny),
        Point2::new(proximal.x - h * nx, proximal.y - h * ny),
    ])
}

/// The distal edge of a limb quad, as (plus-normal corner, minus-normal
/// corner). Used to chain a lower segment onto an upper one.
fn distal_edge(proximal: Point2, distal: Point2, width: f64) -> Option<(Point2, Point2)> {
    let len = proximal.distance(&distal);
    if len <= 2.0 {
        return None;
    }
    let ax = (distal.x - proximal.x) / len;
    let ay = (distal.y - proximal.y) / len;
    let (nx, ny) = (ay, -ax);
    let h = width / 2.0;
    Some((
        Point2::new(distal.x + h * nx, distal.y + h * ny),
        Point2::new(distal.x - h * nx, distal.y - h * ny),
    ))
}

/// Lower-segment quad whose proximal edge is the upper segment's distal
/// edge, so the two patches share the joint edge exactly.
fn chained_limb_quad(
    shared_edge: (Point2, Point2),
    joint: Point2,
    distal: Point2,
    width: f64,
) -> Result<Quadrilateral> {
    let len = joint.distance(&distal);
    if len <= 2.0 {
        return Err(Error::DegenerateQuad {
            detail: format!("limb segment length {len:.3} px (need > 2)"),
        });
    }
    let ax = (distal.x - joint.x) / len;
    let ay = (distal.y - joint.y) / len;
    let (nx, ny) = (ay, -ax);
    let h = width / 2.0;
    Quadrilateral::new([
        shared_edge.0,
        Point2::new(distal.x + h * nx, distal.y + h * ny),
        Point2::new(distal.x - h * nx, distal.y - h * ny),
        shared_edge.1,
    ])
}

fn push_outward(corners: [Point2; 4], margin: f64) -> [Point2; 4] {
    let cx = corners.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = corners.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mut out = corners;
    for p in &mut out {
        let dx = p.x - cx;
        let dy = p.y - cy;
        let d = dx.hypot(dy);
        if d > 1e-12 {
            p.x += margin * dx / d;
            p.y += margin * dy / d;
        }
    }
    out
}

fn midpoint(a: Point2, b: Point2) -> Point2 {
    Point2::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
}

/// Shoulder-to-hip distance: between the shoulder midpoint and hip midpoint.
fn torso_height(pose: &PoseSkeleton) -> f64 {
    let sho = midpoint(
        pose.position(Joint::RightShoulder),
        pose.position(Joint::LeftShoulder),
    );
    let hip = midpoint(pose.position(Joint::RightHip), pose.position(Joint::LeftHip));
    sho.distance(&hip)
}

fn upper_torso_quad(pose: &PoseSkeleton, params: &LayoutParams) -> Result<Quadrilateral> {
    let rsho = pose.position(Joint::RightShoulder);
    let lsho = pose.position(Joint::LeftShoulder);
    let rhip = pose.position(Joint::RightHip);
    let lhip = pose.position(Joint::LeftHip);
    let margin = params.torso_margin_ratio * torso_height(pose);
    Quadrilateral::new(push_outward([rsho, lsho, lhip, rhip], margin))
}

/// Pelvis band for lower garments: waist line down to just below the hips.
fn lower_torso_quad(pose: &PoseSkeleton, params: &LayoutParams) -> Result<Quadrilateral> {
    let rsho = pose.position(Joint::RightShoulder);
    let lsho = pose.position(Joint::LeftShoulder);
    let rhip = pose.position(Joint::RightHip);
    let lhip = pose.position(Joint::LeftHip);
    let lerp = |a: Point2, b: Point2, t: f64| {
        Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    };
    // Waist corners sit between hip and shoulder; seat corners extend the
    // shoulder-to-hip direction past the hip.
    let r_waist = lerp(rhip, rsho, WAIST_RISE);
    let l_waist = lerp(lhip, lsho, WAIST_RISE);
    let r_seat = lerp(rhip, rsho, -SEAT_DROP);
    let l_seat = lerp(lhip, lsho, -SEAT_DROP);
    let margin = params.torso_margin_ratio * torso_height(pose);
    Quadrilateral::new(push_outward([r_waist, l_waist, l_seat, r_seat], margin))
}

fn neck_quad(pose: &PoseSkeleton, params: &LayoutParams) -> Result<Quadrilateral> {
    let rsho = pose.position(Joint::RightShoulder);
    let lsho = pose.position(Joint::LeftShoulder);
    let neck = pose.position(Joint::Neck);
    let x0 = rsho.x.min(lsho.x);
    let x1 = rsho.x.max(lsho.x);
    let height = params.neck_height_ratio * rsho.distance(&lsho);
    let y1 = neck.y;
    let y0 = neck.y - height;
    Quadrilateral::new([
        Point2::new(x0, y0),
        Point2::new(x1, y0),
        Point2::new(x1, y1),
        Point2::new(x0, y1),
    ])
}

struct LimbSpec {
    slot: PatchSlot,
    proximal: Joint,
    distal: Joint,
    /// Upper-segment slot whose distal edge this one chains onto, with the
    /// upper segment's own joints.
    chain: Option<(Joint, Joint)>,
    is_arm: bool,
}

const LIMB_SPECS: [LimbSpec; 8] = [
    LimbSpec {
        slot: PatchSlot::LeftUpperArm,
        proximal: Joint::LeftShoulder,
        distal: Joint::LeftElbow,
        chain: None,
        is_arm: true,
    },
    LimbSpec {
        slot: PatchSlot::LeftLowerArm,
        proximal: Joint::LeftElbow,
        distal: Joint::LeftWrist,
        chain: Some((Joint::LeftShoulder, Joint::LeftElbow)),
        is_arm: true,
    },
    LimbSpec {
        slot: PatchSlot::RightUpperArm,
        proximal: Joint::RightShoulder,
        distal: Joint::RightElbow,
        chain: None,
        is_arm: true,
    },
    LimbSpec {
        slot: PatchSlot::RightLowerArm,
        proximal: Joint::RightElbow,
        distal: Joint::RightWrist,
        chain: Some((Joint::RightShoulder, Joint::RightElbow)),
        is_arm: true,
    },
    LimbSpec {
        slot: PatchSlot::LeftUpperLeg,
        proximal: Joint::LeftHip,
        distal: Joint::LeftKnee,
        chain: None,
        is_arm: false,
    },
    LimbSpec {
        slot: PatchSlot::LeftLowerLeg,
        proximal: Joint::LeftKnee,
        distal: Joint::LeftAnkle,
        chain: Some((Joint::LeftHip, Joint::LeftKnee)),
        is_arm: false,
    },
    LimbSpec {
        slot: PatchSlot::RightUpperLeg,
        proximal: Joint::RightHip,
        distal: Joint::RightKnee,
        chain: None,
        is_arm: false,
    },
    LimbSpec {
        slot: PatchSlot::RightLowerLeg,
        proximal: Joint::RightKnee,
        distal: Joint::RightAnkle,
        chain: Some((Joint::RightHip, Joint::RightKnee)),
        is_arm: false,
    },
];

/// Builds the patch layout for a pose.
///
/// Errors with `MissingCoreJoints` when any of the four torso anchor joints
/// is below `min_confidence`; other slots are silently dropped when their
/// joints are unconfident or collapse into a degenerate quad.
pub fn build_layout(
    pose: &PoseSkeleton,
    category: GarmentCategory,
    params: &LayoutParams,
) -> Result<PatchLayout> {
    params.validate()?;
    let torso_joints = [
        Joint::RightShoulder,
        Joint::LeftShoulder,
        Joint::RightHip,
        Joint::LeftHip,
    ];
    if !pose.all_confident(&torso_joints, params.min_confidence) {
        return Err(Error::MissingCoreJoints {
            detail: format!(
                "shoulder/hip confidences below {} cannot anchor the torso",
                params.min_confidence
            ),
        });
    }

    let mut quads = BTreeMap::new();
    let torso = match category {
        GarmentCategory::Lower => lower_torso_quad(pose, params)?,
        _ => upper_torso_quad(pose, params)?,
    };
    quads.insert(PatchSlot::Torso, torso);

    let include_arms_neck = !matches!(category, GarmentCategory::Lower);
    if include_arms_neck
        && pose.all_confident(
            &[Joint::Neck, Joint::LeftShoulder, Joint::RightShoulder],
            params.min_confidence,
        )
    {
        if let Ok(q) = neck_quad(pose, params) {
            quads.insert(PatchSlot::Neck, q);
        }
    }

    for spec in &LIMB_SPECS {
        if spec.is_arm && !include_arms_neck {
            continue;
        }
        if !pose.all_confident(&[spec.proximal, spec.distal], params.min_confidence) {
            continue;
        }
        let ratio = if spec.is_arm {
            params.arm_width_ratio
        } else {
            params.leg_width_ratio
        };
        let p = pose.position(spec.proximal);
        let d = pose.position(spec.distal);
        let width = ratio * p.distance(&d);

        // Reuse the upper segment's joint edge when it exists so adjacent
        // patches meet seamlessly; fall back to a free rectangle otherwise.
        let quad = match spec.chain {
            Some((upper_prox, upper_dist))
                if pose.all_confident(&[upper_prox, upper_dist], params.min_confidence) =>
            {
                let up = pose.position(upper_prox);
                let ud = pose.position(upper_dist);
                let upper_width = ratio * up.distance(&ud);
                match distal_edge(up, ud, upper_width) {
                    Some(edge) => chained_limb_quad(edge, p, d, width),
                    None => limb_quad(p, d, width),
                }
            }
            _ => limb_quad(p, d, width),
        };
        if let Ok(q) = quad {
            quads.insert(spec.slot, q);
        }
    }

    Ok(PatchLayout { category, quads })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pose::JOINT_COUNT;

    /// T-pose on a 320x512 canvas, all confidences 1.
    pub(crate) fn t_pose() -> PoseSkeleton {
        let (w, h) = (320.0, 512.0);
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
        PoseSkeleton::new(joints, (320, 512)).unwrap()
    }

    #[test]
    fn t_pose_upper_has_ten_quads() {
        let layout = build_layout(&t_pose(), GarmentCategory::Upper, &LayoutParams::default())
            .unwrap();
        assert_eq!(layout.present_count(), 10);
        for slot in UPPER_SLOTS {
            assert!(layout.is_present(slot), "{slot:?} missing");
        }
    }

    #[test]
    fn t_pose_lower_has_five_quads() {
        let layout = build_layout(&t_pose(), GarmentCategory::Lower, &LayoutParams::default())
            .unwrap();
        assert_eq!(layout.present_count(), 5);
        for slot in LOWER_SLOTS {
            assert!(layout.is_present(slot), "{slot:?} missing");
        }
    }

    #[test]
    fn dress_uses_full_upper_slot_set() {
        let layout = build_layout(&t_pose(), GarmentCategory::Dress, &LayoutParams::default())
            .unwrap();
        assert_eq!(layout.present_count(), 10);
        assert!(layout.is_present(PatchSlot::Neck));
    }

    #[test]
    fn zero_confidence_wrist_drops_lower_arm() {
        let mut joints = *t_pose().joints();
        joints[Joint::LeftWrist as usize].1 = 0.0;
        let pose = PoseSkeleton::new(joints, (320, 512)).unwrap();
        let layout =
            build_layout(&pose, GarmentCategory::Upper, &LayoutParams::default()).unwrap();
        assert_eq!(layout.present_count(), 9);
        assert!(!layout.is_present(PatchSlot::LeftLowerArm));
    }

    #[test]
    fn low_hip_confidence_is_missing_core_joints() {
        let mut joints = *t_pose().joints();
        joints[Joint::LeftHip as usize].1 = 0.1;
        let pose = PoseSkeleton::new(joints, (320, 512)).unwrap();
        let err = build_layout(&pose, GarmentCategory::Upper, &LayoutParams::default())
            .unwrap_err();
        assert_eq!(err.code(), "MissingCoreJoints");
    }

    #[test]
    fn limb_quad_vertical() {
        let q = limb_quad(Point2::new(0.0, 0.0), Point2::new(0.0, 10.0), 4.0).unwrap();
        let mut got: Vec<(f64, f64)> = q.corners().iter().map(|p| (p.x, p.y)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![(2.0, 0.0), (-2.0, 0.0), (-2.0, 10.0), (2.0, 10.0)];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected);
    }

    #[test]
    fn limb_quad_horizontal() {
        let q = limb_quad(Point2::new(0.0, 0.0), Point2::new(10.0, 0.0), 2.0).unwrap();
        let mut got: Vec<(f64, f64)> = q.corners().iter().map(|p| (p.x, p.y)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = vec![(0.0, -1.0), (0.0, 1.0), (10.0, 1.0), (10.0, -1.0)];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected);
    }

    #[test]
    fn limb_quad_slanted_vector_oracle() {
        // Axis (0,0) -> (6,8): direction (0.6, 0.8), normal (0.8, -0.6),
        // half-width 2.5; corners worked out by hand.
        let q = limb_quad(Point2::new(0.0, 0.0), Point2::new(6.0, 8.0), 5.0).unwrap();
        let c = q.corners();
        let expected = [(2.0, -1.5), (8.0, 6.5), (4.0, 9.5), (-2.0, 1.5)];
        for (got, want) in c.iter().zip(expected.iter()) {
            assert!((got.x - want.0).abs() < 1e-12);
            assert!((got.y - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn limb_quad_rejects_short_segment() {
        let err = limb_quad(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 4.0).unwrap_err();
        assert_eq!(err.code(), "DegenerateQuad");
    }

    #[test]
    fn adjacent_arm_patches_share_elbow_edge() {
        let layout = build_layout(&t_pose(), GarmentCategory::Upper, &LayoutParams::default())
            .unwrap();
        let upper = layout.quads[&PatchSlot::LeftUpperArm].corners();
        let lower = layout.quads[&PatchSlot::LeftLowerArm].corners();
        // Upper distal edge = corners 1, 2; lower proximal edge = corners 0, 3.
        assert_eq!((upper[1].x, upper[1].y), (lower[0].x, lower[0].y));
        assert_eq!((upper[2].x, upper[2].y), (lower[3].x, lower[3].y));
    }

    #[test]
    fn lower_torso_sits_below_upper_torso_top() {
        let params = LayoutParams::default();
        let upper = build_layout(&t_pose(), GarmentCategory::Upper, &params).unwrap();
        let lower = build_layout(&t_pose(), GarmentCategory::Lower, &params).unwrap();
        let upper_top = upper.quads[&PatchSlot::Torso]
            .corners()
            .iter()
            .map(|p| p.y)
            .fold(f64::INFINITY, f64::min);
        let lower_top = lower.quads[&PatchSlot::Torso]
            .corners()
            .iter()
            .map(|p| p.y)
            .fold(f64::INFINITY, f64::min);
        assert!(lower_top > upper_top + 50.0, "{lower_top} vs {upper_top}");
    }

    #[test]
    fn translation_covariance_exact() {
        let params = LayoutParams::default();
        let pose = t_pose();
        let layout = build_layout(&pose, GarmentCategory::Upper, &params).unwrap();
        let moved = pose.translated(13.0, -7.0).unwrap();
        let layout_m = build_layout(&moved, GarmentCategory::Upper, &params).unwrap();
        for (slot, quad) in &layout.quads {
            let got = layout_m.quads[slot].corners();
            for (g, w) in got.iter().zip(quad.corners().iter()) {
                assert!((g.x - (w.x + 13.0)).abs() < 1e-9);
                assert!((g.y - (w.y - 7.0)).abs() < 1e-9);
            }
        }
    }
}
