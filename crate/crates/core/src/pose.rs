//! Body skeletons in COCO-18 joint order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

/// The 18 COCO joints in their conventional estimator output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(usize)]
pub enum Joint {
    Nose = 0,
    Neck = 1,
    RightShoulder = 2,
    RightElbow = 3,
    RightWrist = 4,
    LeftShoulder = 5,
    LeftElbow = 6,
    LeftWrist = 7,
    RightHip = 8,
    RightKnee = 9,
    RightAnkle = 10,
    LeftHip = 11,
    LeftKnee = 12,
    LeftAnkle = 13,
    RightEye = 14,
    LeftEye = 15,
    RightEar = 16,
    LeftEar = 17,
}

pub const JOINT_COUNT: usize = 18;

pub const ALL_JOINTS: [Joint; JOINT_COUNT] = [
    Joint::Nose,
    Joint::Neck,
    Joint::RightShoulder,
    Joint::RightElbow,
    Joint::RightWrist,
    Joint::LeftShoulder,
    Joint::LeftElbow,
    Joint::LeftWrist,
    Joint::RightHip,
    Joint::RightKnee,
    Joint::RightAnkle,
    Joint::LeftHip,
    Joint::LeftKnee,
    Joint::LeftAnkle,
    Joint::RightEye,
    Joint::LeftEye,
    Joint::RightEar,
    Joint::LeftEar,
];

impl Joint {
    /// The joint at the mirrored position when left and right swap.
    pub fn mirrored(self) -> Joint {
        use Joint::*;
        match self {
            Nose => Nose,
            Neck => Neck,
            RightShoulder => LeftShoulder,
            RightElbow => LeftElbow,
            RightWrist => LeftWrist,
            LeftShoulder => RightShoulder,
            LeftElbow => RightElbow,
            LeftWrist => RightWrist,
            RightHip => LeftHip,
            RightKnee => LeftKnee,
            RightAnkle => LeftAnkle,
            LeftHip => RightHip,
            LeftKnee => RightKnee,
            LeftAnkle => RightAnkle,
            RightEye => LeftEye,
            LeftEye => RightEye,
            RightEar => LeftEar,
            LeftEar => RightEar,
        }
    }
}

/// 2D body joints with confidences, driving the patch layout.
///
/// Joint coordinates may extend slightly out of frame (up to a quarter of
/// the canvas dimension on each side); confidences are in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoseWire", into = "PoseWire")]
pub struct PoseSkeleton {
    joints: [(Point2, f64); JOINT_COUNT],
    canvas: (u32, u32),
}

/// Wire form: `{"canvas": [w, h], "joints": [[x, y, c]; 18]}`.
#[derive(Serialize, Deserialize)]
struct PoseWire {
    canvas: (u32, u32),
    joints: Vec<[f64; 3]>,
}

impl TryFrom<PoseWire> for PoseSkeleton {
    type Error = Error;

    fn try_from(wire: PoseWire) -> Result<Self> {
        if wire.joints.len() != JOINT_COUNT {
            return Err(Error::MalformedJson {
                path: "<pose>".into(),
                detail: format!("expected {} joints, got {}", JOINT_COUNT, wire.joints.len()),
            });
        }
        let mut joints = [(Point2::new(0.0, 0.0), 0.0); JOINT_COUNT];
        for (i, [x, y, c]) in wire.joints.iter().copied().enumerate() {
            joints[i] = (Point2::new(x, y), c);
        }
        PoseSkeleton::new(joints, wire.canvas)
    }
}

impl From<PoseSkeleton> for PoseWire {
    fn from(pose: PoseSkeleton) -> Self {
        PoseWire {
            canvas: pose.canvas,
            joints: pose
                .joints
                .iter()
                .map(|(p, c)| [p.x, p.y, *c])
                .collect(),
        }
    }
}

impl PoseSkeleton {
    pub fn new(joints: [(Point2, f64); JOINT_COUNT], canvas: (u32, u32)) -> Result<Self> {
        let (w, h) = (canvas.0 as f64, canvas.1 as f64);
        if canvas.0 == 0 || canvas.1 == 0 {
            return Err(Error::MalformedJson {
                path: "<pose>".into(),
                detail: "zero canvas dimension".into(),
            });
        }
        for (i, (p, c)) in joints.iter().enumerate() {
            if !p.is_finite() || !c.is_finite() {
                return Err(Error::MalformedJson {
                    path: "<pose>".into(),
                    detail: format!("joint {i} has non-finite values"),
                });
            }
            if !(0.0..=1.0).contains(c) {
                return Err(Error::MalformedJson {
                    path: "<pose>".into(),
                    detail: format!("joint {i} confidence {c} outside [0, 1]"),
                });
            }
            if p.x < -0.25 * w || p.x > 1.25 * w || p.y < -0.25 * h || p.y > 1.25 * h {
                return Err(Error::MalformedJson {
                    path: "<pose>".into(),
                    detail: format!("joint {i} at ({}, {}) too far out of frame", p.x, p.y),
                });
            }
        }
        Ok(PoseSkeleton { joints, canvas })
    }

    pub fn canvas(&self) -> (u32, u32) {
        self.canvas
    }

    pub fn position(&self, joint: Joint) -> Point2 {
        self.joints[joint as usize].0
    }

    pub fn confidence(&self, joint: Joint) -> f64 {
        self.joints[joint as usize].1
    }

    pub fn joints(&self) -> &[(Point2, f64); JOINT_COUNT] {
        &self.joints
    }

    /// Every listed joint at or above the threshold.
    pub fn all_confident(&self, joints: &[Joint], min_confidence: f64) -> bool {
        joints.iter().all(|j| self.confidence(*j) >= min_confidence)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Result<PoseSkeleton> {
        let mut joints = self.joints;
        for (p, _) in &mut joints {
            p.x += dx;
            p.y += dy;
        }
        PoseSkeleton::new(joints, self.canvas)
    }

    /// Uniform scaling of all joints about a center; the canvas is unchanged.
    pub fn scaled_about(&self, center: Point2, k: f64) -> Result<PoseSkeleton> {
        let mut joints = self.joints;
        for (p, _) in &mut joints {
            p.x = center.x + k * (p.x - center.x);
            p.y = center.y + k * (p.y - center.y);
        }
        PoseSkeleton::new(joints, self.canvas)
    }

    /// True anatomical mirror across the vertical canvas axis: coordinates
    /// reflect and left/right joint roles swap.
    pub fn mirrored(&self) -> Result<PoseSkeleton> {
        let w = self.canvas.0 as f64;
        let mut joints = self.joints;
        for joint in ALL_JOINTS {
            let (p, c) = self.joints[joint.mirrored() as usize];
            joints[joint as usize] = (Point2::new(w - p.x, p.y), c);
        }
        PoseSkeleton::new(joints, self.canvas)
    }
}
