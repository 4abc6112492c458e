//! Crate-wide error type.
//!
//! Every validation failure in the library surfaces as a typed [`Error`]
//! variant; nothing is silently repaired. [`Error::code`] exposes a stable
//! machine-readable name for each variant, which the CLI emits in its JSON
//! diagnostics.

use std::path::PathBuf;

use crate::layout::PatchSlot;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quadrilateral violates the non-degeneracy invariants (collinear
    /// corners, near-zero area, self-intersection, bad orientation).
    #[error("degenerate quadrilateral: {detail}")]
    DegenerateQuad { detail: String },

    /// A linear system could not be solved at the required conditioning.
    #[error("singular linear system: {detail}")]
    SingularSystem { detail: String },

    /// A point maps to (or beyond) the line at infinity under a homography.
    #[error("point ({x}, {y}) maps to infinity (|w'| = {w_abs:.3e})")]
    PointAtInfinity { x: f64, y: f64, w_abs: f64 },

    /// Torso anchor joints are below the confidence threshold.
    #[error("missing core joints: {detail}")]
    MissingCoreJoints { detail: String },

    /// Images participating in a composite do not share a canvas size.
    #[error("canvas mismatch: expected {expected:?}, got {got:?}")]
    CanvasMismatch {
        expected: (u32, u32),
        got: (u32, u32),
    },

    /// Source and target layouts have no present slot in common.
    #[error("no common patch slots between source and target layouts")]
    NoCommonSlots,

    /// Two rasters that must share dimensions do not.
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (u32, u32),
        got: (u32, u32),
    },

    /// Feature inpainting has misaligned pixels but no aligned pixels to
    /// average over.
    #[error("aligned region is empty while misaligned pixels exist")]
    EmptyAlignedRegion,

    /// The masks handed to feature inpainting do not partition the garment
    /// mask.
    #[error("mask partition violated: {detail}")]
    InvalidPartition { detail: String },

    /// Feature maps participating in an element-wise operation differ in
    /// shape.
    #[error("feature shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, u32, u32),
        got: (usize, u32, u32),
    },

    /// A parsing pixel carries a label absent from the label table.
    #[error("unknown parsing label {label} at pixel ({x}, {y})")]
    UnknownLabel { label: u8, x: u32, y: u32 },

    /// No skin-class pixels are available for the median skin color.
    #[error("parsing contains no skin-class pixels")]
    NoSkinPixels,

    /// No garment-class pixels are available for category inference.
    #[error("parsing contains no garment-class pixels")]
    NoGarmentPixels,

    /// A required input file does not exist.
    #[error("missing file: {path}")]
    MissingFile { path: PathBuf },

    /// A JSON document failed to parse or violates its schema.
    #[error("malformed JSON in {path}: {detail}")]
    MalformedJson { path: PathBuf, detail: String },

    /// A patch-set archive is structurally broken or fails digest checks.
    #[error("corrupt archive at {path}: {detail}")]
    CorruptArchive { path: PathBuf, detail: String },

    /// An edit command references a slot that is not present.
    #[error("patch slot {slot:?} is absent")]
    SlotAbsent { slot: PatchSlot },

    /// A dressing-order edit needs both garment layers.
    #[error("bundle is missing the {layer} layer")]
    MissingLayer { layer: &'static str },

    /// Two patch sets that must share a category do not.
    #[error("category mismatch: {detail}")]
    CategoryMismatch { detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable code, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateQuad { .. } => "DegenerateQuad",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::PointAtInfinity { .. } => "PointAtInfinity",
            Error::MissingCoreJoints { .. } => "MissingCoreJoints",
            Error::CanvasMismatch { .. } => "CanvasMismatch",
            Error::NoCommonSlots => "NoCommonSlots",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyAlignedRegion => "EmptyAlignedRegion",
            Error::InvalidPartition { .. } => "InvalidPartition",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::UnknownLabel { .. } => "UnknownLabel",
            Error::NoSkinPixels => "NoSkinPixels",
            Error::NoGarmentPixels => "NoGarmentPixels",
            Error::MissingFile { .. } => "MissingFile",
            Error::MalformedJson { .. } => "MalformedJson",
            Error::CorruptArchive { .. } => "CorruptArchive",
            Error::SlotAbsent { .. } => "SlotAbsent",
            Error::MissingLayer { .. } => "MissingLayer",
            Error::CategoryMismatch { .. } => "CategoryMismatch",
            Error::Io { .. } => "IoError",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
