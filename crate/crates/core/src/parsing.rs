//! Human parsing maps: per-pixel semantic labels with a configurable label
//! table, plus the deterministic auxiliary products derived from them
//! (garment masks, the preserved head/hand/foot region, and the median skin
//! color map).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::GarmentCategory;
use crate::mask::BinaryMask;
use crate::raster::RasterImage;

/// Semantic classes a parsing label can map to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticClass {
    Background,
    Hair,
    Headwear,
    Face,
    UpperGarment,
    LowerGarment,
    Dress,
    Arm,
    Leg,
    Hand,
    Foot,
    Accessory,
}

impl SemanticClass {
    /// Head, hand, and foot classes are copied through untouched.
    pub fn is_protected(&self) -> bool {
        matches!(
            self,
            SemanticClass::Hair
                | SemanticClass::Headwear
                | SemanticClass::Face
                | SemanticClass::Hand
                | SemanticClass::Foot
        )
    }

    /// Classes sampled for the median skin color (arms, legs, face).
    pub fn is_skin(&self) -> bool {
        matches!(
            self,
            SemanticClass::Arm | SemanticClass::Leg | SemanticClass::Face
        )
    }

    pub fn garment_category(&self) -> Option<GarmentCategory> {
        match self {
            SemanticClass::UpperGarment => Some(GarmentCategory::Upper),
            SemanticClass::LowerGarment => Some(GarmentCategory::Lower),
            SemanticClass::Dress => Some(GarmentCategory::Dress),
            _ => None,
        }
    }
}

/// Maps raw parsing labels to semantic classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelTable {
    classes: BTreeMap<u8, SemanticClass>,
}

impl LabelTable {
    pub fn new(classes: BTreeMap<u8, SemanticClass>) -> Self {
        LabelTable { classes }
    }

    /// 20-label table with LIP-style semantics, the shipped default.
    pub fn default_lip20() -> Self {
        use SemanticClass::*;
        let classes = BTreeMap::from([
            (0, Background),
            (1, Headwear),   // hat
            (2, Hair),
            (3, Hand),       // glove
            (4, Face),       // sunglasses
            (5, UpperGarment),
            (6, Dress),
            (7, UpperGarment), // coat
            (8, Foot),         // socks
            (9, LowerGarment), // pants
            (10, Dress),       // jumpsuit
            (11, Accessory),   // scarf
            (12, LowerGarment), // skirt
            (13, Face),
            (14, Arm),
            (15, Arm),
            (16, Leg),
            (17, Leg),
            (18, Foot), // left shoe
            (19, Foot), // right shoe
        ]);
        LabelTable { classes }
    }

    pub fn class_of(&self, label: u8) -> Option<SemanticClass> {
        self.classes.get(&label).copied()
    }

    pub fn labels(&self) -> impl Iterator<Item = (u8, SemanticClass)> + '_ {
        self.classes.iter().map(|(k, v)| (*k, *v))
    }

    /// The lowest label mapped to a class, if any.
    pub fn label_for(&self, class: SemanticClass) -> Option<u8> {
        self.classes
            .iter()
            .find(|(_, c)| **c == class)
            .map(|(l, _)| *l)
    }
}

impl Default for LabelTable {
    fn default() -> Self {
        LabelTable::default_lip20()
    }
}

/// Per-pixel semantic labeling of a person image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsingMap {
    width: u32,
    height: u32,
    labels: Vec<u8>,
    table: LabelTable,
}

impl ParsingMap {
    /// Validates that every pixel's label is present in the table.
    pub fn new(width: u32, height: u32, labels: Vec<u8>, table: LabelTable) -> Result<Self> {
        if labels.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (labels.len() as u32, 1),
            });
        }
        for (i, &label) in labels.iter().enumerate() {
            if table.class_of(label).is_none() {
                return Err(Error::UnknownLabel {
                    label,
                    x: i as u32 % width,
                    y: i as u32 / width,
                });
            }
        }
        Ok(ParsingMap {
            width,
            height,
            labels,
            table,
        })
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn table(&self) -> &LabelTable {
        &self.table
    }

    #[inline]
    pub fn label(&self, x: u32, y: u32) -> u8 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    pub fn class(&self, x: u32, y: u32) -> Result<SemanticClass> {
        let label = self.label(x, y);
        self.table
            .class_of(label)
            .ok_or(Error::UnknownLabel { label, x, y })
    }

    /// Mask of pixels whose class satisfies the predicate.
    fn class_mask(&self, mut pred: impl FnMut(SemanticClass) -> bool) -> Result<BinaryMask> {
        let mut mask = BinaryMask::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                if pred(self.class(x, y)?) {
                    mask.set(x, y, true);
                }
            }
        }
        Ok(mask)
    }
}

/// Mask of the pixels whose semantic class matches the garment category.
pub fn garment_mask(parsing: &ParsingMap, category: GarmentCategory) -> Result<BinaryMask> {
    parsing.class_mask(|c| c.garment_category() == Some(category))
}

/// Category detected from the garment classes present in a parsing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectedCategory {
    Upper,
    Lower,
    Dress,
    UpperAndLower,
}

/// Infers the garment category: any dress pixel dominates; both upper and
/// lower classes yield `UpperAndLower`.
pub fn infer_category(parsing: &ParsingMap) -> Result<DetectedCategory> {
    let mut has_upper = false;
    let mut has_lower = false;
    let mut has_dress = false;
    for y in 0..parsing.height() {
        for x in 0..parsing.width() {
            match parsing.class(x, y)?.garment_category() {
                Some(GarmentCategory::Upper) => has_upper = true,
                Some(GarmentCategory::Lower) => has_lower = true,
                Some(GarmentCategory::Dress) => has_dress = true,
                None => {}
            }
        }
    }
    if has_dress {
        Ok(DetectedCategory::Dress)
    } else if has_upper && has_lower {
        Ok(DetectedCategory::UpperAndLower)
    } else if has_upper {
        Ok(DetectedCategory::Upper)
    } else if has_lower {
        Ok(DetectedCategory::Lower)
    } else {
        Err(Error::NoGarmentPixels)
    }
}

/// Canvas-size image filled with the per-channel median of skin-class
/// pixels. Even-count medians take the lower value so 8-bit channels stay
/// integral.
pub fn median_skin_color(image: &RasterImage, parsing: &ParsingMap) -> Result<RasterImage> {
    if image.dimensions() != parsing.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: image.dimensions(),
            got: parsing.dimensions(),
        });
    }
    let mut samples: [Vec<u8>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for y in 0..image.height() {
        for x in 0..image.width() {
            if parsing.class(x, y)?.is_skin() {
                let px = image.get_rgba(x, y);
                for c in 0..3 {
                    samples[c].push(px[c]);
                }
            }
        }
    }
    if samples[0].is_empty() {
        return Err(Error::NoSkinPixels);
    }
    let mut median = [0u8; 3];
    for c in 0..3 {
        samples[c].sort_unstable();
        median[c] = samples[c][(samples[c].len() - 1) / 2];
    }
    Ok(RasterImage::from_fn(
        image.width(),
        image.height(),
        3,
        |_, _| [median[0], median[1], median[2], 255],
    ))
}

/// The input image masked to the protected head/hand/foot classes, zero
/// elsewhere.
pub fn preserved_region(image: &RasterImage, parsing: &ParsingMap) -> Result<RasterImage> {
    if image.dimensions() != parsing.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: image.dimensions(),
            got: parsing.dimensions(),
        });
    }
    let mut out = RasterImage::new(image.width(), image.height(), image.channels());
    for y in 0..image.height() {
        for x in 0..image.width() {
            if parsing.class(x, y)?.is_protected() {
                let px = image.get_rgba(x, y);
                out.put(x, y, &px[..image.channels() as usize]);
            }
        }
    }
    Ok(out)
}
