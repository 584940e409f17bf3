use std::fmt;

use serde::{Deserialize, Serialize};

use super::{rgb_to_hsv, BoundingBox, ImageRGB, VisionError};
use crate::Decision;

pub const HUE_BINS: usize = 180;

/// Half-open hue interval `[lo, hi)` on the `[0, 180)` scale; `hi` may be 180.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HueRange {
    pub lo: u16,
    pub hi: u16,
}

impl HueRange {
    pub fn new(lo: u16, hi: u16) -> Result<Self, VisionError> {
        if lo >= hi || hi as usize > HUE_BINS {
            return Err(VisionError::InvalidRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, hue: f64) -> bool {
        hue >= self.lo as f64 && hue < self.hi as f64
    }

    pub fn overlaps(&self, other: &HueRange) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

impl fmt::Display for HueRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

/// Hue ranges plus the saturation/value gates below which a pixel's hue is
/// not trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HueThresholds {
    pub red: HueRange,
    pub green: HueRange,
    pub min_sat: f64,
    pub min_val: f64,
}

impl Default for HueThresholds {
    fn default() -> Self {
        Self {
            red: HueRange { lo: 170, hi: 180 },
            green: HueRange { lo: 75, hi: 100 },
            min_sat: 80.0,
            min_val: 80.0,
        }
    }
}

impl HueThresholds {
    pub fn validate(&self) -> Result<(), VisionError> {
        HueRange::new(self.red.lo, self.red.hi)?;
        HueRange::new(self.green.lo, self.green.hi)?;
        if self.red.overlaps(&self.green) {
            return Err(VisionError::Overlap {
                red: self.red,
                green: self.green,
            });
        }
        Ok(())
    }
}

/// Red/green pixel percentages inside one detection.
///
/// Undetected frames are encoded as `(0, 0)` with `detected == false`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisionFeatures {
    pub p_red: f64,
    pub p_green: f64,
    pub detected: bool,
}

impl VisionFeatures {
    pub const UNDETECTED: VisionFeatures = VisionFeatures {
        p_red: 0.0,
        p_green: 0.0,
        detected: false,
    };

    pub fn detected(p_red: f64, p_green: f64) -> Self {
        Self {
            p_red,
            p_green,
            detected: true,
        }
    }

    pub fn from_counts(red: u64, green: u64) -> Self {
        let total = red + green;
        if total == 0 {
            return Self::detected(0.0, 0.0);
        }
        Self::detected(
            red as f64 / total as f64 * 100.0,
            green as f64 / total as f64 * 100.0,
        )
    }
}

fn check_region(region: &ImageRGB) -> Result<(), VisionError> {
    if region.is_empty() {
        return Err(VisionError::EmptyRegion);
    }
    Ok(())
}

/// Per-bin pixel counts of hue over the whole region.
pub fn hue_histogram(region: &ImageRGB) -> Result<[u64; HUE_BINS], VisionError> {
    gated_hue_histogram(region, 0.0, 0.0)
}

/// Hue histogram restricted to pixels with `s >= min_sat` and `v >= min_val`.
pub fn gated_hue_histogram(
    region: &ImageRGB,
    min_sat: f64,
    min_val: f64,
) -> Result<[u64; HUE_BINS], VisionError> {
    check_region(region)?;
    let mut counts = [0u64; HUE_BINS];
    for &px in &region.pixels {
        let hsv = rgb_to_hsv(px);
        if hsv.s >= min_sat && hsv.v >= min_val {
            counts[hsv.bin()] += 1;
        }
    }
    Ok(counts)
}

/// Counts gated red and green pixels and converts them to percentages of
/// `R + G`. A region with no counted pixel yields `(0, 0)`, still flagged as
/// detected.
pub fn pixel_percentages(
    region: &ImageRGB,
    thresholds: &HueThresholds,
) -> Result<VisionFeatures, VisionError> {
    check_region(region)?;
    thresholds.validate()?;
    let (mut red, mut green) = (0u64, 0u64);
    for &px in &region.pixels {
        let hsv = rgb_to_hsv(px);
        if hsv.s < thresholds.min_sat || hsv.v < thresholds.min_val {
            continue;
        }
        if thresholds.red.contains(hsv.h) {
            red += 1;
        } else if thresholds.green.contains(hsv.h) {
            green += 1;
        }
    }
    Ok(VisionFeatures::from_counts(red, green))
}

/// The three-way hue rule: Unavailable when nothing was detected or the
/// percentages tie, otherwise the larger colour wins.
pub fn classify_hue(f: &VisionFeatures) -> Decision {
    if !f.detected || f.p_red == f.p_green {
        Decision::Unavailable
    } else if f.p_red > f.p_green {
        Decision::Red
    } else {
        Decision::Green
    }
}

/// Vision features of one frame from its detections. Only the most confident
/// box is used; returns that box's confidence alongside.
pub fn frame_features(
    image: &ImageRGB,
    boxes: &[BoundingBox],
    thresholds: &HueThresholds,
) -> Result<(VisionFeatures, Option<f64>), VisionError> {
    let best = boxes.iter().filter(|b| b.validate().is_ok()).fold(
        None::<&BoundingBox>,
        |acc, b| match acc {
            Some(a) if a.confidence >= b.confidence => Some(a),
            _ => Some(b),
        },
    );
    match best {
        None => Ok((VisionFeatures::UNDETECTED, None)),
        Some(b) => {
            let crop = image.crop(b);
            Ok((pixel_percentages(&crop, thresholds)?, Some(b.confidence)))
        }
    }
}
