//! Hue-based PTL state classification from detector bounding boxes.

mod calibrate;
mod detect;
mod hsv;
mod hue;

pub use calibrate::{calibrate_hue_ranges, CalibratedRanges, CalibrationConfig};
pub use detect::{BlobDetector, Detector, ExternalDetector};
pub use hsv::{rgb_to_hsv, Hsv};
pub use hue::{
    classify_hue, frame_features, gated_hue_histogram, hue_histogram, pixel_percentages, HueRange,
    HueThresholds, VisionFeatures, HUE_BINS,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisionError {
    #[error("empty image region")]
    EmptyRegion,
    #[error("image is {width}x{height} but holds {pixels} pixels")]
    PixelCount {
        width: usize,
        height: usize,
        pixels: usize,
    },
    #[error("invalid bounding box: {0}")]
    InvalidBox(String),
    #[error("invalid hue range {lo}-{hi}")]
    InvalidRange { lo: u16, hi: u16 },
    #[error("hue ranges overlap: red {red}, green {green}")]
    Overlap { red: HueRange, green: HueRange },
    #[error("no calibration regions for label {0}")]
    MissingLabel(String),
    #[error("no saturated pixels to calibrate label {0}")]
    NoEvidence(String),
    #[error("no external detections for frame `{0}`")]
    UnknownFrame(String),
}

/// Row-major 8-bit RGB image.
const EDGE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRGB {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl ImageRGB {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self, VisionError> {
        if width * height != pixels.len() {
            return Err(VisionError::PixelCount {
                width,
                height,
                pixels: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![rgb; width * height],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }

    /// Pixel rectangle `(x0, y0, x1, y1)` (exclusive end) covered by a box.
    pub fn box_rect(&self, b: &BoundingBox) -> (usize, usize, usize, usize) {
        let clampx = |v: f64| (v.max(0.0) as usize).min(self.width);
        let clampy = |v: f64| (v.max(0.0) as usize).min(self.height);
        // Snap edges within EDGE_EPS of a pixel boundary onto it.
        let lo = |v: f64| (v + EDGE_EPS).floor();
        let hi = |v: f64| (v - EDGE_EPS).ceil();
        let x0 = clampx(lo((b.cx - b.w / 2.0) * self.width as f64));
        let y0 = clampy(lo((b.cy - b.h / 2.0) * self.height as f64));
        let x1 = clampx(hi((b.cx + b.w / 2.0) * self.width as f64)).max((x0 + 1).min(self.width));
        let y1 = clampy(hi((b.cy + b.h / 2.0) * self.height as f64)).max((y0 + 1).min(self.height));
        (x0, y0, x1, y1)
    }

    pub fn crop(&self, b: &BoundingBox) -> ImageRGB {
        let (x0, y0, x1, y1) = self.box_rect(b);
        let mut pixels = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for y in y0..y1 {
            pixels.extend_from_slice(&self.pixels[y * self.width + x0..y * self.width + x1]);
        }
        ImageRGB {
            width: x1 - x0,
            height: y1 - y0,
            pixels,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxLabel {
    Red,
    Green,
    Ptl,
}

/// Normalised, centre-based box as produced by YOLO-style detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<BoxLabel>,
    pub confidence: f64,
}

const BOX_EPS: f64 = 1e-9;

impl BoundingBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self {
            cx,
            cy,
            w,
            h,
            label: None,
            confidence: 1.0,
        }
    }

    pub fn with_label(mut self, label: BoxLabel) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn validate(&self) -> Result<(), VisionError> {
        let vals = [self.cx, self.cy, self.w, self.h, self.confidence];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(VisionError::InvalidBox("non-finite value".into()));
        }
        if self.w <= 0.0 || self.h <= 0.0 {
            return Err(VisionError::InvalidBox(format!(
                "width and height must be positive (w={}, h={})",
                self.w, self.h
            )));
        }
        let (x0, x1) = (self.cx - self.w / 2.0, self.cx + self.w / 2.0);
        let (y0, y1) = (self.cy - self.h / 2.0, self.cy + self.h / 2.0);
        if x0 < -BOX_EPS || y0 < -BOX_EPS || x1 > 1.0 + BOX_EPS || y1 > 1.0 + BOX_EPS {
            return Err(VisionError::InvalidBox(format!(
                "box [{x0:.4},{x1:.4}]x[{y0:.4},{y1:.4}] leaves the unit square"
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(VisionError::InvalidBox(format!(
                "confidence {} outside [0,1]",
                self.confidence
            )));
        }
        Ok(())
    }
}
