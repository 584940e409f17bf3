use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{rgb_to_hsv, BoundingBox, BoxLabel, ImageRGB, VisionError};

/// Source of PTL bounding boxes for a frame.
pub trait Detector: Send + Sync {
    fn detect(&self, frame_id: &str, image: &ImageRGB) -> Result<Vec<BoundingBox>, VisionError>;
}

/// Finds the largest 4-connected region of saturated, bright pixels.
///
/// Confidence is the region's pixel count over its bounding rectangle area,
/// so a filled disc scores about 0.785.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobDetector {
    pub min_sat: f64,
    pub min_val: f64,
    /// Regions smaller than this many pixels are ignored.
    pub min_area: usize,
}

impl Default for BlobDetector {
    fn default() -> Self {
        Self {
            min_sat: 80.0,
            min_val: 80.0,
            min_area: 8,
        }
    }
}

impl BlobDetector {
    pub fn find(&self, image: &ImageRGB) -> Option<BoundingBox> {
        let (w, h) = (image.width, image.height);
        if w == 0 || h == 0 {
            return None;
        }
        let mask: Vec<bool> = image
            .pixels
            .iter()
            .map(|&p| {
                let hsv = rgb_to_hsv(p);
                hsv.s >= self.min_sat && hsv.v >= self.min_val
            })
            .collect();
        let mut seen = vec![false; w * h];
        let mut queue = VecDeque::new();
        // (count, x0, y0, x1, y1) inclusive
        let mut best: Option<(usize, usize, usize, usize, usize)> = None;

        for start in 0..w * h {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let (mut count, mut x0, mut y0, mut x1, mut y1) = (0, w, h, 0, 0);
            while let Some(i) = queue.pop_front() {
                let (x, y) = (i % w, i / w);
                count += 1;
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(y);
                y1 = y1.max(y);
                let mut push = |j: usize| {
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                if x > 0 {
                    push(i - 1);
                }
                if x + 1 < w {
                    push(i + 1);
                }
                if y > 0 {
                    push(i - w);
                }
                if y + 1 < h {
                    push(i + w);
                }
            }
            if best.is_none_or(|b| count > b.0) {
                best = Some((count, x0, y0, x1, y1));
            }
        }

        let (count, x0, y0, x1, y1) = best.filter(|b| b.0 >= self.min_area.max(1))?;
        let (bw, bh) = (x1 + 1 - x0, y1 + 1 - y0);
        Some(
            BoundingBox::new(
                (x0 as f64 + bw as f64 / 2.0) / w as f64,
                (y0 as f64 + bh as f64 / 2.0) / h as f64,
                bw as f64 / w as f64,
                bh as f64 / h as f64,
            )
            .with_label(BoxLabel::Ptl)
            .with_confidence(count as f64 / (bw * bh) as f64),
        )
    }
}

impl Detector for BlobDetector {
    fn detect(&self, _frame_id: &str, image: &ImageRGB) -> Result<Vec<BoundingBox>, VisionError> {
        Ok(self.find(image).into_iter().collect())
    }
}

/// Replays precomputed detections keyed by frame id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExternalDetector {
    detections: HashMap<String, Vec<BoundingBox>>,
}

impl ExternalDetector {
    pub fn new(detections: HashMap<String, Vec<BoundingBox>>) -> Self {
        Self { detections }
    }

    pub fn boxes(&self, frame_id: &str) -> Result<&[BoundingBox], VisionError> {
        self.detections
            .get(frame_id)
            .map(Vec::as_slice)
            .ok_or_else(|| VisionError::UnknownFrame(frame_id.to_string()))
    }
}

impl Detector for ExternalDetector {
    fn detect(&self, frame_id: &str, _image: &ImageRGB) -> Result<Vec<BoundingBox>, VisionError> {
        self.boxes(frame_id).map(<[_]>::to_vec)
    }
}
