//! Detection files: JSON Lines, one record per frame.
//!
//! ```text
//! {"frame":"clean-p000-f00003","boxes":[{"cx":0.5,"cy":0.4,"w":0.2,"h":0.3,"label":"ptl","confidence":0.91}]}
//! ```

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_bytes, FormatError};
use crate::vision::{BoundingBox, ExternalDetector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub frame: String,
    pub boxes: Vec<BoundingBox>,
}

/// Parsed detection file, kept in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectionSet {
    pub records: Vec<DetectionRecord>,
}

impl DetectionSet {
    pub fn get(&self, frame: &str) -> Result<&[BoundingBox], FormatError> {
        self.records
            .iter()
            .find(|r| r.frame == frame)
            .map(|r| r.boxes.as_slice())
            .ok_or_else(|| FormatError::UnknownFrame(frame.to_string()))
    }

    pub fn detector(&self) -> ExternalDetector {
        ExternalDetector::new(
            self.records
                .iter()
                .map(|r| (r.frame.clone(), r.boxes.clone()))
                .collect::<HashMap<_, _>>(),
        )
    }
}

pub fn parse_detections(text: &str) -> Result<DetectionSet, FormatError> {
    let mut records: Vec<DetectionRecord> = Vec::new();
    let mut seen = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let rec: DetectionRecord =
            serde_json::from_str(raw).map_err(|e| FormatError::line(line, e.to_string()))?;
        for b in &rec.boxes {
            b.validate()
                .map_err(|e| FormatError::line(line, e.to_string()))?;
        }
        if let Some(prev) = seen.insert(rec.frame.clone(), line) {
            return Err(FormatError::line(
                line,
                format!("frame `{}` already listed on line {prev}", rec.frame),
            ));
        }
        records.push(rec);
    }
    Ok(DetectionSet { records })
}

pub fn write_detections(set: &DetectionSet) -> String {
    let mut out = String::new();
    for r in &set.records {
        out.push_str(&serde_json::to_string(r).expect("detection records always serialise"));
        out.push('\n');
    }
    out
}

pub fn load_detections(path: &Path) -> Result<DetectionSet, FormatError> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| FormatError::Line {
        line: 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        reason: "invalid UTF-8".into(),
    })?;
    parse_detections(text)
}
