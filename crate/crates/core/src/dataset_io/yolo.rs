use super::FormatError;
use crate::vision::{BoundingBox, BoxLabel};

/// Parses YOLO text annotations, one `class cx cy w h` box per line with
/// class 0 = red and 1 = green. Blank lines are skipped.
pub fn parse_yolo_annotation(text: &str) -> Result<Vec<BoundingBox>, FormatError> {
    let mut boxes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(FormatError::line(
                line,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let label = match fields[0] {
            "0" => BoxLabel::Red,
            "1" => BoxLabel::Green,
            other => {
                return Err(FormatError::line(
                    line,
                    format!("unknown class id `{other}`"),
                ))
            }
        };
        let mut v = [0.0f64; 4];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| FormatError::line(line, format!("`{f}` is not a number")))?;
        }
        let b = BoundingBox::new(v[0], v[1], v[2], v[3]).with_label(label);
        b.validate()
            .map_err(|e| FormatError::line(line, e.to_string()))?;
        boxes.push(b);
    }
    Ok(boxes)
}

pub fn format_yolo_annotation(boxes: &[BoundingBox]) -> String {
    boxes
        .iter()
        .map(|b| {
            let class = match b.label {
                Some(BoxLabel::Green) => 1,
                _ => 0,
            };
            format!("{class} {} {} {} {}\n", b.cx, b.cy, b.w, b.h)
        })
        .collect()
}
