use crate::classifiers::Prediction;
use crate::{Decision, Light};

/// Hue decision of one analysed frame and its detection confidence
/// (`None` when the detector found nothing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameEvidence {
    pub label: Decision,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionFusion {
    pub light: Light,
    /// Summed score per light, indexed by class id.
    pub totals: [f64; 2],
    /// Whether any frame contributed vision credit.
    pub used_vision: bool,
}

/// Sums vision and audio confidences per light and takes the argmax, Red on
/// ties.
///
/// Each detected frame credits its bounding-box confidence to its own hue
/// label; the credit of a label is the mean over the frames that voted for
/// it. Frames that were not detected, or whose hue rule came out
/// Unavailable, add nothing. Without any credited frame only the audio
/// confidences decide.
pub fn decision_level_fuse(frames: &[FrameEvidence], audio: &Prediction) -> DecisionFusion {
    let mut sum = [0.0f64; 2];
    let mut count = [0usize; 2];
    for f in frames {
        if let (Some(l), Some(c)) = (f.label.light(), f.confidence) {
            sum[l.class_id()] += c;
            count[l.class_id()] += 1;
        }
    }
    let mut totals = [0.0f64; 2];
    for l in Light::ALL {
        let i = l.class_id();
        let vision = if count[i] > 0 {
            sum[i] / count[i] as f64
        } else {
            0.0
        };
        totals[i] = vision + audio.confidence(i);
    }
    let light = if totals[Light::Green.class_id()] > totals[Light::Red.class_id()] {
        Light::Green
    } else {
        Light::Red
    };
    DecisionFusion {
        light,
        totals,
        used_vision: count.iter().any(|&c| c > 0),
    }
}
