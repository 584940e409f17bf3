//! Late fusion of per-frame hue decisions with the audio classifier output.

use ptl_fusion::classifiers::Prediction;
use ptl_fusion::fusion::{decision_level_fuse, FrameEvidence};
use ptl_fusion::Decision;

fn show(name: &str, frames: &[FrameEvidence], audio: &Prediction) {
    let d = decision_level_fuse(frames, audio);
    println!(
        "{name:28} -> {} (red {:.3}, green {:.3}, vision used: {})",
        d.light, d.totals[0], d.totals[1], d.used_vision
    );
}

fn main() {
    let seen = |label, c| FrameEvidence {
        label,
        confidence: Some(c),
    };
    let blocked = FrameEvidence {
        label: Decision::Unavailable,
        confidence: None,
    };
    let unsure_audio = Prediction::from_confidences(vec![0.55, 0.45]);

    show("audio only", &[], &unsure_audio);
    show("all frames blocked", &[blocked; 4], &unsure_audio);
    show(
        "green frames outvote audio",
        &[
            seen(Decision::Green, 0.8),
            seen(Decision::Green, 0.7),
            blocked,
            seen(Decision::Green, 0.75),
        ],
        &unsure_audio,
    );
    show(
        "split frames",
        &[seen(Decision::Red, 0.3), seen(Decision::Green, 0.9)],
        &Prediction::from_confidences(vec![0.9, 0.1]),
    );
    show(
        "exact tie goes to red",
        &[],
        &Prediction::from_confidences(vec![0.5, 0.5]),
    );
}
