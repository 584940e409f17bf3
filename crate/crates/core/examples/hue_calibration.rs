//! Detects the lit disc in synthetic frames, derives hue ranges from the
//! labelled crops and classifies fresh frames with the three-way rule.

use std::error::Error;

use ptl_fusion::synth::synth_frame;
use ptl_fusion::vision::{
    calibrate_hue_ranges, classify_hue, frame_features, BlobDetector, CalibrationConfig, Detector,
    HueThresholds,
};
use ptl_fusion::Light;

fn main() -> Result<(), Box<dyn Error>> {
    let detector = BlobDetector::default();
    let mut regions = Vec::new();
    for seed in 0..40 {
        let light = if seed % 2 == 0 {
            Light::Red
        } else {
            Light::Green
        };
        let (img, truth) = synth_frame(light, 64, 64, 0.0, 2.0, seed)?;
        let found = detector.detect("", &img)?;
        let b = found.first().copied().unwrap_or(truth);
        regions.push((light, img.crop(&b)));
    }
    let ranges = calibrate_hue_ranges(&regions, &CalibrationConfig::default())?;
    println!("calibrated red {} green {}", ranges.red, ranges.green);

    let thresholds = HueThresholds {
        red: ranges.red,
        green: ranges.green,
        ..HueThresholds::default()
    };
    for (light, occlusion) in [
        (Light::Red, 0.0),
        (Light::Green, 0.0),
        (Light::Green, 0.6),
        (Light::Red, 1.0),
    ] {
        let (img, _) = synth_frame(light, 64, 64, occlusion, 2.0, 1000)?;
        let boxes = detector.detect("", &img)?;
        let (f, conf) = frame_features(&img, &boxes, &thresholds)?;
        println!(
            "{light:5} occlusion {occlusion:.1}: p_red {:5.1} p_green {:5.1} box {:?} -> {}",
            f.p_red,
            f.p_green,
            conf.map(|c| (c * 1000.0).round() / 1000.0),
            classify_hue(&f)
        );
    }
    Ok(())
}
