//! Pairs one audio window with its selected video frames and builds the
//! fused feature vector.

use std::error::Error;

use ptl_fusion::audio_dsp::{compute_mfcc, MfccConfig};
use ptl_fusion::fusion::{average_vision_features, build_fused_vector, select_frames, SyncConfig};
use ptl_fusion::synth::{synth_audio, synth_frame};
use ptl_fusion::vision::{frame_features, BlobDetector, Detector, HueThresholds};
use ptl_fusion::Light;

fn main() -> Result<(), Box<dyn Error>> {
    let sync = SyncConfig::default();
    for fps in [15.0, 24.0, 30.0, 60.0] {
        println!(
            "{fps:>4} fps, 250 ms: frames {:?}",
            select_frames(fps, 250, &sync)?
        );
    }

    let light = Light::Green;
    let audio = synth_audio(Some(light), 250, 16_000, 10.0, false, 5)?;
    let detector = BlobDetector::default();
    let thresholds = HueThresholds::default();
    let mut per_frame = Vec::new();
    for idx in select_frames(30.0, 250, &sync)? {
        // The third selected frame has the disc blocked.
        let occlusion = if idx == 4 { 1.0 } else { 0.0 };
        let (img, _) = synth_frame(light, 64, 64, occlusion, 2.0, idx as u64)?;
        let (f, _) = frame_features(&img, &detector.detect("", &img)?, &thresholds)?;
        println!(
            "frame {idx}: detected {} p_red {:.1} p_green {:.1}",
            f.detected, f.p_red, f.p_green
        );
        per_frame.push(f);
    }
    let avg = average_vision_features(&per_frame);
    println!("window average: p_red {:.1} p_green {:.1}", avg.0, avg.1);

    let mfcc = compute_mfcc(&audio, &MfccConfig::default())?;
    let fused = build_fused_vector(&mfcc, mfcc.len(), avg)?;
    println!(
        "fused vector: {} values, tail {:?}",
        fused.len(),
        &fused.values[fused.len() - 2..]
    );
    Ok(())
}
