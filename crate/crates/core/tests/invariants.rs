use ptl_fusion::dataset_io::{Condition, ConditionFilter};
use ptl_fusion::eval::{evaluate, train_audio, Mode, TrainAudioConfig};
use ptl_fusion::synth::{synth_corpus, synth_frame, CorpusConfig};
use ptl_fusion::vision::{classify_hue, frame_features, BlobDetector, Detector, HueThresholds};
use ptl_fusion::{Decision, Light};

fn clean_only(n: usize, snr_db: f64, seed: u64) -> CorpusConfig {
    CorpusConfig {
        clean: n,
        occluded: 0,
        moving: 0,
        snr_db,
        ..CorpusConfig::default()
    }
    .with_seed(seed)
}

#[test]
fn audio_classes_separate_at_20_db() {
    let dir = tempfile::tempdir().unwrap();
    let train = synth_corpus(&clean_only(200, 20.0, 21), &dir.path().join("train")).unwrap();
    let test = synth_corpus(&clean_only(200, 20.0, 22), &dir.path().join("test")).unwrap();
    let model = train_audio(&train, &TrainAudioConfig::default()).unwrap();
    let row = evaluate(
        &model,
        Mode::Audio,
        &test,
        ConditionFilter::Only(Condition::Clean),
    )
    .unwrap();
    assert_eq!(row.windows(), 200);
    let acc = row.overall_accuracy().unwrap();
    assert!(acc >= 0.99, "audio accuracy {acc}");
}

fn vision_accuracy(occlusion: f64) -> f64 {
    let detector = BlobDetector::default();
    let thresholds = HueThresholds::default();
    let mut correct = 0;
    let n = 200;
    for seed in 0..n as u64 {
        let light = if seed % 2 == 0 {
            Light::Red
        } else {
            Light::Green
        };
        let (img, _) = synth_frame(light, 64, 64, occlusion, 2.0, seed).unwrap();
        let boxes = detector.detect("f", &img).unwrap();
        let (f, _) = frame_features(&img, &boxes, &thresholds).unwrap();
        if classify_hue(&f) == Decision::from(light) {
            correct += 1;
        }
    }
    correct as f64 / n as f64
}

#[test]
fn vision_accuracy_never_rises_with_occlusion() {
    let acc: Vec<f64> = [0.0, 0.5, 1.0].into_iter().map(vision_accuracy).collect();
    assert!(acc[0] >= acc[1] && acc[1] >= acc[2], "{acc:?}");
    assert!(acc[0] > 0.95 && acc[2] < 0.05, "{acc:?}");
}
