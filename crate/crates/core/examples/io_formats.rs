//! Writes and re-reads every on-disk format: WAV, PPM, YOLO labels and the
//! JSON-lines detections file.

use std::error::Error;

use ptl_fusion::dataset_io::{
    format_yolo_annotation, load_detections, parse_yolo_annotation, read_image, read_wav,
    write_detections, write_ppm, write_text, write_wav, DetectionRecord, DetectionSet,
};
use ptl_fusion::synth::{synth_audio, synth_frame};
use ptl_fusion::vision::BoxLabel;
use ptl_fusion::Light;

fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("ptl-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let clip = synth_audio(Some(Light::Red), 1000, 16_000, 10.0, false, 1)?;
    let wav = dir.join("red.wav");
    write_wav(&clip, &wav)?;
    let back = read_wav(&wav)?;
    println!(
        "wav: {} samples at {} Hz, {} bytes",
        back.samples.len(),
        back.sample_rate,
        std::fs::metadata(&wav)?.len()
    );

    let (img, truth) = synth_frame(Light::Green, 64, 64, 0.0, 2.0, 2)?;
    let ppm = dir.join("f00000.ppm");
    write_ppm(&img, &ppm)?;
    println!("ppm: identical after reload: {}", read_image(&ppm)? == img);

    let yolo = format_yolo_annotation(&[truth.with_label(BoxLabel::Green)]);
    print!("yolo: {yolo}");
    println!("yolo: parsed {:?}", parse_yolo_annotation(&yolo)?[0].label);

    let set = DetectionSet {
        records: vec![DetectionRecord {
            frame: "f00000.ppm".into(),
            boxes: vec![truth.with_confidence(0.93)],
        }],
    };
    let det = dir.join("detections.jsonl");
    write_text(&det, &write_detections(&set))?;
    print!("detections: {}", std::fs::read_to_string(&det)?);
    println!(
        "detections: identical after reload: {}",
        load_detections(&det)? == set
    );

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
