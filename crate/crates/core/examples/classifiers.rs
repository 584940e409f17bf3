//! Fits a random forest and a k-NN model on MFCC vectors, compares them on
//! held-out windows and round-trips the forest through its binary format.

use std::error::Error;

use ptl_fusion::audio_dsp::{compute_mfcc, MfccConfig};
use ptl_fusion::classifiers::{
    model_load, model_save, Classifier, ForestModel, ForestParams, KnnModel, LabeledDataset,
};
use ptl_fusion::synth::synth_audio;
use ptl_fusion::Light;

fn dataset(n: u64, seed: u64) -> Result<LabeledDataset, Box<dyn Error>> {
    let cfg = MfccConfig::default();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let light = if i % 2 == 0 { Light::Red } else { Light::Green };
        let clip = synth_audio(Some(light), 250, 16_000, 5.0, i % 3 == 0, seed * 1000 + i)?;
        rows.push(compute_mfcc(&clip, &cfg)?.values);
        labels.push(light);
    }
    Ok(LabeledDataset::from_lights(rows, &labels)?)
}

fn accuracy(model: &Classifier, data: &LabeledDataset) -> Result<f64, Box<dyn Error>> {
    let mut correct = 0;
    for (x, &y) in data.rows.iter().zip(&data.labels) {
        correct += usize::from(model.predict(x)?.class == y);
    }
    Ok(correct as f64 / data.len() as f64)
}

fn main() -> Result<(), Box<dyn Error>> {
    let train = dataset(120, 1)?;
    let test = dataset(60, 2)?;
    let forest = Classifier::Forest(ForestModel::fit(
        &train,
        ForestParams::default().with_seed(3),
    )?);
    let knn = Classifier::Knn(KnnModel::fit(&train, 5)?);
    for m in [&forest, &knn] {
        println!("{:6} accuracy {:.3}", m.kind(), accuracy(m, &test)?);
    }
    let p = forest.predict(&test.rows[0])?;
    println!(
        "first window: {:?} confidences {:?}",
        p.light(),
        p.confidences
    );

    let bytes = model_save(&forest);
    let back = model_load(&bytes)?;
    println!(
        "saved forest: {} bytes, reload identical: {}",
        bytes.len(),
        back == forest
    );
    Ok(())
}
