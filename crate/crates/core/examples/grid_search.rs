//! Sweeps classifier, MFCC count and frame length over a synthetic corpus,
//! splitting whole recordings into train and test.

use std::error::Error;

use ptl_fusion::audio_dsp::DeltaMode;
use ptl_fusion::dataset_io::{split_stratified, ConditionFilter};
use ptl_fusion::eval::{corpus_streams, grid_search, GridConfig};
use ptl_fusion::synth::{synth_corpus, CorpusConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = std::env::temp_dir().join(format!("ptl-grid-{}", std::process::id()));
    let cfg = CorpusConfig {
        snr_db: 0.0,
        ..CorpusConfig::per_condition(64)
    }
    .with_seed(9);
    let corpus = synth_corpus(&cfg, &dir)?;
    let streams = corpus_streams(&corpus, ConditionFilter::All)?;
    let (train, test) = split_stratified(&streams, |s| s.label, 0.3, 9)?;

    let grid = GridConfig {
        deltas: vec![DeltaMode::None, DeltaMode::Delta],
        seed: 9,
        ..GridConfig::default()
    };
    let report = grid_search(&train, &test, &grid)?;
    println!(
        "{} cells over {} train / {} test recordings",
        report.cells.len(),
        train.len(),
        test.len()
    );
    for c in report.cells.iter().take(5) {
        println!(
            "{:4} n_mfcc {:2} frame {:4} ms delta {:5}: {:.4}",
            c.classifier, c.n_mfcc, c.frame_ms, c.deltas, c.accuracy
        );
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
