//! Synthesises training and test corpora, trains the fusion pipeline and
//! prints one accuracy table per condition.
//!
//! ```text
//! cargo run --release --example evaluate_conditions -- [seed] [windows-per-condition]
//! ```

use std::error::Error;

use ptl_fusion::dataset_io::{Condition, ConditionFilter};
use ptl_fusion::eval::{
    emit_report, evaluate, train_fusion, FusionTrainConfig, Mode, Report, ReportFormat,
};
use ptl_fusion::synth::{synth_corpus, CorpusConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let windows: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(400);
    let dir = tempfile_dir()?;

    // Audio model: stationary recordings only.
    let audio_cfg = CorpusConfig {
        clean: windows,
        occluded: 0,
        moving: 0,
        ..CorpusConfig::default()
    }
    .with_seed(seed.wrapping_mul(3) + 1);
    let audio = synth_corpus(&audio_cfg, &dir.join("audio"))?;

    // Vision rows: visible PTLs (stationary and shaking camera) plus frames
    // with no PTL in view.
    let vision_cfg = CorpusConfig {
        occluded: 0,
        no_ptl: windows / 4,
        ..CorpusConfig::per_condition(windows / 2)
    }
    .with_seed(seed.wrapping_mul(3) + 2);
    let vision = synth_corpus(&vision_cfg, &dir.join("vision"))?;

    let test = synth_corpus(
        &CorpusConfig::per_condition(windows).with_seed(seed.wrapping_mul(3) + 3),
        &dir.join("test"),
    )?;

    let model = train_fusion(
        &audio,
        &vision,
        &FusionTrainConfig {
            seed,
            ..Default::default()
        },
    )?;
    for condition in Condition::ALL {
        let mut report = Report::default();
        for mode in Mode::ALL {
            report.rows.push(evaluate(
                &model,
                mode,
                &test,
                ConditionFilter::Only(condition),
            )?);
        }
        println!("{}", emit_report(&report, ReportFormat::Markdown));
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("ptl-fusion-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
