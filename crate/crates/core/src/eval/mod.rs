//! Training entry points, per-condition evaluation, report emission and the
//! MFCC/frame-length grid search.

mod bundle;
mod data;
mod grid;
mod report;
mod run;

pub use bundle::{PipelineModel, BUNDLE_MAGIC, BUNDLE_VERSION};
pub use data::{
    audio_features, calibration_regions, corpus_streams, train_audio, train_fusion, vision_rows,
    FusionTrainConfig, LabelledStream, TrainAudioConfig,
};
pub use grid::{grid_search, ClassifierKind, GridCell, GridConfig, GridReport};
pub use report::{emit_report, tally, Report, ReportFormat, ReportRow, Tally};
pub use run::{evaluate, infer_window, load_window, Mode, WindowInput, WindowOutput};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no labelled windows left after filtering ({0})")]
    EmptyCorpus(String),
    #[error("audio file `{0}` carries more than one light label")]
    MixedLabels(String),
    #[error("window `{id}`: audio holds {have_ms} ms, {need_ms} ms needed")]
    ShortAudio {
        id: String,
        have_ms: u32,
        need_ms: u32,
    },
    #[error("model bundle has no {0} model; train it with train-fusion")]
    Unsupported(&'static str),
    #[error("grid cell {classifier}/{n_mfcc} MFCC/{frame_ms} ms/{deltas}: {reason}")]
    Cell {
        classifier: String,
        n_mfcc: usize,
        frame_ms: u32,
        deltas: String,
        reason: String,
    },
    #[error("model bundle byte {offset}: {reason}")]
    Bundle { offset: usize, reason: String },
    #[error("unknown {what} `{value}`")]
    Parse { what: &'static str, value: String },
}
