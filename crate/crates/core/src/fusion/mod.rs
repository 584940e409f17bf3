//! Synchronised audio/video windows and the two fusion strategies.

mod decision;
mod feature;
mod sync;

pub use decision::{decision_level_fuse, DecisionFusion, FrameEvidence};
pub use feature::{build_fused_vector, fusion_train, pair_features, VisionRow};
pub use sync::{average_vision_features, select_frames, SyncConfig, SyncWindow};

use thiserror::Error;

use crate::classifiers::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("frame rate and window length must be positive (fps={fps}, window={window_ms} ms)")]
    InvalidRate { fps: f64, window_ms: u32 },
    #[error("MFCC block has {got} values, expected {expected}")]
    MfccLength { expected: usize, got: usize },
    #[error("label {0} appears in only one of the audio and vision training sets")]
    LabelMismatch(String),
    #[error("{0} training set is empty")]
    Empty(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}
