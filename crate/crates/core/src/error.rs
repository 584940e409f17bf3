use thiserror::Error;

use crate::audio_dsp::AudioError;
use crate::classifiers::ModelError;
use crate::dataset_io::FormatError;
use crate::eval::EvalError;
use crate::fusion::FusionError;
use crate::synth::SynthError;
use crate::vision::VisionError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error; each variant wraps the error type of one module.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Vision(#[from] VisionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// An internal consistency check failed; this is a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
