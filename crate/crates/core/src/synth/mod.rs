//! Deterministic synthetic corpora: PTL audio, camera frames and manifests
//! for the clean, occluded and moving conditions.
//!
//! Every output is a pure function of the arguments, seed included.

mod audio;
mod corpus;
mod frame;

pub use audio::{
    nominal_power, synth_audio, synth_audio_with, AudioOptions, CHIRP_MS, GREEN_PULSE_MS,
    GREEN_RATE_HZ, GREEN_TONE_HZ, RED_PULSE_MS, RED_RATE_HZ, RED_TONE_HZ,
};
pub use corpus::{
    manifest_hash, synth_corpus, CorpusConfig, MovingModel, OcclusionModel, MANIFEST_NAME,
};
pub use frame::{hsv_to_rgb, render_frame, synth_frame, FrameSpec, GREEN_HUE, MIN_DIM, RED_HUE};

use thiserror::Error;

use crate::dataset_io::FormatError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("clip duration must be at least 250 ms, got {0} ms")]
    Duration(u32),
    #[error("invalid SNR {0} dB")]
    Snr(f64),
    #[error("sample rate {0} Hz is too low")]
    SampleRate(u32),
    #[error("frames must be at least 64x64, got {width}x{height}")]
    Dims { width: usize, height: usize },
    #[error("occlusion fraction {0} outside [0, 1]")]
    Occlusion(f64),
    #[error("hue jitter {0} outside [0, 10)")]
    Jitter(f64),
    #[error("corpus configuration asks for zero windows")]
    EmptyCorpus,
    #[error("invalid corpus configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] FormatError),
}
