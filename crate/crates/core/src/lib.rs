//! Audio-visual pedestrian traffic light (PTL) state classification.
//!
//! The crate bundles every stage of the pipeline:
//!
//! - [`audio_dsp`]: windowed MFCC extraction, regression deltas, stream segmentation.
//! - [`vision`]: RGB to HSV conversion, hue histograms, red/green pixel ratios,
//!   the three-way hue rule, hue range calibration and a pluggable box detector.
//! - [`classifiers`]: random forest and k-nearest-neighbour models with
//!   per-class confidences and a versioned binary model format.
//! - [`fusion`]: audio/video window synchronisation, feature-level and
//!   decision-level fusion.
//! - [`dataset_io`]: WAV, PPM, YOLO annotations, detection files, corpus
//!   manifests and stratified splits.
//! - [`synth`]: deterministic synthetic corpora covering stationary,
//!   occluded and moving-robot conditions.
//! - [`eval`]: per-condition accuracy reports and the MFCC/frame-length grid search.
//! - [`cli`]: the `ptl-fusion` command line front end.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod audio_dsp;
pub mod classifiers;
pub mod cli;
pub mod dataset_io;
pub mod eval;
pub mod fusion;
pub mod label;
pub mod synth;
pub mod vision;

mod error;

pub use error::{Error, Result};
pub use label::{Decision, Light};
