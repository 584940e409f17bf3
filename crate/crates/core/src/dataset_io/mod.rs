//! Readers and writers for every on-disk artefact: WAV audio, PPM frames,
//! YOLO annotations, detection files and corpus manifests, plus stratified
//! train/test splitting.

mod corpus;
mod detections;
mod image;
mod split;
mod wav;
mod yolo;

pub use corpus::{
    load_manifest, parse_manifest, write_manifest, Condition, ConditionFilter, Corpus, CorpusItem,
    ManifestHeader, MANIFEST_FORMAT, MANIFEST_VERSION,
};
pub use detections::{
    load_detections, parse_detections, write_detections, DetectionRecord, DetectionSet,
};
pub use image::{decode_ppm, encode_ppm, read_image, write_ppm};
pub use split::split_stratified;
pub use wav::{decode_wav, encode_wav, read_wav, write_wav};
pub use yolo::{format_yolo_annotation, parse_yolo_annotation};

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("WAV byte {offset}: {reason}")]
    Wav { offset: usize, reason: String },
    #[error(
        "unsupported WAV encoding (format tag {format_tag:#06x}, {bits} bits); only PCM16 is read"
    )]
    UnsupportedEncoding { format_tag: u16, bits: u16 },
    #[error("WAV data chunk is empty")]
    EmptyData,
    #[error("image byte {offset}: {reason}")]
    Image { offset: usize, reason: String },
    #[error("unsupported image: {0}")]
    UnsupportedImage(String),
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("no record for frame `{0}`")]
    UnknownFrame(String),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    Fraction(f64),
}

impl FormatError {
    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        FormatError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn line(line: usize, reason: impl Into<String>) -> Self {
        FormatError::Line {
            line,
            reason: reason.into(),
        }
    }
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, FormatError> {
    std::fs::read(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| FormatError::io(path, e))
}

/// Writes a text file, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    write_bytes(path, text.as_bytes())
}
