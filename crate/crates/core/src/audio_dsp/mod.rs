//! Audio windows, MFCC features and their temporal derivatives.

mod delta;
mod mfcc;

pub use delta::compute_deltas;
pub use mfcc::{
    compute_mfcc, dct_ii_ortho, hann_window, hz_to_mel, mel_filterbank, mel_to_hz, ClipFeatures,
    DeltaMode, FeatureLayout, FeatureVector, MfccConfig, MfccExtractor,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AudioError {
    #[error("clip too short: {clip_samples} samples, analysis window needs {needed}")]
    ClipTooShort { clip_samples: usize, needed: usize },
    #[error("invalid MFCC config: {0}")]
    InvalidConfig(String),
    #[error("need at least {needed} frames for deltas, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("frame {index} has length {got}, expected {expected}")]
    RaggedFrames {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("sample rate {0} Hz is below the 8000 Hz minimum")]
    SampleRate(u32),
}

/// Lowest sample rate accepted for feature extraction.
pub const MIN_SAMPLE_RATE: u32 = 8000;

/// One window of mono audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioClip {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * 1000.0 / self.sample_rate as f64
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sub-clip `[offset_ms, offset_ms + len_ms)`, or `None` when it runs past the end.
    pub fn slice_ms(&self, offset_ms: u32, len_ms: u32) -> Option<AudioClip> {
        let start = samples_for_ms(self.sample_rate, offset_ms);
        let len = samples_for_ms(self.sample_rate, len_ms);
        let end = start.checked_add(len)?;
        (end <= self.samples.len())
            .then(|| AudioClip::new(self.samples[start..end].to_vec(), self.sample_rate))
    }
}

/// Number of samples spanned by `ms` milliseconds, rounded down.
pub fn samples_for_ms(sample_rate: u32, ms: u32) -> usize {
    (sample_rate as u64 * ms as u64 / 1000) as usize
}

/// Splits a stream into consecutive non-overlapping clips of `frame_ms`.
/// The trailing remainder shorter than one clip is dropped.
pub fn segment_stream(samples: &[f64], sample_rate: u32, frame_ms: u32) -> Vec<AudioClip> {
    let len = samples_for_ms(sample_rate, frame_ms);
    if len == 0 {
        return Vec::new();
    }
    samples
        .chunks_exact(len)
        .map(|c| AudioClip::new(c.to_vec(), sample_rate))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_full_second() {
        let s = vec![0.0; 44_100];
        let clips = segment_stream(&s, 44_100, 250);
        assert_eq!(clips.len(), 4);
        assert!(clips.iter().all(|c| c.len() == 11_025));
    }

    #[test]
    fn segment_drops_remainder() {
        // 990 ms
        let s = vec![0.0; 43_659];
        let clips = segment_stream(&s, 44_100, 250);
        assert_eq!(clips.len(), 3);
        assert_eq!(s.len() - 3 * 11_025, 10_584); // 240 ms
    }

    #[test]
    fn segment_empty() {
        assert!(segment_stream(&[], 16_000, 250).is_empty());
    }

    #[test]
    fn slice_bounds() {
        let clip = AudioClip::new((0..16_000).map(|i| i as f64).collect(), 16_000);
        let s = clip.slice_ms(250, 250).unwrap();
        assert_eq!(s.samples[0], 4000.0);
        assert_eq!(s.len(), 4000);
        assert!(clip.slice_ms(800, 250).is_none());
    }
}
