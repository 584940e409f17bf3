use serde::{Deserialize, Serialize};

use super::FusionError;
use crate::audio_dsp::AudioClip;
use crate::vision::VisionFeatures;

/// Frame selection knobs. Defaults pick every other frame from the first
/// seven, at most four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncConfig {
    pub max_frames: usize,
    pub pool: usize,
    pub stride: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            max_frames: 4,
            pool: 7,
            stride: 2,
        }
    }
}

/// Indices (relative to the window start) of the video frames analysed for
/// one audio window.
///
/// `floor(fps * window_ms / 1000)` frames fall inside the window; the first
/// `min(that, pool)` form the pool, from which every `stride`-th frame is
/// taken, up to `max_frames`.
pub fn select_frames(
    fps: f64,
    window_ms: u32,
    cfg: &SyncConfig,
) -> Result<Vec<usize>, FusionError> {
    if !(fps.is_finite() && fps > 0.0) || window_ms == 0 {
        return Err(FusionError::InvalidRate { fps, window_ms });
    }
    // Nudge so that e.g. 30 fps * 250 ms lands on 7.5 rather than 7.4999...
    let available = (fps * window_ms as f64 / 1000.0 + 1e-9).floor() as usize;
    let pool = available.min(cfg.pool);
    Ok((0..pool)
        .step_by(cfg.stride.max(1))
        .take(cfg.max_frames)
        .collect())
}

/// Arithmetic mean of `(p_red, p_green)` over every selected frame;
/// undetected frames count as `(0, 0)`. An empty selection gives `(0, 0)`.
pub fn average_vision_features(per_frame: &[VisionFeatures]) -> (f64, f64) {
    if per_frame.is_empty() {
        return (0.0, 0.0);
    }
    let n = per_frame.len() as f64;
    let (r, g) = per_frame.iter().fold((0.0, 0.0), |(r, g), f| {
        if f.detected {
            (r + f.p_red, g + f.p_green)
        } else {
            (r, g)
        }
    });
    (r / n, g / n)
}

/// One data point: a window of audio and the analysed frames from the same
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncWindow {
    pub audio: AudioClip,
    pub frame_ids: Vec<usize>,
    pub vision: Vec<VisionFeatures>,
    /// Detection confidence per selected frame, `None` when nothing was detected.
    pub detection_confidences: Vec<Option<f64>>,
}
