use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{compute_deltas, AudioClip, AudioError, MIN_SAMPLE_RATE};

/// Which temporal derivatives are appended to the MFCC block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    #[default]
    None,
    Delta,
    DeltaDelta,
}

impl DeltaMode {
    pub const ALL: [DeltaMode; 3] = [DeltaMode::None, DeltaMode::Delta, DeltaMode::DeltaDelta];

    pub fn layout(self) -> FeatureLayout {
        match self {
            DeltaMode::None => FeatureLayout::Mfcc,
            DeltaMode::Delta => FeatureLayout::MfccDelta,
            DeltaMode::DeltaDelta => FeatureLayout::MfccDeltaDelta,
        }
    }
}

impl fmt::Display for DeltaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            DeltaMode::None => "none",
            DeltaMode::Delta => "d",
            DeltaMode::DeltaDelta => "dd",
        })
    }
}

impl FromStr for DeltaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(DeltaMode::None),
            "d" | "delta" => Ok(DeltaMode::Delta),
            "dd" | "delta_delta" | "delta-delta" => Ok(DeltaMode::DeltaDelta),
            other => Err(format!(
                "unknown delta mode `{other}` (expected none, d or dd)"
            )),
        }
    }
}

/// Shape tag carried alongside feature values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureLayout {
    Mfcc,
    MfccDelta,
    MfccDeltaDelta,
    /// MFCC block followed by averaged `[p_red, p_green]`.
    Fused,
}

impl FeatureLayout {
    /// Vector length implied by this layout for `n_mfcc` coefficients.
    pub fn dim(self, n_mfcc: usize) -> usize {
        match self {
            FeatureLayout::Mfcc => n_mfcc,
            FeatureLayout::MfccDelta => 2 * n_mfcc,
            FeatureLayout::MfccDeltaDelta => 3 * n_mfcc,
            FeatureLayout::Fused => n_mfcc + 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: FeatureLayout,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, layout: FeatureLayout) -> Self {
        Self { values, layout }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfccConfig {
    /// Number of cepstral coefficients kept, c1..=cN (c0 is dropped).
    pub n_mfcc: usize,
    pub analysis_window_ms: f64,
    pub hop_ms: f64,
    pub n_mels: usize,
    /// `None` picks the next power of two covering the analysis window.
    pub fft_size: Option<usize>,
    pub log_floor: f64,
    pub deltas: DeltaMode,
    /// Regression half-width used for delta coefficients.
    pub delta_half_window: usize,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            n_mfcc: 24,
            analysis_window_ms: 25.0,
            hop_ms: 10.0,
            n_mels: 40,
            fft_size: None,
            log_floor: 1e-10,
            deltas: DeltaMode::None,
            delta_half_window: 2,
        }
    }
}

impl MfccConfig {
    pub fn with_n_mfcc(mut self, n: usize) -> Self {
        self.n_mfcc = n;
        self
    }

    pub fn with_deltas(mut self, deltas: DeltaMode) -> Self {
        self.deltas = deltas;
        self
    }

    pub fn window_samples(&self, sample_rate: u32) -> usize {
        (sample_rate as f64 * self.analysis_window_ms / 1000.0).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        (sample_rate as f64 * self.hop_ms / 1000.0).round() as usize
    }

    pub fn resolved_fft_size(&self, sample_rate: u32) -> usize {
        self.fft_size
            .unwrap_or_else(|| self.window_samples(sample_rate).next_power_of_two())
    }

    pub fn validate(&self, sample_rate: u32) -> Result<(), AudioError> {
        let bad = |m: String| Err(AudioError::InvalidConfig(m));
        if sample_rate < MIN_SAMPLE_RATE {
            return Err(AudioError::SampleRate(sample_rate));
        }
        if self.n_mels < 2 {
            return bad(format!("n_mels must be at least 2, got {}", self.n_mels));
        }
        if self.n_mfcc == 0 || self.n_mfcc >= self.n_mels {
            return bad(format!(
                "n_mfcc must lie in [1, n_mels={}), got {}",
                self.n_mels, self.n_mfcc
            ));
        }
        if !(self.analysis_window_ms.is_finite()
            && self.analysis_window_ms > 0.0
            && self.hop_ms.is_finite()
            && self.hop_ms > 0.0)
        {
            return bad("analysis window and hop must be positive".into());
        }
        if !(self.log_floor.is_finite() && self.log_floor > 0.0) {
            return bad(format!(
                "log_floor must be positive, got {}",
                self.log_floor
            ));
        }
        let win = self.window_samples(sample_rate);
        let hop = self.hop_samples(sample_rate);
        if win < 2 || hop == 0 {
            return bad(format!(
                "window of {win} samples / hop of {hop} samples is degenerate"
            ));
        }
        let fft = self.resolved_fft_size(sample_rate);
        if !fft.is_power_of_two() {
            return bad(format!("fft_size {fft} is not a power of two"));
        }
        if fft < win {
            return bad(format!(
                "fft_size {fft} is shorter than the {win}-sample window"
            ));
        }
        Ok(())
    }
}

/// HTK mel scale.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Periodic Hann window.
pub fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

/// Triangular filters with centres equally spaced on the mel scale between
/// `f_min` and `f_max`, evaluated at the exact frequency of each FFT bin.
/// Returns `n_mels` rows of `fft_size / 2 + 1` weights.
pub fn mel_filterbank(
    n_mels: usize,
    fft_size: usize,
    sample_rate: u32,
    f_min: f64,
    f_max: f64,
) -> Vec<Vec<f64>> {
    let n_bins = fft_size / 2 + 1;
    let (m_lo, m_hi) = (hz_to_mel(f_min), hz_to_mel(f_max));
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(m_lo + (m_hi - m_lo) * i as f64 / (n_mels + 1) as f64))
        .collect();
    let bin_hz = sample_rate as f64 / fft_size as f64;

    (0..n_mels)
        .map(|m| {
            let (left, centre, right) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let f = k as f64 * bin_hz;
                    if f <= left || f >= right {
                        0.0
                    } else if f <= centre {
                        (f - left) / (centre - left)
                    } else {
                        (right - f) / (right - centre)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II of `input`.
pub fn dct_ii_ortho(input: &[f64]) -> Vec<f64> {
    let m = input.len();
    (0..m)
        .map(|k| {
            let scale = if k == 0 {
                (1.0 / m as f64).sqrt()
            } else {
                (2.0 / m as f64).sqrt()
            };
            scale
                * input
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * (PI * k as f64 * (2 * i + 1) as f64 / (2 * m) as f64).cos())
                    .sum::<f64>()
        })
        .collect()
}

struct SparseFilter {
    start: usize,
    weights: Vec<f64>,
}

/// Clip-level features: per-window MFCCs averaged over the clip, plus the
/// averaged delta blocks when requested.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipFeatures {
    pub mfcc: Vec<f64>,
    pub delta: Option<Vec<f64>>,
    pub delta_delta: Option<Vec<f64>>,
}

impl ClipFeatures {
    /// Feature vector keeping only the first `n_mfcc` coefficients of each block.
    /// Coefficient `k` does not depend on how many are kept, so features
    /// computed once at the largest count serve every smaller one.
    pub fn truncated(&self, n_mfcc: usize, deltas: DeltaMode) -> Option<FeatureVector> {
        let take = |v: &Vec<f64>| (v.len() >= n_mfcc).then(|| v[..n_mfcc].to_vec());
        let mut values = take(&self.mfcc)?;
        if matches!(deltas, DeltaMode::Delta | DeltaMode::DeltaDelta) {
            values.extend(take(self.delta.as_ref()?)?);
        }
        if deltas == DeltaMode::DeltaDelta {
            values.extend(take(self.delta_delta.as_ref()?)?);
        }
        Some(FeatureVector::new(values, deltas.layout()))
    }
}

/// Precomputed MFCC machinery for one (config, sample rate) pair.
pub struct MfccExtractor {
    cfg: MfccConfig,
    sample_rate: u32,
    window: Vec<f64>,
    hop: usize,
    fft_size: usize,
    fft: Arc<dyn Fft<f64>>,
    filters: Vec<SparseFilter>,
    /// Rows for c1..=cN of the orthonormal DCT-II over the mel axis.
    dct: Vec<Vec<f64>>,
}

impl fmt::Debug for MfccExtractor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MfccExtractor")
            .field("cfg", &self.cfg)
            .field("sample_rate", &self.sample_rate)
            .field("fft_size", &self.fft_size)
            .finish()
    }
}

impl MfccExtractor {
    pub fn new(cfg: &MfccConfig, sample_rate: u32) -> Result<Self, AudioError> {
        cfg.validate(sample_rate)?;
        let win = cfg.window_samples(sample_rate);
        let fft_size = cfg.resolved_fft_size(sample_rate);
        let filters = mel_filterbank(
            cfg.n_mels,
            fft_size,
            sample_rate,
            0.0,
            sample_rate as f64 / 2.0,
        )
        .into_iter()
        .map(|row| {
            let start = row.iter().position(|&w| w > 0.0).unwrap_or(0);
            let end = row.iter().rposition(|&w| w > 0.0).map_or(start, |e| e + 1);
            SparseFilter {
                start,
                weights: row[start..end].to_vec(),
            }
        })
        .collect();
        let m = cfg.n_mels;
        let scale = (2.0 / m as f64).sqrt();
        let dct = (1..=cfg.n_mfcc)
            .map(|k| {
                (0..m)
                    .map(|i| scale * (PI * k as f64 * (2 * i + 1) as f64 / (2 * m) as f64).cos())
                    .collect()
            })
            .collect();

        Ok(Self {
            cfg: cfg.clone(),
            sample_rate,
            window: hann_window(win),
            hop: cfg.hop_samples(sample_rate),
            fft_size,
            fft: FftPlanner::new().plan_fft_forward(fft_size),
            filters,
            dct,
        })
    }

    pub fn config(&self) -> &MfccConfig {
        &self.cfg
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    fn check_clip(&self, clip: &AudioClip) -> Result<(), AudioError> {
        if clip.sample_rate != self.sample_rate {
            return Err(AudioError::InvalidConfig(format!(
                "extractor built for {} Hz, clip is {} Hz",
                self.sample_rate, clip.sample_rate
            )));
        }
        if clip.samples.len() < self.window.len() {
            return Err(AudioError::ClipTooShort {
                clip_samples: clip.samples.len(),
                needed: self.window.len(),
            });
        }
        Ok(())
    }

    /// Log mel energies of every analysis window in the clip.
    pub fn log_mel_frames(&self, clip: &AudioClip) -> Result<Vec<Vec<f64>>, AudioError> {
        self.check_clip(clip)?;
        let win = self.window.len();
        let n_frames = 1 + (clip.samples.len() - win) / self.hop;
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut power = vec![0.0; self.fft_size / 2 + 1];

        let mut out = Vec::with_capacity(n_frames);
        for f in 0..n_frames {
            let frame = &clip.samples[f * self.hop..f * self.hop + win];
            for (slot, (x, w)) in buf.iter_mut().zip(frame.iter().zip(&self.window)) {
                *slot = Complex::new(x * w, 0.0);
            }
            buf[win..].fill(Complex::new(0.0, 0.0));
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            for (p, c) in power.iter_mut().zip(&buf) {
                *p = c.norm_sqr();
            }
            out.push(
                self.filters
                    .iter()
                    .map(|flt| {
                        let e: f64 = flt
                            .weights
                            .iter()
                            .zip(&power[flt.start..])
                            .map(|(w, p)| w * p)
                            .sum();
                        e.max(self.cfg.log_floor).ln()
                    })
                    .collect(),
            );
        }
        Ok(out)
    }

    /// MFCCs c1..=cN for each analysis window.
    pub fn frame_mfccs(&self, clip: &AudioClip) -> Result<Vec<Vec<f64>>, AudioError> {
        Ok(self
            .log_mel_frames(clip)?
            .iter()
            .map(|lm| {
                self.dct
                    .iter()
                    .map(|row| row.iter().zip(lm).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect())
    }

    /// Per-window MFCCs averaged over the clip, with deltas per the config.
    pub fn clip_features(&self, clip: &AudioClip) -> Result<ClipFeatures, AudioError> {
        let frames = self.frame_mfccs(clip)?;
        let mfcc = column_mean(&frames);
        let (delta, delta_delta) = match self.cfg.deltas {
            DeltaMode::None => (None, None),
            mode => {
                let fv: Vec<FeatureVector> = frames
                    .into_iter()
                    .map(|v| FeatureVector::new(v, FeatureLayout::Mfcc))
                    .collect();
                let half = self.cfg.delta_half_window;
                let d1 = compute_deltas(&fv, 1, half)?;
                let mean_d1 = column_mean(&d1.iter().map(|v| v.values.clone()).collect::<Vec<_>>());
                let mean_d2 = if mode == DeltaMode::DeltaDelta {
                    let d2 = compute_deltas(&d1, 1, half)?;
                    Some(column_mean(
                        &d2.iter().map(|v| v.values.clone()).collect::<Vec<_>>(),
                    ))
                } else {
                    None
                };
                (Some(mean_d1), mean_d2)
            }
        };
        Ok(ClipFeatures {
            mfcc,
            delta,
            delta_delta,
        })
    }

    /// Clip feature vector laid out according to `cfg.deltas`.
    pub fn features(&self, clip: &AudioClip) -> Result<FeatureVector, AudioError> {
        let feats = self.clip_features(clip)?;
        feats
            .truncated(self.cfg.n_mfcc, self.cfg.deltas)
            .ok_or_else(|| AudioError::InvalidConfig("feature blocks shorter than n_mfcc".into()))
    }
}

fn column_mean(rows: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let mut acc = vec![0.0; first.len()];
    for r in rows {
        for (a, x) in acc.iter_mut().zip(r) {
            *a += x;
        }
    }
    let n = rows.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Mean MFCC vector (c1..=cN) of a clip. Deltas in `cfg` are ignored here;
/// use [`MfccExtractor::features`] for the full layout.
pub fn compute_mfcc(clip: &AudioClip, cfg: &MfccConfig) -> Result<FeatureVector, AudioError> {
    let ex = MfccExtractor::new(cfg, clip.sample_rate)?;
    let feats = ex.clip_features(clip)?;
    Ok(FeatureVector::new(feats.mfcc, FeatureLayout::Mfcc))
}
