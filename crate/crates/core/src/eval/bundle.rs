//! Model bundle: everything a trained pipeline needs at inference time.
//!
//! ```text
//! magic    b"PTLP"
//! version  u8 (currently 1)
//! meta     u32 length + JSON (MFCC config, frame length, hue thresholds,
//!          frame selection, detector settings)
//! audio    u32 length + model in the `PTLM` format
//! fused    u32 length + model in the `PTLM` format; length 0 when absent
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::audio_dsp::{DeltaMode, MfccConfig};
use crate::classifiers::{model_load, model_save, Classifier};
use crate::dataset_io::{read_bytes, write_bytes};
use crate::fusion::SyncConfig;
use crate::vision::{BlobDetector, HueThresholds};
use crate::{Error, Result};

pub const BUNDLE_MAGIC: &[u8; 4] = b"PTLP";
pub const BUNDLE_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineModel {
    /// Audio feature settings; `n_mfcc` and `deltas` match the audio model.
    pub mfcc: MfccConfig,
    /// Audio clip length fed to the audio model.
    pub frame_ms: u32,
    pub thresholds: HueThresholds,
    pub sync: SyncConfig,
    pub detector: BlobDetector,
    /// Audio-only classifier, used by the audio and decision-level modes.
    pub audio: Classifier,
    /// Feature-level fusion forest over `[mfcc.., p_red, p_green]`.
    pub fused: Option<Classifier>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    mfcc: MfccConfig,
    frame_ms: u32,
    thresholds: HueThresholds,
    sync: SyncConfig,
    detector: BlobDetector,
}

impl PipelineModel {
    pub fn audio_dim(&self) -> usize {
        self.mfcc.deltas.layout().dim(self.mfcc.n_mfcc)
    }

    /// Consistency between the stored configuration and the models.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| {
            Err(Error::Eval(EvalError::Bundle {
                offset: 0,
                reason: m,
            }))
        };
        if self.audio.n_features() != self.audio_dim() {
            return bad(format!(
                "audio model expects {} features, configuration yields {}",
                self.audio.n_features(),
                self.audio_dim()
            ));
        }
        if let Some(f) = &self.fused {
            if self.mfcc.deltas != DeltaMode::None || f.n_features() != self.mfcc.n_mfcc + 2 {
                return bad(format!(
                    "fused model expects {} features, configuration yields {}",
                    f.n_features(),
                    self.mfcc.n_mfcc + 2
                ));
            }
        }
        if self.frame_ms == 0 {
            return bad("frame_ms is zero".into());
        }
        self.thresholds.validate()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let meta = Meta {
            mfcc: self.mfcc.clone(),
            frame_ms: self.frame_ms,
            thresholds: self.thresholds,
            sync: self.sync,
            detector: self.detector,
        };
        let json = serde_json::to_vec(&meta).expect("metadata serialises");
        let mut out = Vec::new();
        out.extend_from_slice(BUNDLE_MAGIC);
        out.push(BUNDLE_VERSION);
        let mut section = |b: &[u8]| {
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
            out.extend_from_slice(b);
        };
        section(&json);
        section(&model_save(&self.audio));
        section(&self.fused.as_ref().map(model_save).unwrap_or_default());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let err = |offset: usize, reason: &str| {
            Error::Eval(EvalError::Bundle {
                offset,
                reason: reason.to_string(),
            })
        };
        if bytes.len() < 5 || &bytes[..4] != BUNDLE_MAGIC {
            return Err(err(0, "not a model bundle (bad magic)"));
        }
        if bytes[4] != BUNDLE_VERSION {
            return Err(err(4, &format!("unsupported bundle version {}", bytes[4])));
        }
        let mut pos = 5;
        let mut section = || -> Result<(usize, &[u8])> {
            let head = bytes
                .get(pos..pos + 4)
                .ok_or_else(|| err(pos, "truncated section length"))?;
            let len = u32::from_le_bytes(head.try_into().expect("4 bytes")) as usize;
            let start = pos + 4;
            let body = bytes
                .get(start..start + len)
                .ok_or_else(|| err(start, "truncated section"))?;
            pos = start + len;
            Ok((start, body))
        };
        let (meta_at, meta) = section()?;
        let meta: Meta = serde_json::from_slice(meta)
            .map_err(|e| err(meta_at, &format!("bad metadata: {e}")))?;
        let (_, audio) = section()?;
        let audio = model_load(audio)?;
        let (_, fused) = section()?;
        let fused = if fused.is_empty() {
            None
        } else {
            Some(model_load(fused)?)
        };
        if pos != bytes.len() {
            return Err(err(pos, "trailing bytes after bundle"));
        }
        let model = Self {
            mfcc: meta.mfcc,
            frame_ms: meta.frame_ms,
            thresholds: meta.thresholds,
            sync: meta.sync,
            detector: meta.detector,
            audio,
            fused,
        };
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(write_bytes(path, &self.to_bytes())?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&read_bytes(path)?)
    }
}
