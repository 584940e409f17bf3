use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::report::{tally, ReportRow};
use super::{EvalError, PipelineModel};
use crate::audio_dsp::{AudioClip, MfccExtractor};
use crate::dataset_io::{read_image, read_wav, ConditionFilter, Corpus, CorpusItem};
use crate::fusion::{
    average_vision_features, build_fused_vector, decision_level_fuse, select_frames, FrameEvidence,
};
use crate::vision::{
    classify_hue, frame_features, Detector, HueThresholds, ImageRGB, VisionFeatures,
};
use crate::{Decision, Light, Result};

/// Which pipeline turns a window into a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Vision,
    Audio,
    /// Feature-level fusion.
    Feature,
    /// Decision-level fusion.
    Decision,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Vision, Mode::Audio, Mode::Feature, Mode::Decision];

    /// Method name used in reports.
    pub fn method(self) -> &'static str {
        match self {
            Mode::Vision => "vision",
            Mode::Audio => "audio",
            Mode::Feature => "fusion-feature",
            Mode::Decision => "fusion-decision",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.method())
    }
}

impl FromStr for Mode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vision" => Ok(Mode::Vision),
            "audio" => Ok(Mode::Audio),
            "feature" | "fusion-feature" => Ok(Mode::Feature),
            "decision" | "fusion-decision" => Ok(Mode::Decision),
            _ => Err(EvalError::Parse {
                what: "mode",
                value: s.to_string(),
            }),
        }
    }
}

/// One data point ready for inference: audio of the model's frame length and
/// the selected frames with their ids.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowInput {
    pub audio: AudioClip,
    pub frames: Vec<(String, ImageRGB)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOutput {
    pub decision: Decision,
    /// Per-light scores, red first: class confidences for the audio and
    /// feature-level modes, averaged pixel shares in [0, 1] for vision,
    /// summed confidences for decision-level fusion.
    pub scores: [f64; 2],
}

/// Audio for a window starting at `offset_ms`. Near the end of a recording
/// the clip is moved back so it still spans `frame_ms`.
fn window_audio(stream: &AudioClip, id: &str, offset_ms: u32, frame_ms: u32) -> Result<AudioClip> {
    if let Some(c) = stream.slice_ms(offset_ms, frame_ms) {
        return Ok(c);
    }
    let have_ms = stream.duration_ms().floor() as u32;
    have_ms
        .checked_sub(frame_ms)
        .and_then(|start| stream.slice_ms(start, frame_ms))
        .ok_or_else(|| {
            EvalError::ShortAudio {
                id: id.to_string(),
                have_ms,
                need_ms: frame_ms,
            }
            .into()
        })
}

pub(crate) fn selected_frames(
    corpus: &Corpus,
    item: &CorpusItem,
    picks: &[usize],
) -> Result<Vec<(String, ImageRGB)>> {
    picks
        .iter()
        .filter_map(|&i| item.frames.get(i))
        .map(|rel| Ok((rel.clone(), read_image(&corpus.resolve(rel))?)))
        .collect()
}

pub(crate) fn frame_evidence(
    frames: &[(String, ImageRGB)],
    detector: &dyn Detector,
    thresholds: &HueThresholds,
) -> Result<Vec<(VisionFeatures, Option<f64>)>> {
    frames
        .iter()
        .map(|(id, img)| {
            let boxes = detector.detect(id, img)?;
            Ok(frame_features(img, &boxes, thresholds)?)
        })
        .collect()
}

/// Reads one corpus window from disk.
pub fn load_window(
    corpus: &Corpus,
    item: &CorpusItem,
    model: &PipelineModel,
) -> Result<WindowInput> {
    let stream = read_wav(&corpus.resolve(&item.audio))?;
    let picks = select_frames(corpus.header.fps, corpus.header.window_ms, &model.sync)?;
    Ok(WindowInput {
        audio: window_audio(&stream, &item.id, item.offset_ms, model.frame_ms)?,
        frames: selected_frames(corpus, item, &picks)?,
    })
}

/// Runs one pipeline on one window.
pub fn infer_window(
    model: &PipelineModel,
    mode: Mode,
    input: &WindowInput,
    detector: &dyn Detector,
) -> Result<WindowOutput> {
    let audio_features = || -> Result<_> {
        let ex = MfccExtractor::new(&model.mfcc, input.audio.sample_rate)?;
        Ok(ex.features(&input.audio)?)
    };
    let scores2 = |v: &[f64]| {
        [
            v.first().copied().unwrap_or(0.0),
            v.get(1).copied().unwrap_or(0.0),
        ]
    };
    match mode {
        Mode::Audio => {
            let p = model.audio.predict(&audio_features()?.values)?;
            Ok(WindowOutput {
                decision: p.light().map_or(Decision::Unavailable, Decision::from),
                scores: scores2(&p.confidences),
            })
        }
        Mode::Vision => {
            let ev = frame_evidence(&input.frames, detector, &model.thresholds)?;
            let feats: Vec<VisionFeatures> = ev.iter().map(|e| e.0).collect();
            let (r, g) = average_vision_features(&feats);
            let detected = feats.iter().any(|f| f.detected);
            let window = if detected {
                VisionFeatures::detected(r, g)
            } else {
                VisionFeatures::UNDETECTED
            };
            Ok(WindowOutput {
                decision: classify_hue(&window),
                scores: [r / 100.0, g / 100.0],
            })
        }
        Mode::Feature => {
            let fused = model
                .fused
                .as_ref()
                .ok_or(EvalError::Unsupported("feature-level fusion"))?;
            let ev = frame_evidence(&input.frames, detector, &model.thresholds)?;
            let feats: Vec<VisionFeatures> = ev.iter().map(|e| e.0).collect();
            let v = build_fused_vector(
                &audio_features()?,
                model.mfcc.n_mfcc,
                average_vision_features(&feats),
            )?;
            let p = fused.predict(&v.values)?;
            Ok(WindowOutput {
                decision: p.light().map_or(Decision::Unavailable, Decision::from),
                scores: scores2(&p.confidences),
            })
        }
        Mode::Decision => {
            let ev = frame_evidence(&input.frames, detector, &model.thresholds)?;
            let frames: Vec<FrameEvidence> = ev
                .iter()
                .map(|(f, c)| FrameEvidence {
                    label: classify_hue(f),
                    confidence: *c,
                })
                .collect();
            let audio = model.audio.predict(&audio_features()?.values)?;
            let fused = decision_level_fuse(&frames, &audio);
            Ok(WindowOutput {
                decision: fused.light.into(),
                scores: fused.totals,
            })
        }
    }
}

/// Scores one pipeline on the labelled windows of `corpus` that pass
/// `filter`. Windows run in parallel; the result does not depend on corpus
/// order apart from the timing field.
pub fn evaluate(
    model: &PipelineModel,
    mode: Mode,
    corpus: &Corpus,
    filter: ConditionFilter,
) -> Result<ReportRow> {
    if mode == Mode::Feature && model.fused.is_none() {
        return Err(EvalError::Unsupported("feature-level fusion").into());
    }
    let items: Vec<(&CorpusItem, Light)> = corpus.labelled(filter).collect();
    if items.is_empty() {
        return Err(EvalError::EmptyCorpus(format!("condition {filter}")).into());
    }
    let mut paths: Vec<&str> = items.iter().map(|(it, _)| it.audio.as_str()).collect();
    paths.sort_unstable();
    paths.dedup();
    let streams: HashMap<&str, AudioClip> = paths
        .par_iter()
        .map(|&p| Ok((p, read_wav(&corpus.resolve(p))?)))
        .collect::<Result<_>>()?;
    let picks = select_frames(corpus.header.fps, corpus.header.window_ms, &model.sync)?;

    let outcomes: Vec<(Light, Decision, f64)> = items
        .par_iter()
        .map(|&(item, truth)| {
            let t0 = Instant::now();
            let input = WindowInput {
                audio: window_audio(
                    &streams[item.audio.as_str()],
                    &item.id,
                    item.offset_ms,
                    model.frame_ms,
                )?,
                frames: selected_frames(corpus, item, &picks)?,
            };
            let out = infer_window(model, mode, &input, &model.detector)?;
            Ok((truth, out.decision, t0.elapsed().as_secs_f64() * 1000.0))
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(Light, Decision)> = outcomes.iter().map(|&(t, d, _)| (t, d)).collect();
    let mut row = tally(mode.method(), &filter.to_string(), &pairs);
    row.mean_window_ms = outcomes.iter().map(|o| o.2).sum::<f64>() / outcomes.len() as f64;
    Ok(row)
}
