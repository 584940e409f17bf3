use std::collections::HashMap;

use rayon::prelude::*;

use super::grid::ClassifierKind;
use super::run::{frame_evidence, selected_frames};
use super::{EvalError, PipelineModel};
use crate::audio_dsp::{
    segment_stream, AudioClip, ClipFeatures, DeltaMode, MfccConfig, MfccExtractor,
};
use crate::classifiers::{Classifier, ForestModel, ForestParams, KnnModel, LabeledDataset};
use crate::dataset_io::{read_wav, ConditionFilter, Corpus};
use crate::fusion::{average_vision_features, fusion_train, SyncConfig, VisionRow};
use crate::vision::{BlobDetector, HueThresholds};
use crate::{Light, Result};

/// A continuous recording holding a single light state.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledStream {
    pub source: String,
    pub label: Light,
    pub clip: AudioClip,
}

/// Loads every audio file referenced by labelled windows that pass `filter`,
/// in order of first appearance.
pub fn corpus_streams(corpus: &Corpus, filter: ConditionFilter) -> Result<Vec<LabelledStream>> {
    let mut order: Vec<(&str, Light)> = Vec::new();
    let mut seen: HashMap<&str, Light> = HashMap::new();
    for (item, label) in corpus.labelled(filter) {
        match seen.get(item.audio.as_str()) {
            Some(&l) if l != label => return Err(EvalError::MixedLabels(item.audio.clone()).into()),
            Some(_) => {}
            None => {
                seen.insert(&item.audio, label);
                order.push((&item.audio, label));
            }
        }
    }
    if order.is_empty() {
        return Err(EvalError::EmptyCorpus(format!("condition {filter}")).into());
    }
    order
        .par_iter()
        .map(|&(rel, label)| {
            Ok(LabelledStream {
                source: rel.to_string(),
                label,
                clip: read_wav(&corpus.resolve(rel))?,
            })
        })
        .collect()
}

/// Cuts each stream into back-to-back `frame_ms` clips (a short tail is
/// dropped) and extracts features at `cfg`. Output order follows the input.
pub fn audio_features(
    streams: &[LabelledStream],
    cfg: &MfccConfig,
    frame_ms: u32,
) -> Result<Vec<(ClipFeatures, Light)>> {
    let mut extractors: HashMap<u32, MfccExtractor> = HashMap::new();
    for s in streams {
        if let std::collections::hash_map::Entry::Vacant(e) = extractors.entry(s.clip.sample_rate) {
            e.insert(MfccExtractor::new(cfg, s.clip.sample_rate)?);
        }
    }
    let per_stream: Vec<Vec<(ClipFeatures, Light)>> = streams
        .par_iter()
        .map(|s| {
            let ex = &extractors[&s.clip.sample_rate];
            segment_stream(&s.clip.samples, s.clip.sample_rate, frame_ms)
                .iter()
                .map(|c| Ok((ex.clip_features(c)?, s.label)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_stream.into_iter().flatten().collect())
}

pub(crate) fn features_dataset(
    features: &[(ClipFeatures, Light)],
    n_mfcc: usize,
    deltas: DeltaMode,
) -> Result<LabeledDataset> {
    let mut rows = Vec::with_capacity(features.len());
    let mut labels = Vec::with_capacity(features.len());
    for (f, l) in features {
        let v = f.truncated(n_mfcc, deltas).ok_or_else(|| {
            crate::Error::Invariant("feature block shorter than requested".into())
        })?;
        rows.push(v.values);
        labels.push(*l);
    }
    Ok(LabeledDataset::from_lights(rows, &labels)?)
}

pub(crate) fn fit(
    kind: ClassifierKind,
    data: &LabeledDataset,
    k: usize,
    forest: ForestParams,
) -> Result<Classifier> {
    Ok(match kind {
        ClassifierKind::Rf => ForestModel::fit(data, forest)?.into(),
        ClassifierKind::Knn => KnnModel::fit(data, k)?.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainAudioConfig {
    pub kind: ClassifierKind,
    pub n_mfcc: usize,
    pub frame_ms: u32,
    pub deltas: DeltaMode,
    pub k: usize,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for TrainAudioConfig {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::Rf,
            n_mfcc: 24,
            frame_ms: 250,
            deltas: DeltaMode::None,
            k: 5,
            forest: ForestParams::default(),
            seed: 0,
        }
    }
}

/// Audio-only pipeline from every labelled window of `corpus`.
pub fn train_audio(corpus: &Corpus, cfg: &TrainAudioConfig) -> Result<PipelineModel> {
    let mfcc = MfccConfig::default()
        .with_n_mfcc(cfg.n_mfcc)
        .with_deltas(cfg.deltas);
    let streams = corpus_streams(corpus, ConditionFilter::All)?;
    let feats = audio_features(&streams, &mfcc, cfg.frame_ms)?;
    let data = features_dataset(&feats, cfg.n_mfcc, cfg.deltas)?;
    let audio = fit(cfg.kind, &data, cfg.k, cfg.forest.with_seed(cfg.seed))?;
    let model = PipelineModel {
        mfcc,
        frame_ms: cfg.frame_ms,
        thresholds: HueThresholds::default(),
        sync: SyncConfig::default(),
        detector: BlobDetector::default(),
        audio,
        fused: None,
    };
    model.check()?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionTrainConfig {
    pub n_mfcc: usize,
    pub frame_ms: u32,
    pub thresholds: HueThresholds,
    pub sync: SyncConfig,
    pub detector: BlobDetector,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for FusionTrainConfig {
    fn default() -> Self {
        Self {
            n_mfcc: 24,
            frame_ms: 250,
            thresholds: HueThresholds::default(),
            sync: SyncConfig::default(),
            detector: BlobDetector::default(),
            forest: ForestParams::default(),
            seed: 0,
        }
    }
}

/// Window-level vision rows: the averaged `(p_red, p_green)` of each
/// window's selected frames, with the window's label (`None` for windows
/// without a PTL).
pub fn vision_rows(
    corpus: &Corpus,
    thresholds: &HueThresholds,
    sync: &SyncConfig,
    detector: &BlobDetector,
) -> Result<Vec<VisionRow>> {
    let picks = crate::fusion::select_frames(corpus.header.fps, corpus.header.window_ms, sync)?;
    corpus
        .items
        .par_iter()
        .map(|item| {
            let frames = selected_frames(corpus, item, &picks)?;
            let evidence = frame_evidence(&frames, detector, thresholds)?;
            let feats: Vec<_> = evidence.iter().map(|e| e.0).collect();
            Ok(VisionRow {
                features: average_vision_features(&feats),
                label: item.label,
            })
        })
        .collect()
}

/// Feature-level fusion pipeline: a forest over MFCCs from `audio_corpus`
/// paired with vision rows from `vision_corpus`, plus an audio-only forest
/// on the same audio rows for the other modes.
pub fn train_fusion(
    audio_corpus: &Corpus,
    vision_corpus: &Corpus,
    cfg: &FusionTrainConfig,
) -> Result<PipelineModel> {
    cfg.thresholds.validate()?;
    let mfcc = MfccConfig::default().with_n_mfcc(cfg.n_mfcc);
    let streams = corpus_streams(audio_corpus, ConditionFilter::All)?;
    let feats = audio_features(&streams, &mfcc, cfg.frame_ms)?;
    let audio_data = features_dataset(&feats, cfg.n_mfcc, DeltaMode::None)?;
    let rows = vision_rows(vision_corpus, &cfg.thresholds, &cfg.sync, &cfg.detector)?;
    let fused = fusion_train(&audio_data, &rows, cfg.forest, cfg.seed)?;
    let audio = ForestModel::fit(&audio_data, cfg.forest.with_seed(cfg.seed))?;
    let model = PipelineModel {
        mfcc,
        frame_ms: cfg.frame_ms,
        thresholds: cfg.thresholds,
        sync: cfg.sync,
        detector: cfg.detector,
        audio: audio.into(),
        fused: Some(fused.into()),
    };
    model.check()?;
    Ok(model)
}

/// Box crops for hue calibration: every labelled window's selected frames,
/// cropped to the detector's box where it finds one.
pub fn calibration_regions(
    corpus: &Corpus,
    sync: &SyncConfig,
    detector: &BlobDetector,
) -> Result<Vec<(Light, crate::vision::ImageRGB)>> {
    let picks = crate::fusion::select_frames(corpus.header.fps, corpus.header.window_ms, sync)?;
    let items: Vec<_> = corpus.labelled(ConditionFilter::All).collect();
    let per_item: Vec<Vec<(Light, crate::vision::ImageRGB)>> = items
        .par_iter()
        .map(|&(item, label)| {
            let frames = selected_frames(corpus, item, &picks)?;
            Ok(frames
                .into_iter()
                .filter_map(|(_, img)| detector.find(&img).map(|b| (label, img.crop(&b))))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_item.into_iter().flatten().collect())
}
