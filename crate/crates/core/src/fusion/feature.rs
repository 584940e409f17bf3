use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FusionError;
use crate::audio_dsp::{FeatureLayout, FeatureVector};
use crate::classifiers::{ForestModel, ForestParams, LabeledDataset};
use crate::Light;

/// Concatenates the MFCC block and the averaged `[p_red, p_green]`.
pub fn build_fused_vector(
    mfcc: &FeatureVector,
    n_mfcc: usize,
    vision: (f64, f64),
) -> Result<FeatureVector, FusionError> {
    if mfcc.len() != n_mfcc || mfcc.layout != FeatureLayout::Mfcc {
        return Err(FusionError::MfccLength {
            expected: n_mfcc,
            got: mfcc.len(),
        });
    }
    let mut values = Vec::with_capacity(n_mfcc + 2);
    values.extend_from_slice(&mfcc.values);
    values.push(vision.0);
    values.push(vision.1);
    Ok(FeatureVector::new(values, FeatureLayout::Fused))
}

/// Vision training row; `label == None` marks a frame set without any PTL.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisionRow {
    pub features: (f64, f64),
    pub label: Option<Light>,
}

/// Builds the fused training set from independent audio and vision sets.
///
/// Every audio row is used once. With probability equal to the share of
/// no-PTL rows in the vision set it is paired with `(0, 0)`; otherwise with a
/// vision row of the same label drawn uniformly. All draws come from `seed`.
pub fn pair_features(
    audio: &LabeledDataset,
    vision: &[VisionRow],
    seed: u64,
) -> Result<LabeledDataset, FusionError> {
    if audio.is_empty() {
        return Err(FusionError::Empty("audio"));
    }
    if vision.is_empty() {
        return Err(FusionError::Empty("vision"));
    }
    let pool = |l: Light| -> Vec<(f64, f64)> {
        vision
            .iter()
            .filter(|r| r.label == Some(l))
            .map(|r| r.features)
            .collect()
    };
    let pools = [pool(Light::Red), pool(Light::Green)];
    let none_share =
        vision.iter().filter(|r| r.label.is_none()).count() as f64 / vision.len() as f64;

    for l in Light::ALL {
        let in_audio = audio.labels.contains(&l.class_id());
        let in_vision = !pools[l.class_id()].is_empty();
        if in_audio != in_vision {
            return Err(FusionError::LabelMismatch(l.to_string()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(audio.len());
    for (row, &label) in audio.rows.iter().zip(&audio.labels) {
        let draw: f64 = rng.random();
        let vis = if draw < none_share {
            (0.0, 0.0)
        } else {
            let p = pools
                .get(label)
                .filter(|p| !p.is_empty())
                .ok_or_else(|| FusionError::LabelMismatch(format!("class {label}")))?;
            p[rng.random_range(0..p.len())]
        };
        let mut v = row.clone();
        v.push(vis.0);
        v.push(vis.1);
        rows.push(v);
    }
    Ok(LabeledDataset::new(
        rows,
        audio.labels.clone(),
        audio.class_names.clone(),
    )?)
}

/// Pairs the two training sets and fits a random forest on the fused rows.
pub fn fusion_train(
    audio: &LabeledDataset,
    vision: &[VisionRow],
    params: ForestParams,
    seed: u64,
) -> Result<ForestModel, FusionError> {
    let fused = pair_features(audio, vision, seed)?;
    Ok(ForestModel::fit(&fused, params.with_seed(seed))?)
}
