use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{audio_features, features_dataset, fit, LabelledStream};
use super::EvalError;
use crate::audio_dsp::{ClipFeatures, DeltaMode, MfccConfig};
use crate::classifiers::ForestParams;
use crate::{Light, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Rf,
    Knn,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ClassifierKind::Rf => "rf",
            ClassifierKind::Knn => "knn",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rf" => Ok(ClassifierKind::Rf),
            "knn" => Ok(ClassifierKind::Knn),
            _ => Err(EvalError::Parse {
                what: "classifier",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub classifiers: Vec<ClassifierKind>,
    pub n_mfcc: Vec<usize>,
    pub frame_ms: Vec<u32>,
    pub deltas: Vec<DeltaMode>,
    /// Neighbours for every k-NN cell.
    pub k: usize,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            classifiers: vec![ClassifierKind::Rf, ClassifierKind::Knn],
            n_mfcc: vec![10, 12, 14, 16, 18, 20, 24, 28],
            frame_ms: vec![250, 500, 750, 1000],
            deltas: vec![DeltaMode::None],
            k: 5,
            forest: ForestParams::default(),
            seed: 0,
        }
    }
}

impl GridConfig {
    pub fn cells_per_delta_mode(&self) -> usize {
        self.classifiers.len() * self.n_mfcc.len() * self.frame_ms.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub classifier: ClassifierKind,
    pub n_mfcc: usize,
    pub frame_ms: u32,
    pub deltas: DeltaMode,
    pub feature_len: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Test accuracy in [0, 1].
    pub accuracy: f64,
}

impl GridCell {
    fn key(&self) -> (ClassifierKind, usize, u32, u8) {
        (
            self.classifier,
            self.n_mfcc,
            self.frame_ms,
            self.deltas as u8,
        )
    }
}

/// Cells sorted by accuracy, best first; ties fall back to
/// (classifier, n_mfcc, frame_ms, delta mode) ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridReport {
    pub cells: Vec<GridCell>,
}

impl GridReport {
    pub fn best(&self) -> Option<&GridCell> {
        self.cells.first()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "rank,classifier,n_mfcc,frame_ms,delta,feature_len,n_train,n_test,accuracy\n",
        );
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{:.4}",
                i + 1,
                c.classifier,
                c.n_mfcc,
                c.frame_ms,
                c.deltas,
                c.feature_len,
                c.n_train,
                c.n_test,
                c.accuracy
            );
        }
        out
    }
}

fn sort_cells(cells: &mut [GridCell]) {
    cells.sort_by(|a, b| {
        b.accuracy
            .partial_cmp(&a.accuracy)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.key().cmp(&b.key()))
    });
}

/// Trains and tests every (classifier, n_mfcc, frame_ms, delta mode) cell.
///
/// Features are extracted once per frame length at the largest MFCC count
/// and delta order in the grid and truncated per cell, which gives the same
/// values as extracting each cell separately.
pub fn grid_search(
    train: &[LabelledStream],
    test: &[LabelledStream],
    cfg: &GridConfig,
) -> Result<GridReport> {
    if train.is_empty() || test.is_empty() {
        return Err(EvalError::EmptyCorpus(
            "grid search needs non-empty train and test sets".into(),
        )
        .into());
    }
    let max_n = cfg.n_mfcc.iter().copied().max().unwrap_or(0);
    let max_delta = cfg
        .deltas
        .iter()
        .copied()
        .max_by_key(|d| *d as u8)
        .unwrap_or(DeltaMode::None);
    if max_n == 0 || cfg.classifiers.is_empty() || cfg.frame_ms.is_empty() {
        return Ok(GridReport::default());
    }
    let mfcc = MfccConfig::default()
        .with_n_mfcc(max_n)
        .with_deltas(max_delta);

    type Feats = Vec<(ClipFeatures, Light)>;
    let mut by_frame: BTreeMap<u32, (Feats, Feats)> = BTreeMap::new();
    for &ms in &cfg.frame_ms {
        if by_frame.contains_key(&ms) {
            continue;
        }
        by_frame.insert(
            ms,
            (
                audio_features(train, &mfcc, ms)?,
                audio_features(test, &mfcc, ms)?,
            ),
        );
    }

    let mut coords = Vec::new();
    for &d in &cfg.deltas {
        for &c in &cfg.classifiers {
            for &n in &cfg.n_mfcc {
                for &ms in &cfg.frame_ms {
                    coords.push((c, n, ms, d));
                }
            }
        }
    }
    let mut cells: Vec<GridCell> = coords
        .par_iter()
        .map(|&(classifier, n_mfcc, frame_ms, deltas)| {
            let cell_err = |reason: String| EvalError::Cell {
                classifier: classifier.to_string(),
                n_mfcc,
                frame_ms,
                deltas: deltas.to_string(),
                reason,
            };
            let (tr, te) = &by_frame[&frame_ms];
            let run = || -> Result<GridCell> {
                let train_set = features_dataset(tr, n_mfcc, deltas)?;
                let test_set = features_dataset(te, n_mfcc, deltas)?;
                let model = fit(
                    classifier,
                    &train_set,
                    cfg.k,
                    cfg.forest.with_seed(cfg.seed),
                )?;
                let mut correct = 0usize;
                for (row, &label) in test_set.rows.iter().zip(&test_set.labels) {
                    correct += usize::from(model.predict(row)?.class == label);
                }
                Ok(GridCell {
                    classifier,
                    n_mfcc,
                    frame_ms,
                    deltas,
                    feature_len: train_set.n_features(),
                    n_train: train_set.len(),
                    n_test: test_set.len(),
                    accuracy: correct as f64 / test_set.len() as f64,
                })
            };
            run().map_err(|e| cell_err(e.to_string()).into())
        })
        .collect::<Result<_>>()?;
    sort_cells(&mut cells);
    Ok(GridReport { cells })
}
