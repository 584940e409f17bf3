//! Random forest and k-nearest-neighbour classifiers with per-class
//! confidences, plus a versioned binary model format.

mod codec;
mod forest;
mod knn;

pub use codec::{model_load, model_save, FORMAT_VERSION, MAGIC};
pub use forest::{ForestModel, ForestParams, MaxFeatures, Node, Tree};
pub use knn::KnnModel;

use thiserror::Error;

use crate::Light;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row {row} has label {label} but only {n_classes} classes exist")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },
    #[error("invalid hyperparameter: {0}")]
    InvalidParam(String),
    #[error("not a model file (bad magic)")]
    BadMagic,
    #[error("unsupported model format version {found} (this build reads version {supported})")]
    Version { found: u8, supported: u8 },
    #[error("corrupt model payload at byte {offset}: {reason}")]
    Corrupt { offset: usize, reason: String },
}

/// Feature rows with class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self, ModelError> {
        if rows.len() != labels.len() {
            return Err(ModelError::InvalidParam(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if let Some(first) = rows.first() {
            let dim = first.len();
            if let Some(r) = rows.iter().find(|r| r.len() != dim) {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
        }
        if let Some((row, &label)) = labels
            .iter()
            .enumerate()
            .find(|(_, &l)| l >= class_names.len())
        {
            return Err(ModelError::LabelOutOfRange {
                row,
                label,
                n_classes: class_names.len(),
            });
        }
        Ok(Self {
            rows,
            labels,
            class_names,
        })
    }

    /// Dataset over the two light classes.
    pub fn from_lights(rows: Vec<Vec<f64>>, labels: &[Light]) -> Result<Self, ModelError> {
        Self::new(
            rows,
            labels.iter().map(|l| l.class_id()).collect(),
            Light::class_names(),
        )
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Predicted class with a confidence per class (summing to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub confidences: Vec<f64>,
}

impl Prediction {
    /// Argmax over `confidences`, lowest class index on ties.
    pub fn from_confidences(confidences: Vec<f64>) -> Self {
        let class = argmax_low_tie(&confidences);
        Self { class, confidences }
    }

    pub fn light(&self) -> Option<Light> {
        Light::from_class_id(self.class)
    }

    pub fn confidence(&self, class: usize) -> f64 {
        self.confidences.get(class).copied().unwrap_or(0.0)
    }
}

pub(crate) fn argmax_low_tie(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Either trained model behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Forest(ForestModel),
    Knn(KnnModel),
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        match self {
            Classifier::Forest(m) => m.predict(x),
            Classifier::Knn(m) => m.predict(x),
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Classifier::Forest(m) => m.n_features,
            Classifier::Knn(m) => m.n_features,
        }
    }

    pub fn class_names(&self) -> &[String] {
        match self {
            Classifier::Forest(m) => &m.class_names,
            Classifier::Knn(m) => &m.class_names,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Classifier::Forest(_) => "rf",
            Classifier::Knn(_) => "knn",
        }
    }
}

impl From<ForestModel> for Classifier {
    fn from(m: ForestModel) -> Self {
        Classifier::Forest(m)
    }
}

impl From<KnnModel> for Classifier {
    fn from(m: KnnModel) -> Self {
        Classifier::Knn(m)
    }
}
