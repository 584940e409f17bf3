use super::{LabeledDataset, ModelError, Prediction};

/// Brute-force Euclidean k-nearest-neighbour classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub n_features: usize,
    pub class_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl KnnModel {
    pub fn fit(data: &LabeledDataset, k: usize) -> Result<Self, ModelError> {
        if data.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        if k == 0 || k > data.len() {
            return Err(ModelError::InvalidParam(format!(
                "k must lie in [1, {}], got {k}",
                data.len()
            )));
        }
        Ok(Self {
            k,
            n_features: data.n_features(),
            class_names: data.class_names.clone(),
            rows: data.rows.clone(),
            labels: data.labels.clone(),
        })
    }

    /// Majority vote among the `k` nearest rows; confidences are vote
    /// fractions. Tied vote counts go to the class of the nearest neighbour
    /// among the tied classes. Equal distances are ordered by row index.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut dist: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let k = self.k.min(dist.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, cmp);
        }
        let nearest = &mut dist[..k];
        nearest.sort_by(cmp);

        let mut votes = vec![0usize; self.class_names.len()];
        for &(_, i) in nearest.iter() {
            votes[self.labels[i]] += 1;
        }
        let top = *votes.iter().max().unwrap_or(&0);
        let class = nearest
            .iter()
            .map(|&(_, i)| self.labels[i])
            .find(|&c| votes[c] == top)
            .unwrap_or(0);
        Ok(Prediction {
            class,
            confidences: votes.iter().map(|&v| v as f64 / k as f64).collect(),
        })
    }
}
