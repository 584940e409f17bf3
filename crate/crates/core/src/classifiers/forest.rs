use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{LabeledDataset, ModelError, Prediction};

/// Number of features examined at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxFeatures {
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(self, n_features: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().floor() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(c) => c,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(16),
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            min_samples_split: 2,
            seed: 0,
        }
    }
}

impl ForestParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class distribution of the training rows that reached this leaf.
    Leaf { dist: Vec<f64> },
}

/// Binary decision tree stored as a node arena; node 0 is the root and
/// children always sit after their parent.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_dist(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { dist } => return dist,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub params: ForestParams,
    pub n_features: usize,
    pub class_names: Vec<String>,
    pub trees: Vec<Tree>,
}

impl ForestModel {
    /// Grows `n_trees` Gini trees, each on its own seeded bootstrap sample.
    pub fn fit(data: &LabeledDataset, params: ForestParams) -> Result<Self, ModelError> {
        if data.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        if params.n_trees == 0 {
            return Err(ModelError::InvalidParam(
                "n_trees must be at least 1".into(),
            ));
        }
        if data.n_classes() == 0 {
            return Err(ModelError::InvalidParam("dataset has no classes".into()));
        }
        let mut master = ChaCha8Rng::seed_from_u64(params.seed);
        let tree_seeds: Vec<u64> = (0..params.n_trees).map(|_| master.random()).collect();
        let trees = tree_seeds
            .into_par_iter()
            .map(|s| grow_tree(data, &params, s))
            .collect();
        Ok(Self {
            params,
            n_features: data.n_features(),
            class_names: data.class_names.clone(),
            trees,
        })
    }

    /// Mean of the leaf distributions reached in every tree.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut acc = vec![0.0; self.class_names.len()];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.leaf_dist(x)) {
                *a += p;
            }
        }
        let n = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Ok(Prediction::from_confidences(acc))
    }
}

struct Pending {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
}

fn grow_tree(data: &LabeledDataset, params: &ForestParams, seed: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = data.len();
    let rows: Vec<usize> = if params.bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    let n_classes = data.n_classes();
    let n_features = data.n_features();
    let mtry = params.max_features.resolve(n_features);
    let mut features: Vec<usize> = (0..n_features).collect();

    let mut nodes = vec![Node::Leaf { dist: Vec::new() }];
    let mut stack = vec![Pending {
        node: 0,
        rows,
        depth: 0,
    }];
    while let Some(Pending { node, rows, depth }) = stack.pop() {
        let counts = class_counts(data, &rows, n_classes);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_capped = params.max_depth.is_some_and(|d| depth >= d);
        let split = if pure || depth_capped || rows.len() < params.min_samples_split.max(2) {
            None
        } else {
            features.shuffle(&mut rng);
            find_split(data, &rows, &features, mtry, n_classes)
        };
        match split {
            None => {
                let total = rows.len() as f64;
                nodes[node] = Node::Leaf {
                    dist: counts.iter().map(|&c| c as f64 / total).collect(),
                };
            }
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| data.rows[i][feature] <= threshold);
                let (left, right) = (nodes.len(), nodes.len() + 1);
                nodes.push(Node::Leaf { dist: Vec::new() });
                nodes.push(Node::Leaf { dist: Vec::new() });
                nodes[node] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                stack.push(Pending {
                    node: right,
                    rows: r,
                    depth: depth + 1,
                });
                stack.push(Pending {
                    node: left,
                    rows: l,
                    depth: depth + 1,
                });
            }
        }
    }
    Tree { nodes }
}

fn class_counts(data: &LabeledDataset, rows: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &i in rows {
        counts[data.labels[i]] += 1;
    }
    counts
}

fn gini(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / t).powi(2)).sum::<f64>()
}

/// Best Gini split over the first `mtry` shuffled features. When none of
/// them can separate the rows the remaining features are tried too, so an
/// impure node only becomes a leaf if every feature is constant on it.
fn find_split(
    data: &LabeledDataset,
    rows: &[usize],
    features: &[usize],
    mtry: usize,
    n_classes: usize,
) -> Option<(usize, f64)> {
    let total = rows.len();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted = rows.to_vec();
    let mut left = vec![0usize; n_classes];
    let right_init = class_counts(data, rows, n_classes);

    for (tried, &f) in features.iter().enumerate() {
        if tried >= mtry && best.is_some() {
            break;
        }
        sorted.sort_by(|&a, &b| data.rows[a][f].total_cmp(&data.rows[b][f]).then(a.cmp(&b)));
        left.iter_mut().for_each(|c| *c = 0);
        let mut right = right_init.clone();
        for pos in 0..total - 1 {
            let i = sorted[pos];
            left[data.labels[i]] += 1;
            right[data.labels[i]] -= 1;
            let (x, next) = (data.rows[i][f], data.rows[sorted[pos + 1]][f]);
            if x >= next {
                continue;
            }
            let nl = pos + 1;
            let nr = total - nl;
            let score = (nl as f64 * gini(&left, nl) + nr as f64 * gini(&right, nr)) / total as f64;
            if best.is_none_or(|b| score < b.0) {
                let mut thr = x + (next - x) / 2.0;
                if thr >= next {
                    thr = x;
                }
                best = Some((score, f, thr));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}
