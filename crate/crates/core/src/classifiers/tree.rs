//! CART decision tree with Gini impurity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{argmax, ClassifierError, FeatureVector, LabeledSet, Prediction};

/// Which thresholds are tried on each term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Only `count > 0.5`: term present vs absent.
    Presence,
    /// Midpoints between consecutive distinct values seen at the node.
    AllMidpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub thresholds: ThresholdMode,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 20,
            min_samples_split: 5,
            thresholds: ThresholdMode::Presence,
        }
    }
}

/// A split sends `x[feature] > threshold` right and everything else left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        class_counts: Vec<usize>,
        label: usize,
    },
    Internal {
        split: Split,
        left: usize,
        right: usize,
    },
}

/// Nodes live in an arena; index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    nodes: Vec<TreeNode>,
    n_classes: usize,
    pub params: TreeParams,
}

impl DecisionTreeModel {
    /// Builds a model from an explicit node arena (root at index 0).
    pub fn from_nodes(nodes: Vec<TreeNode>, n_classes: usize) -> Self {
        DecisionTreeModel {
            nodes,
            n_classes,
            params: TreeParams::default(),
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    fn leaf_for(&self, x: &FeatureVector) -> &[usize] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { class_counts, .. } => return class_counts,
                TreeNode::Internal { split, left, right } => {
                    i = if x.get(split.feature) > split.threshold {
                        *right
                    } else {
                        *left
                    };
                }
            }
        }
    }
}

pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Size-weighted Gini impurity of a two-way partition.
pub fn split_impurity(left: &[usize], right: &[usize]) -> f64 {
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = (nl + nr) as f64;
    (nl as f64 * gini(left) + nr as f64 * gini(right)) / n
}

struct Builder<'a> {
    data: &'a LabeledSet,
    params: &'a TreeParams,
    nodes: Vec<TreeNode>,
}

impl Builder<'_> {
    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.data.n_classes()];
        for &r in rows {
            counts[self.data.labels[r]] += 1;
        }
        counts
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let counts = self.class_counts(&rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split =
            if pure || depth >= self.params.max_depth || rows.len() < self.params.min_samples_split
            {
                None
            } else {
                best_split(self.data, &rows, self.params.thresholds)
            };
        let id = self.nodes.len();
        match split {
            None => {
                let label = argmax(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
                self.nodes.push(TreeNode::Leaf {
                    class_counts: counts,
                    label,
                });
            }
            Some((split, _)) => {
                // placeholder, patched once the children exist
                self.nodes.push(TreeNode::Internal {
                    split,
                    left: 0,
                    right: 0,
                });
                let (right_rows, left_rows): (Vec<usize>, Vec<usize>) = rows
                    .into_iter()
                    .partition(|&r| self.data.features[r].get(split.feature) > split.threshold);
                let left = self.grow(left_rows, depth + 1);
                let right = self.grow(right_rows, depth + 1);
                self.nodes[id] = TreeNode::Internal { split, left, right };
            }
        }
        id
    }
}

/// Lowest weighted-Gini split among `rows`, ties broken by lowest feature
/// then lowest threshold. `None` when no split leaves both sides non-empty.
pub fn best_split(data: &LabeledSet, rows: &[usize], mode: ThresholdMode) -> Option<(Split, f64)> {
    let k = data.n_classes();
    let mut total = vec![0; k];
    // feature -> (value, class) for every row where the feature is non-zero
    let mut by_feature: BTreeMap<usize, Vec<(f64, usize)>> = BTreeMap::new();
    for &r in rows {
        let y = data.labels[r];
        total[y] += 1;
        for &(j, v) in data.features[r].entries() {
            by_feature.entry(j).or_default().push((v, y));
        }
    }
    let n = rows.len();
    let mut best: Option<(Split, f64)> = None;
    let mut consider = |split: Split, right: &[usize]| {
        let left: Vec<usize> = total.iter().zip(right).map(|(t, r)| t - r).collect();
        let nr: usize = right.iter().sum();
        if nr == 0 || nr == n {
            return;
        }
        let impurity = split_impurity(&left, right);
        if best.as_ref().is_none_or(|(_, b)| impurity < *b) {
            best = Some((split, impurity));
        }
    };

    for (feature, values) in by_feature {
        let zeros = n - values.len();
        match mode {
            ThresholdMode::Presence => {
                let mut right = vec![0; k];
                for &(v, y) in &values {
                    if v > 0.5 {
                        right[y] += 1;
                    }
                }
                consider(
                    Split {
                        feature,
                        threshold: 0.5,
                    },
                    &right,
                );
            }
            ThresholdMode::AllMidpoints => {
                // distinct values, including the implicit zeros
                let mut distinct: Vec<f64> = values.iter().map(|&(v, _)| v).collect();
                if zeros > 0 {
                    distinct.push(0.0);
                }
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                for pair in distinct.windows(2) {
                    let threshold = (pair[0] + pair[1]) / 2.0;
                    let mut right = vec![0; k];
                    for &(v, y) in &values {
                        if v > threshold {
                            right[y] += 1;
                        }
                    }
                    consider(Split { feature, threshold }, &right);
                }
            }
        }
    }
    best
}

pub fn train_tree(
    data: &LabeledSet,
    params: &TreeParams,
) -> Result<DecisionTreeModel, ClassifierError> {
    if data.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    let mut builder = Builder {
        data,
        params,
        nodes: Vec::new(),
    };
    builder.grow((0..data.len()).collect(), 0);
    Ok(DecisionTreeModel {
        nodes: builder.nodes,
        n_classes: data.n_classes(),
        params: *params,
    })
}

/// Class proportions of the reached leaf.
pub fn predict_tree(model: &DecisionTreeModel, x: &FeatureVector) -> Prediction {
    let counts = model.leaf_for(x);
    let n: usize = counts.iter().sum();
    let scores = counts
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect();
    Prediction::from_scores(scores)
}
