//! Linear SVM trained by Pegasos-style primal subgradient descent.
//!
//! Each binary problem minimizes
//! `(lambda / 2) |w|^2 + mean_i max(0, 1 - y_i (w . x_i + b))` with
//! `lambda = 1 / c_param`. The bias is folded into `w` as a constant feature.
//! Every epoch takes one subgradient step over the whole training set with
//! step size `1 / (lambda t)` followed by projection onto the ball of radius
//! `1 / sqrt(lambda)`. Because the loss is a mean, duplicating every training
//! example leaves the iterates unchanged.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifierError, FeatureVector, LabeledSet, Prediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub c_param: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c_param: 1.0,
            epochs: 50,
        }
    }
}

/// One weight vector (bias last) per binary problem: a single problem for two
/// classes (class 1 is the positive side), one-vs-rest otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    n_classes: usize,
    n_features: usize,
    weights: Vec<Vec<f64>>,
    pub c_param: f64,
    pub epochs: usize,
}

impl LinearSvmModel {
    pub fn from_weights(n_classes: usize, n_features: usize, weights: Vec<Vec<f64>>) -> Self {
        let problems = if n_classes == 2 { 1 } else { n_classes };
        assert_eq!(weights.len(), problems);
        assert!(weights.iter().all(|w| w.len() == n_features + 1));
        LinearSvmModel {
            n_classes,
            n_features,
            weights,
            c_param: 0.0,
            epochs: 0,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// `(term weights, bias)` of binary problem `problem`.
    pub fn problem(&self, problem: usize) -> (&[f64], f64) {
        let w = &self.weights[problem];
        (&w[..self.n_features], w[self.n_features])
    }

    fn margin(&self, problem: usize, x: &FeatureVector) -> f64 {
        let (w, b) = self.problem(problem);
        x.dot(w) + b
    }
}

fn train_binary(
    data: &LabeledSet,
    positive: usize,
    params: &SvmParams,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let d = data.n_features;
    let n = data.len() as f64;
    let lambda = 1.0 / params.c_param;
    let radius = 1.0 / lambda.sqrt();
    let targets: Vec<f64> = data
        .labels
        .iter()
        .map(|&l| if l == positive { 1.0 } else { -1.0 })
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut w = vec![0.0; d + 1];
    let mut step_sum = vec![0.0; d + 1];
    for t in 1..=params.epochs {
        order.shuffle(rng);
        step_sum.iter_mut().for_each(|v| *v = 0.0);
        for &i in &order {
            let x = &data.features[i];
            let y = targets[i];
            if y * (x.dot(&w[..d]) + w[d]) < 1.0 {
                for &(j, v) in x.entries() {
                    if j < d {
                        step_sum[j] += y * v;
                    }
                }
                step_sum[d] += y;
            }
        }
        let eta = 1.0 / (lambda * t as f64);
        let decay = 1.0 - eta * lambda;
        for (wj, sj) in w.iter_mut().zip(&step_sum) {
            *wj = decay * *wj + eta * sj / n;
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            let scale = radius / norm;
            w.iter_mut().for_each(|v| *v *= scale);
        }
    }
    w
}

pub fn train_svm(
    data: &LabeledSet,
    params: &SvmParams,
    seed: u64,
) -> Result<LinearSvmModel, ClassifierError> {
    if !(params.c_param > 0.0 && params.c_param.is_finite()) {
        return Err(ClassifierError::InvalidParameter(format!(
            "c must be positive, got {}",
            params.c_param
        )));
    }
    data.check_trainable()?;
    let k = data.n_classes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = if k == 2 {
        vec![train_binary(data, 1, params, &mut rng)]
    } else {
        (0..k)
            .map(|c| train_binary(data, c, params, &mut rng))
            .collect()
    };
    Ok(LinearSvmModel {
        n_classes: k,
        n_features: data.n_features,
        weights,
        c_param: params.c_param,
        epochs: params.epochs,
    })
}

/// Margin scores per class: `[-m, m]` for a binary model, one margin per
/// class for one-vs-rest.
pub fn predict_svm(model: &LinearSvmModel, x: &FeatureVector) -> Prediction {
    let scores = if model.n_classes == 2 {
        let m = model.margin(0, x);
        vec![-m, m]
    } else {
        (0..model.n_classes).map(|c| model.margin(c, x)).collect()
    };
    Prediction::from_scores(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: Vec<FeatureVector>, labels: Vec<usize>, n_features: usize) -> LabeledSet {
        let k = labels.iter().max().unwrap() + 1;
        LabeledSet::new(
            points,
            labels,
            (0..k).map(|c| c.to_string()).collect(),
            n_features,
        )
        .unwrap()
    }

    #[test]
    fn separates_two_points() {
        let data = set(
            vec![FeatureVector::binary([0]), FeatureVector::binary([1])],
            vec![0, 1],
            2,
        );
        let m = train_svm(&data, &SvmParams::default(), 7).unwrap();
        for (x, &y) in data.features.iter().zip(&data.labels) {
            assert_eq!(predict_svm(&m, x).label, y);
        }
    }

    #[test]
    fn duplicated_data_gives_same_weights() {
        let pts = vec![
            FeatureVector::new(vec![(0, 1.0), (2, 2.0)]),
            FeatureVector::new(vec![(1, 1.0)]),
            FeatureVector::new(vec![(0, 2.0)]),
            FeatureVector::new(vec![(1, 3.0), (2, 1.0)]),
        ];
        let labels = vec![0, 1, 0, 1];
        let once = train_svm(
            &set(pts.clone(), labels.clone(), 3),
            &SvmParams::default(),
            1,
        )
        .unwrap();
        let twice_pts: Vec<_> = pts.iter().chain(&pts).cloned().collect();
        let twice_labels: Vec<_> = labels.iter().chain(&labels).copied().collect();
        let twice = train_svm(&set(twice_pts, twice_labels, 3), &SvmParams::default(), 1).unwrap();
        for (a, b) in once.weights[0].iter().zip(&twice.weights[0]) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn mirrored_data_has_zero_bias() {
        let pos = [
            FeatureVector::new(vec![(0, 1.0), (1, 0.5)]),
            FeatureVector::new(vec![(0, 2.0), (1, -1.0)]),
            FeatureVector::new(vec![(1, 1.5)]),
        ];
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for p in &pos {
            pts.push(p.clone());
            labels.push(1);
            pts.push(FeatureVector::new(
                p.entries().iter().map(|&(c, v)| (c, -v)).collect(),
            ));
            labels.push(0);
        }
        let m = train_svm(&set(pts, labels, 2), &SvmParams::default(), 3).unwrap();
        assert!(m.problem(0).1.abs() < 1e-6, "bias {}", m.problem(0).1);
    }

    #[test]
    fn hand_computed_margin() {
        let m = LinearSvmModel::from_weights(2, 3, vec![vec![0.5, -1.0, 2.0, 0.25]]);
        let x = FeatureVector::new(vec![(0, 2.0), (1, 1.0), (2, 0.5)]);
        let p = predict_svm(&m, &x);
        // 0.5*2 - 1*1 + 2*0.5 + 0.25
        assert!((p.scores[1] - 1.25).abs() < 1e-12);
        assert_eq!(p.label, 1);
        let flipped = LinearSvmModel::from_weights(2, 3, vec![vec![-0.5, 1.0, -2.0, -0.25]]);
        assert_eq!(predict_svm(&flipped, &x).label, 0);
    }

    #[test]
    fn zero_model_predicts_class_zero() {
        let m = LinearSvmModel::from_weights(3, 2, vec![vec![0.0; 3]; 3]);
        assert_eq!(predict_svm(&m, &FeatureVector::binary([0, 1])).label, 0);
    }

    #[test]
    fn one_vs_rest_three_classes() {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for c in 0..3 {
            for _ in 0..4 {
                pts.push(FeatureVector::binary([c]));
                labels.push(c);
            }
        }
        let data = set(pts, labels, 3);
        let m = train_svm(
            &data,
            &SvmParams {
                c_param: 10.0,
                epochs: 100,
            },
            5,
        )
        .unwrap();
        for c in 0..3 {
            assert_eq!(predict_svm(&m, &FeatureVector::binary([c])).label, c);
        }
    }

    #[test]
    fn rejects_bad_c() {
        let data = set(
            vec![FeatureVector::binary([0]), FeatureVector::binary([1])],
            vec![0, 1],
            2,
        );
        assert!(train_svm(
            &data,
            &SvmParams {
                c_param: 0.0,
                epochs: 5
            },
            0
        )
        .is_err());
    }
}
