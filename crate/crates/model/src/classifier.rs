//! Multinomial logistic-regression classifier trained by deterministic
//! gradient descent.
//!
//! The model is a single linear layer with a bias column: `weights` is a
//! `K x (F + 1)` matrix whose last column multiplies a constant 1. The
//! objective is mean cross-entropy plus an L2 penalty on the non-bias
//! weights. Everything is deterministic: weights start at zero and the
//! mini-batch order is drawn from a seeded generator, so retraining with
//! the same inputs reproduces the same parameters bit for bit.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use skelbench_core::rng::SplitMix64;

use crate::error::{ModelError, Result};

/// Training hyperparameters. `batch_size = 0` means full-batch descent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Samples per gradient step; 0 (or anything >= the training-set
    /// size) runs full-batch descent.
    #[serde(default)]
    pub batch_size: usize,
    #[serde(default)]
    pub l2_penalty: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.5,
            epochs: 300,
            batch_size: 0,
            l2_penalty: 1e-4,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.l2_penalty.is_finite() && self.l2_penalty >= 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "l2_penalty must be non-negative and finite, got {}",
                self.l2_penalty
            )));
        }
        Ok(())
    }
}

/// A trained (or zero-initialized) linear softmax classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    pub num_classes: usize,
    pub feature_dim: usize,
    /// `num_classes x (feature_dim + 1)`; the last column is the bias.
    pub weights: Array2<f64>,
}

impl ClassifierModel {
    pub fn zeros(num_classes: usize, feature_dim: usize) -> Result<ClassifierModel> {
        if num_classes < 2 {
            return Err(ModelError::InvalidParameter(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        if feature_dim == 0 {
            return Err(ModelError::InvalidParameter(
                "feature_dim must be positive".into(),
            ));
        }
        Ok(ClassifierModel {
            num_classes,
            feature_dim,
            weights: Array2::zeros((num_classes, feature_dim + 1)),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2
            || self.feature_dim == 0
            || self.weights.dim() != (self.num_classes, self.feature_dim + 1)
        {
            return Err(ModelError::Consistency(format!(
                "weight matrix {:?} does not match {} classes x {} features + bias",
                self.weights.dim(),
                self.num_classes,
                self.feature_dim
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(ModelError::Consistency(
                "weight matrix contains non-finite entries".into(),
            ));
        }
        Ok(())
    }

    fn logits(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_classes);
        for k in 0..self.num_classes {
            let row = self.weights.row(k);
            let mut z = row[self.feature_dim]; // bias
            for (w, v) in row.iter().take(self.feature_dim).zip(x) {
                z += w * v;
            }
            out.push(z);
        }
        out
    }

    /// Class probabilities via a max-shifted softmax. The result sums to
    /// one up to round-off (well within 1e-9).
    pub fn predict_probs(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_dim {
            return Err(ModelError::Consistency(format!(
                "model expects {} features, got {}",
                self.feature_dim,
                x.len()
            )));
        }
        let logits = self.logits(x);
        Ok(softmax(&logits))
    }

    /// Predicted label (smallest index on ties) plus the probabilities.
    pub fn predict(&self, x: &[f64]) -> Result<(u32, Vec<f64>)> {
        let probs = self.predict_probs(x)?;
        let mut best = 0usize;
        for (k, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = k;
            }
        }
        Ok((best as u32, probs))
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}

/// Exact accuracy as a count ratio; the float is derived, never stored as
/// the source of truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
}

impl Accuracy {
    pub fn fraction(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

impl std::fmt::Display for Accuracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} ({:.4})", self.correct, self.total, self.fraction())
    }
}

/// Training output: the model plus the full-data loss trace,
/// `losses[0]` before any update and one entry per epoch after it.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub model: ClassifierModel,
    pub losses: Vec<f64>,
    pub config: TrainConfig,
}

impl TrainReport {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("loss trace is never empty")
    }
}

fn check_training_inputs(
    features: &[Vec<f64>],
    labels: &[u32],
    num_classes: usize,
) -> Result<usize> {
    if features.is_empty() {
        return Err(ModelError::Training("training set is empty".into()));
    }
    if features.len() != labels.len() {
        return Err(ModelError::Consistency(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let dim = features[0].len();
    if dim == 0 {
        return Err(ModelError::Training("feature rows are empty".into()));
    }
    for (i, row) in features.iter().enumerate() {
        if row.len() != dim {
            return Err(ModelError::Consistency(format!(
                "feature row {i} has length {}, expected {dim}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Training(format!(
                "feature row {i} contains a non-finite value"
            )));
        }
    }
    for (i, &y) in labels.iter().enumerate() {
        if y as usize >= num_classes {
            return Err(ModelError::Training(format!(
                "label {y} at row {i} is outside 0..{num_classes}"
            )));
        }
    }
    let first = labels[0];
    if labels.iter().all(|&y| y == first) {
        return Err(ModelError::Training(
            "training set contains a single class; nothing to separate".into(),
        ));
    }
    Ok(dim)
}

/// Mean cross-entropy over the rows plus the L2 penalty on non-bias
/// weights.
fn full_loss(weights: &Array2<f64>, xb: &Array2<f64>, labels: &[u32], l2: f64) -> f64 {
    let n = xb.nrows();
    let mut ce = 0.0;
    let logits = xb.dot(&weights.t()); // n x K
    for (i, &y) in labels.iter().enumerate() {
        let row = logits.row(i);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        ce += lse - row[y as usize];
    }
    ce /= n as f64;
    if l2 > 0.0 {
        let f = weights.ncols() - 1;
        let mut sq = 0.0;
        for row in weights.rows() {
            for w in row.iter().take(f) {
                sq += w * w;
            }
        }
        ce += 0.5 * l2 * sq;
    }
    ce
}

/// Gradient of `full_loss` measured on the given subset of rows: mean
/// cross-entropy gradient over the batch plus the L2 term.
fn batch_gradient(
    weights: &Array2<f64>,
    xb: &Array2<f64>,
    labels: &[u32],
    batch: &[usize],
    l2: f64,
) -> Array2<f64> {
    let (k, fp1) = weights.dim();
    let mut grad = Array2::<f64>::zeros((k, fp1));
    let inv = 1.0 / batch.len() as f64;
    for &i in batch {
        let x = xb.row(i);
        let mut logits = Array1::<f64>::zeros(k);
        for (c, l) in logits.iter_mut().enumerate() {
            *l = weights.row(c).dot(&x);
        }
        let probs = softmax(logits.as_slice().expect("contiguous"));
        let y = labels[i] as usize;
        for (c, p) in probs.iter().enumerate() {
            let delta = inv * (p - if c == y { 1.0 } else { 0.0 });
            let mut grow = grad.row_mut(c);
            for (g, v) in grow.iter_mut().zip(x.iter()) {
                *g += delta * v;
            }
        }
    }
    if l2 > 0.0 {
        for c in 0..k {
            for f in 0..fp1 - 1 {
                grad[[c, f]] += l2 * weights[[c, f]];
            }
        }
    }
    grad
}

/// Appends the constant bias input to every row.
fn augment(features: &[Vec<f64>]) -> Array2<f64> {
    let n = features.len();
    let f = features[0].len();
    let mut xb = Array2::<f64>::zeros((n, f + 1));
    for (i, row) in features.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            xb[[i, j]] = *v;
        }
        xb[[i, f]] = 1.0;
    }
    xb
}

/// Trains a softmax classifier on standardized feature rows.
///
/// Weights start at zero, so a run with `epochs = 0` returns the uniform
/// predictor and a loss trace containing exactly `ln num_classes`. With
/// full-batch descent the loss trace is non-increasing for any sane
/// learning rate; a non-finite loss aborts with an error naming the
/// epoch rather than returning poisoned weights.
pub fn train_classifier(
    features: &[Vec<f64>],
    labels: &[u32],
    num_classes: usize,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if num_classes < 2 {
        return Err(ModelError::InvalidParameter(format!(
            "need at least 2 classes, got {num_classes}"
        )));
    }
    let dim = check_training_inputs(features, labels, num_classes)?;
    let n = features.len();
    let xb = augment(features);
    let mut weights = Array2::<f64>::zeros((num_classes, dim + 1));
    let mut losses = Vec::with_capacity(config.epochs + 1);
    losses.push(full_loss(&weights, &xb, labels, config.l2_penalty));

    let full_batch: Vec<usize> = (0..n).collect();
    let minibatch = config.batch_size > 0 && config.batch_size < n;
    let mut rng = SplitMix64::new(config.seed);

    for epoch in 0..config.epochs {
        if minibatch {
            let order = rng.sample_distinct(n, n);
            for chunk in order.chunks(config.batch_size) {
                let grad = batch_gradient(&weights, &xb, labels, chunk, config.l2_penalty);
                weights.scaled_add(-config.learning_rate, &grad);
            }
        } else {
            let grad = batch_gradient(&weights, &xb, labels, &full_batch, config.l2_penalty);
            weights.scaled_add(-config.learning_rate, &grad);
        }
        let loss = full_loss(&weights, &xb, labels, config.l2_penalty);
        if !loss.is_finite() {
            return Err(ModelError::Numeric {
                epoch,
                msg: format!("loss became {loss}; lower the learning rate"),
            });
        }
        losses.push(loss);
    }

    Ok(TrainReport {
        model: ClassifierModel {
            num_classes,
            feature_dim: dim,
            weights,
        },
        losses,
        config: config.clone(),
    })
}

/// Counts exact-match predictions over a labeled feature set.
pub fn evaluate_accuracy(
    model: &ClassifierModel,
    features: &[Vec<f64>],
    labels: &[u32],
) -> Result<Accuracy> {
    if features.is_empty() {
        return Err(ModelError::InvalidParameter(
            "cannot evaluate accuracy on an empty set".into(),
        ));
    }
    if features.len() != labels.len() {
        return Err(ModelError::Consistency(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let mut correct = 0;
    for (row, &y) in features.iter().zip(labels) {
        let (pred, _) = model.predict(row)?;
        if pred == y {
            correct += 1;
        }
    }
    Ok(Accuracy {
        correct,
        total: labels.len(),
    })
}

/// Exposed for the gradient checker, which needs both pieces separately.
pub(crate) fn loss_on(weights: &Array2<f64>, xb: &Array2<f64>, labels: &[u32], l2: f64) -> f64 {
    full_loss(weights, xb, labels, l2)
}

pub(crate) fn gradient_on(
    weights: &Array2<f64>,
    xb: &Array2<f64>,
    labels: &[u32],
    l2: f64,
) -> Array2<f64> {
    let all: Vec<usize> = (0..xb.nrows()).collect();
    batch_gradient(weights, xb, labels, &all, l2)
}

pub(crate) fn augment_rows(features: &[Vec<f64>]) -> Array2<f64> {
    augment(features)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two well-separated 2-D blobs, four points each.
    fn toy_two_class() -> (Vec<Vec<f64>>, Vec<u32>) {
        let features = vec![
            vec![-2.0, -1.9],
            vec![-2.1, -2.0],
            vec![-1.9, -2.2],
            vec![-2.2, -1.8],
            vec![2.0, 2.1],
            vec![2.1, 1.9],
            vec![1.9, 2.2],
            vec![2.2, 1.8],
        ];
        let labels = vec![0, 0, 0, 0, 1, 1, 1, 1];
        (features, labels)
    }

    #[test]
    fn separable_toy_reaches_perfect_accuracy() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            learning_rate: 0.5,
            epochs: 200,
            batch_size: 0,
            l2_penalty: 0.0,
            seed: 1,
        };
        let report = train_classifier(&x, &y, 2, &config).unwrap();
        let acc = evaluate_accuracy(&report.model, &x, &y).unwrap();
        assert_eq!(acc, Accuracy { correct: 8, total: 8 });
        assert_eq!(acc.fraction(), 1.0);
    }

    #[test]
    fn zero_epochs_gives_uniform_predictor_and_ln_k_loss() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        for k in [2usize, 3, 5] {
            let mut labels = y.clone();
            labels[7] = (k - 1) as u32; // make every class range valid
            let report = train_classifier(&x, &labels, k, &config).unwrap();
            assert_eq!(report.losses.len(), 1);
            let expected = (k as f64).ln();
            assert!(
                (report.final_loss() - expected).abs() < 1e-12,
                "loss {} vs ln {k} = {expected}",
                report.final_loss()
            );
            let (pred, probs) = report.model.predict(&x[0]).unwrap();
            assert_eq!(pred, 0, "uniform ties resolve to the smallest index");
            for p in &probs {
                assert!((p - 1.0 / k as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (x, y) = toy_two_class();
        let report = train_classifier(&x, &y, 2, &TrainConfig::default()).unwrap();
        for row in &x {
            let probs = report.model.predict_probs(row).unwrap();
            let sum: f64 = probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "probabilities sum to {sum}");
            assert!(probs.iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn duplicated_training_set_trains_identical_weights() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            learning_rate: 0.3,
            epochs: 50,
            batch_size: 0,
            l2_penalty: 1e-3,
            seed: 9,
        };
        let once = train_classifier(&x, &y, 2, &config).unwrap();
        let mut x2 = x.clone();
        x2.extend(x.iter().cloned());
        let mut y2 = y.clone();
        y2.extend(y.iter().cloned());
        let twice = train_classifier(&x2, &y2, 2, &config).unwrap();
        // Batch-mean normalization makes the duplicate set produce the
        // same gradient in exact arithmetic; summation order differs, so
        // allow round-off. A sum-normalized gradient would instead double
        // the step size and diverge far beyond this tolerance.
        let max_diff = once
            .model
            .weights
            .iter()
            .zip(twice.model.weights.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-12, "weights differ by {max_diff:e}");
    }

    #[test]
    fn full_batch_loss_is_non_increasing() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            learning_rate: 0.5,
            epochs: 120,
            batch_size: 0,
            l2_penalty: 1e-4,
            seed: 2,
        };
        let report = train_classifier(&x, &y, 2, &config).unwrap();
        for pair in report.losses.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "loss increased: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn training_is_deterministic_for_fixed_seed() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            learning_rate: 0.2,
            epochs: 40,
            batch_size: 3,
            l2_penalty: 1e-4,
            seed: 77,
        };
        let a = train_classifier(&x, &y, 2, &config).unwrap();
        let b = train_classifier(&x, &y, 2, &config).unwrap();
        assert_eq!(a.model.weights, b.model.weights);
        assert_eq!(a.losses, b.losses);

        let other = TrainConfig { seed: 78, ..config };
        let c = train_classifier(&x, &y, 2, &other).unwrap();
        assert_ne!(
            a.model.weights, c.model.weights,
            "mini-batch order must depend on the seed"
        );
    }

    #[test]
    fn minibatch_also_separates_toy_data() {
        let (x, y) = toy_two_class();
        let config = TrainConfig {
            learning_rate: 0.3,
            epochs: 100,
            batch_size: 2,
            l2_penalty: 0.0,
            seed: 5,
        };
        let report = train_classifier(&x, &y, 2, &config).unwrap();
        let acc = evaluate_accuracy(&report.model, &x, &y).unwrap();
        assert_eq!(acc.fraction(), 1.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (x, y) = toy_two_class();
        let config = TrainConfig::default();
        // Single-class set.
        let ones = vec![1u32; x.len()];
        assert!(train_classifier(&x, &ones, 2, &config).is_err());
        // Label out of range.
        let mut bad = y.clone();
        bad[0] = 2;
        assert!(train_classifier(&x, &bad, 2, &config).is_err());
        // Ragged rows.
        let mut ragged = x.clone();
        ragged[3] = vec![1.0];
        assert!(train_classifier(&ragged, &y, 2, &config).is_err());
        // Non-finite feature.
        let mut nan = x.clone();
        nan[0][0] = f64::NAN;
        assert!(train_classifier(&nan, &y, 2, &config).is_err());
        // Count mismatch.
        assert!(train_classifier(&x, &y[..7], 2, &config).is_err());
        // Empty evaluation.
        let model = ClassifierModel::zeros(2, 2).unwrap();
        assert!(evaluate_accuracy(&model, &[], &[]).is_err());
    }

    #[test]
    fn divergence_reports_the_epoch() {
        // An absurd learning rate on spread-out data overflows quickly.
        let x = vec![
            vec![1e3, -1e3],
            vec![-1e3, 1e3],
            vec![2e3, -2e3],
            vec![-2e3, 2e3],
        ];
        let y = vec![0, 1, 0, 1];
        let config = TrainConfig {
            learning_rate: 1e12,
            epochs: 50,
            batch_size: 0,
            l2_penalty: 1e6,
            seed: 3,
        };
        let err = train_classifier(&x, &y, 2, &config).unwrap_err();
        match err {
            ModelError::Numeric { .. } => {}
            other => panic!("expected a numeric error, got {other}"),
        }
    }

    #[test]
    fn accuracy_is_permutation_invariant() {
        let (x, y) = toy_two_class();
        let report = train_classifier(&x, &y, 2, &TrainConfig::default()).unwrap();
        let base = evaluate_accuracy(&report.model, &x, &y).unwrap();
        let perm = [5usize, 2, 7, 0, 4, 1, 3, 6];
        let xp: Vec<Vec<f64>> = perm.iter().map(|&i| x[i].clone()).collect();
        let yp: Vec<u32> = perm.iter().map(|&i| y[i]).collect();
        let shuffled = evaluate_accuracy(&report.model, &xp, &yp).unwrap();
        assert_eq!(base, shuffled);
    }

    #[test]
    fn argmax_prefers_smallest_index_on_ties() {
        let mut model = ClassifierModel::zeros(3, 2).unwrap();
        // Classes 1 and 2 tie and beat class 0.
        model.weights[[1, 2]] = 1.0;
        model.weights[[2, 2]] = 1.0;
        let (pred, _) = model.predict(&[0.0, 0.0]).unwrap();
        assert_eq!(pred, 1);
    }
}
