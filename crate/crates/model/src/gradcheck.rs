//! Numerical gradient verification via central differences.
//!
//! This is the tripwire against silently wrong training: it compares the
//! analytic gradient of the training loss against a two-sided finite
//! difference at every weight entry and reports the worst relative
//! discrepancy.

use crate::classifier::{augment_rows, gradient_on, loss_on, ClassifierModel};
use crate::error::{ModelError, Result};

pub const GRADCHECK_EPS_MIN: f64 = 1e-7;
pub const GRADCHECK_EPS_MAX: f64 = 1e-4;

/// Maximum over all weight entries of
/// `|g_analytic - g_numeric| / max(1, |g_analytic|, |g_numeric|)`,
/// where the numeric gradient is the central difference
/// `(L(w + eps) - L(w - eps)) / (2 eps)` of the full training loss
/// (cross-entropy plus L2) on the given batch.
///
/// `epsilon` must lie in `[1e-7, 1e-4]`: larger steps are dominated by
/// curvature, smaller ones by floating-point cancellation.
pub fn gradient_check(
    model: &ClassifierModel,
    features: &[Vec<f64>],
    labels: &[u32],
    l2_penalty: f64,
    epsilon: f64,
) -> Result<f64> {
    model.validate()?;
    if !(GRADCHECK_EPS_MIN..=GRADCHECK_EPS_MAX).contains(&epsilon) {
        return Err(ModelError::InvalidParameter(format!(
            "epsilon must be in [{GRADCHECK_EPS_MIN:e}, {GRADCHECK_EPS_MAX:e}], got {epsilon:e}"
        )));
    }
    if features.is_empty() || features.len() != labels.len() {
        return Err(ModelError::Consistency(format!(
            "need a non-empty batch with matching labels, got {} rows / {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.iter().any(|r| r.len() != model.feature_dim) {
        return Err(ModelError::Consistency(format!(
            "batch rows must have {} features",
            model.feature_dim
        )));
    }
    if labels.iter().any(|&y| y as usize >= model.num_classes) {
        return Err(ModelError::Consistency(
            "batch labels exceed the class count".into(),
        ));
    }

    let xb = augment_rows(features);
    let analytic = gradient_on(&model.weights, &xb, labels, l2_penalty);
    let mut weights = model.weights.clone();
    let mut worst: f64 = 0.0;
    for k in 0..weights.nrows() {
        for j in 0..weights.ncols() {
            let saved = weights[[k, j]];
            weights[[k, j]] = saved + epsilon;
            let up = loss_on(&weights, &xb, labels, l2_penalty);
            weights[[k, j]] = saved - epsilon;
            let down = loss_on(&weights, &xb, labels, l2_penalty);
            weights[[k, j]] = saved;
            let numeric = (up - down) / (2.0 * epsilon);
            let ga = analytic[[k, j]];
            let rel = (ga - numeric).abs() / 1.0_f64.max(ga.abs()).max(numeric.abs());
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}
