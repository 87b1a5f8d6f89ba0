//! Brute-force signature oracle.
//!
//! Computes iterated integrals directly by nested left-Riemann sums on a
//! fine uniform parameter grid:
//!
//! ```text
//! S_k(t_{j+1}) = S_k(t_j) + S_{k-1}(t_j) (x) dx_j,    S_0 = 1
//! ```
//!
//! This first-order scheme shares no code with the algebraic route
//! (segment exponentials folded by Chen's identity), converges to it at
//! rate `O(1/steps)`, and exists purely as an independent cross-check for
//! tests. Never use it for real feature extraction — it is slow *and*
//! approximate.

use crate::error::{Result, SigError};
use crate::path::Path;
use crate::tensor::TruncatedSignature;

/// Euler approximation of the signature on `steps` uniform sub-intervals.
pub fn brute_force_signature(path: &Path, m: usize, steps: usize) -> Result<TruncatedSignature> {
    if m < 1 {
        return Err(SigError::InvalidParameter("depth m must be >= 1".into()));
    }
    if steps < path.len() - 1 {
        return Err(SigError::InvalidParameter(format!(
            "steps ({steps}) must be at least the segment count ({})",
            path.len() - 1
        )));
    }
    let d = path.dim();
    let mut levels: Vec<Vec<f64>> = (1..=m).map(|k| vec![0.0; d.pow(k as u32)]).collect();
    let mut prev = path.eval(0.0);
    for j in 1..=steps {
        let here = path.eval(j as f64 / steps as f64);
        let dx: Vec<f64> = here.iter().zip(&prev).map(|(a, b)| a - b).collect();
        // Update top level first so each S_{k-1} read is the pre-step value.
        for k in (2..=m).rev() {
            let (lower, upper) = levels.split_at_mut(k - 1);
            let lower = &lower[k - 2];
            let upper = &mut upper[0];
            for (i, &li) in lower.iter().enumerate() {
                if li == 0.0 {
                    continue;
                }
                for (c, &dxc) in dx.iter().enumerate() {
                    upper[i * d + c] += li * dxc;
                }
            }
        }
        for (s, &dxc) in levels[0].iter_mut().zip(&dx) {
            *s += dxc;
        }
        prev = here;
    }
    Ok(TruncatedSignature::from_levels(d, m, levels))
}

/// Largest entry-wise deviation, normalized by the reference magnitude:
/// `max |a - b| / max(1, max_abs(reference))`.
pub fn signature_deviation(got: &TruncatedSignature, reference: &TruncatedSignature) -> f64 {
    let scale = reference.max_abs().max(1.0);
    let mut worst = 0.0f64;
    for k in 1..=reference.depth() {
        for (a, b) in got.level(k).iter().zip(reference.level(k)) {
            worst = worst.max((a - b).abs());
        }
    }
    worst / scale
}
