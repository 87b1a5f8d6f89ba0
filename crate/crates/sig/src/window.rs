//! Windowed log-signature features.
//!
//! A long path is summarized as a short sequence of local descriptors:
//! the point range is split into `w` contiguous windows that share their
//! boundary points (so the windows' signatures Chen-compose back to the
//! whole), and each window contributes one log-signature row. This shrinks
//! the time dimension to a fixed length while preserving local temporal
//! information.
//!
//! With `time_augment`, a normalized time coordinate `t/(N-1)` is appended
//! as an extra channel before windowing. Without it, features inherit the
//! signature's invariance to reparametrization — the property that makes
//! them insensitive to uniform frame deletion; with it, duration
//! information is restored for classifiers that want it.

use std::sync::Arc;

use crate::error::{Result, SigError};
use crate::logsig::log_signature_of_path;
use crate::lyndon::LyndonBasis;
use crate::path::Path;

/// Splits point indices `0..=n-1` into `w` contiguous windows sharing
/// boundary points: returns `w + 1` boundaries starting at 0 and ending at
/// `n - 1`. Segments are spread evenly, remainder to the left windows.
pub fn window_boundaries(n_points: usize, w: usize) -> Result<Vec<usize>> {
    if w < 1 {
        return Err(SigError::InvalidParameter("window count must be >= 1".into()));
    }
    if n_points < w + 1 {
        return Err(SigError::InvalidParameter(format!(
            "need at least {} points for {w} windows, got {n_points}",
            w + 1
        )));
    }
    let segments = n_points - 1;
    let base = segments / w;
    let rem = segments % w;
    let mut bounds = Vec::with_capacity(w + 1);
    let mut pos = 0;
    bounds.push(0);
    for i in 0..w {
        pos += base + usize::from(i < rem);
        bounds.push(pos);
    }
    Ok(bounds)
}

/// Per-window log-signature feature matrix, `w` rows of `logsig_dim`
/// coefficients. The basis dimension must equal the path dimension plus
/// one when `time_augment` is set.
pub fn windowed_log_signature(
    path: &Path,
    w: usize,
    time_augment: bool,
    basis: &Arc<LyndonBasis>,
) -> Result<Vec<Vec<f64>>> {
    let augmented;
    let path = if time_augment {
        augmented = path.with_time_channel();
        &augmented
    } else {
        path
    };
    if basis.d != path.dim() {
        return Err(SigError::ShapeMismatch(format!(
            "basis dimension {} vs path dimension {} (time_augment={time_augment})",
            basis.d,
            path.dim()
        )));
    }
    let bounds = window_boundaries(path.len(), w)?;
    let mut rows = Vec::with_capacity(w);
    for i in 0..w {
        let window = path.slice(bounds[i], bounds[i + 1])?;
        rows.push(log_signature_of_path(&window, basis)?.coefficients);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lyndon::logsig_dim;

    fn basis(d: usize, m: usize) -> Arc<LyndonBasis> {
        Arc::new(LyndonBasis::new(d, m).unwrap())
    }

    #[test]
    fn boundaries_spread_remainder_left() {
        // 10 segments over 4 windows: lengths 3,3,2,2.
        assert_eq!(window_boundaries(11, 4).unwrap(), vec![0, 3, 6, 8, 10]);
        // Exact division.
        assert_eq!(window_boundaries(9, 4).unwrap(), vec![0, 2, 4, 6, 8]);
        // One window spans everything.
        assert_eq!(window_boundaries(7, 1).unwrap(), vec![0, 6]);
        // Minimum points.
        assert_eq!(window_boundaries(5, 4).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(window_boundaries(4, 4).is_err());
        assert!(window_boundaries(10, 0).is_err());
    }

    #[test]
    fn constant_path_gives_zero_features() {
        let p = Path::new(vec![vec![0.4, -0.7]; 12]).unwrap();
        let rows = windowed_log_signature(&p, 3, false, &basis(2, 2)).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.len(), logsig_dim(2, 2));
            assert!(row.iter().all(|&v| v == 0.0), "{row:?}");
        }
    }

    #[test]
    fn single_window_equals_whole_path_logsig() {
        let p = Path::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.2],
            vec![0.4, 0.9],
            vec![-0.3, 0.5],
        ])
        .unwrap();
        let b = basis(2, 3);
        let rows = windowed_log_signature(&p, 1, false, &b).unwrap();
        let whole = crate::logsig::log_signature_of_path(&p, &b).unwrap();
        assert_eq!(rows.len(), 1);
        for (a, c) in rows[0].iter().zip(&whole.coefficients) {
            assert!((a - c).abs() < 1e-14);
        }
    }

    #[test]
    fn collinear_refinement_preserves_features() {
        // 9 points = 8 segments, divisible by w=4; midpoint refinement
        // gives 16 segments, still divisible, and the window boundaries
        // land on the same geometric points.
        let pts: Vec<Vec<f64>> = (0..9)
            .map(|i| {
                let t = i as f64;
                vec![(0.7 * t).sin(), (0.4 * t).cos(), 0.1 * t * t]
            })
            .collect();
        let p = Path::new(pts).unwrap();
        let refined = p.refine_midpoints();
        let b = basis(3, 2);
        let a = windowed_log_signature(&p, 4, false, &b).unwrap();
        let c = windowed_log_signature(&refined, 4, false, &b).unwrap();
        for (ra, rc) in a.iter().zip(&c) {
            for (x, y) in ra.iter().zip(rc) {
                assert!((x - y).abs() < 1e-10, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn time_augment_raises_dimension_and_breaks_invariance() {
        let pts: Vec<Vec<f64>> = (0..9)
            .map(|i| {
                let t = i as f64;
                vec![(0.9 * t).sin(), 0.2 * t]
            })
            .collect();
        let p = Path::new(pts).unwrap();
        let b3 = basis(3, 2);
        let rows = windowed_log_signature(&p, 4, true, &b3).unwrap();
        assert_eq!(rows[0].len(), logsig_dim(3, 2));
        // Wrong basis dimension is a shape error.
        let b2 = basis(2, 2);
        assert!(windowed_log_signature(&p, 4, true, &b2).is_err());
        assert!(windowed_log_signature(&p, 4, false, &b3).is_err());
        // With the time channel, an out-and-back path no longer vanishes.
        let back_forth = Path::new(vec![vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        let plain = windowed_log_signature(&back_forth, 1, false, &basis(1, 2)).unwrap();
        assert!(plain[0].iter().all(|&v| v == 0.0));
        let aug = windowed_log_signature(&back_forth, 1, true, &basis(2, 2)).unwrap();
        assert!(aug[0].iter().any(|&v| v.abs() > 1e-12));
    }

    #[test]
    fn too_few_points_is_an_error() {
        let p = Path::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert!(windowed_log_signature(&p, 3, false, &basis(1, 2)).is_err());
    }
}
