//! Piecewise-linear paths in `R^d`.
//!
//! A path is an ordered list of points; consecutive points are joined by
//! straight segments. All signature machinery in this crate consumes this
//! representation — a skeletal sequence becomes a path by flattening each
//! frame to one point.

use crate::error::{Result, SigError};

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl Path {
    /// Builds a path from row points, validating shape and finiteness.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(SigError::InvalidPath(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(SigError::InvalidPath("points must have dimension >= 1".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(SigError::InvalidPath(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if !p.iter().all(|c| c.is_finite()) {
                return Err(SigError::InvalidPath(format!("point {i} is not finite")));
            }
        }
        Ok(Path { points, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn start(&self) -> &[f64] {
        &self.points[0]
    }

    pub fn end(&self) -> &[f64] {
        self.points.last().unwrap()
    }

    /// Segment increments `x_{i+1} - x_i`.
    pub fn increments(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.points
            .windows(2)
            .map(|w| w[0].iter().zip(&w[1]).map(|(a, b)| b - a).collect())
    }

    /// Sub-path over point indices `lo..=hi`.
    pub fn slice(&self, lo: usize, hi: usize) -> Result<Path> {
        if lo >= hi || hi >= self.points.len() {
            return Err(SigError::InvalidPath(format!(
                "slice {lo}..={hi} invalid for {} points",
                self.points.len()
            )));
        }
        Ok(Path {
            points: self.points[lo..=hi].to_vec(),
            dim: self.dim,
        })
    }

    /// The same path traversed backwards.
    pub fn reverse(&self) -> Path {
        let mut points = self.points.clone();
        points.reverse();
        Path {
            points,
            dim: self.dim,
        }
    }

    /// Joins two paths where `self` ends at `other`'s start (the shared
    /// point is kept once).
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.dim != other.dim {
            return Err(SigError::ShapeMismatch(format!(
                "concat: dim {} vs {}",
                self.dim, other.dim
            )));
        }
        if self.end() != other.start() {
            return Err(SigError::InvalidPath(
                "concat: first path must end where the second begins".into(),
            ));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Ok(Path {
            points,
            dim: self.dim,
        })
    }

    /// Inserts the midpoint of every segment (a collinear refinement: the
    /// traced curve is geometrically unchanged).
    pub fn refine_midpoints(&self) -> Path {
        let mut points = Vec::with_capacity(self.points.len() * 2 - 1);
        for w in self.points.windows(2) {
            points.push(w[0].clone());
            points.push(
                w[0].iter()
                    .zip(&w[1])
                    .map(|(a, b)| a + 0.5 * (b - a))
                    .collect(),
            );
        }
        points.push(self.points.last().unwrap().clone());
        Path {
            points,
            dim: self.dim,
        }
    }

    /// Appends a normalized time channel `t / (N-1)` to every point,
    /// raising the dimension to `d + 1`. Distinguishes paths that trace
    /// the same curve at different speeds and breaks the tree-like
    /// cancellation of out-and-back motions.
    pub fn with_time_channel(&self) -> Path {
        let n1 = (self.points.len() - 1) as f64;
        let points = self
            .points
            .iter()
            .enumerate()
            .map(|(t, p)| {
                let mut q = p.clone();
                q.push(t as f64 / n1);
                q
            })
            .collect();
        Path {
            points,
            dim: self.dim + 1,
        }
    }

    /// Evaluates the piecewise-linear interpolation at parameter
    /// `u in [0, 1]` (uniform speed across segments).
    pub fn eval(&self, u: f64) -> Vec<f64> {
        let n1 = (self.points.len() - 1) as f64;
        let pos = u.clamp(0.0, 1.0) * n1;
        let i0 = (pos.floor() as usize).min(self.points.len() - 2);
        let alpha = pos - i0 as f64;
        self.points[i0]
            .iter()
            .zip(&self.points[i0 + 1])
            .map(|(a, b)| a + alpha * (b - a))
            .collect()
    }
}
