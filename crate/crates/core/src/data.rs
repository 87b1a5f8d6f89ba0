//! Skeletal time-series data model.
//!
//! A sequence is an ordered list of frames, each holding the same bodies
//! with the same number of joints; every joint is a 3-D position in meters.
//! Frame times are implicit: frame `t` of a sequence captured at `fps`
//! frames per second occurred at `t / fps` seconds. Degradation and
//! pre-processing operate on whole frames, never on individual joints, so
//! validation enforces a fully rectangular layout up front and the rest of
//! the workspace can index without re-checking.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// One joint position in camera coordinates, meters.
pub type Joint = [f64; 3];

/// Spatial channels per joint (x, y, z).
pub const CHANNELS: usize = 3;

/// Maximum bodies per frame. Capture rigs report at most two tracked
/// actors; anything beyond that is sensor noise and is rejected upstream.
pub const MAX_BODIES: usize = 2;

/// One captured frame: `bodies[b][j]` is joint `j` of body `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub bodies: Vec<Vec<Joint>>,
}

impl Frame {
    /// A frame with `num_bodies` bodies of `num_joints` joints, all zero.
    pub fn zeros(num_bodies: usize, num_joints: usize) -> Self {
        Frame {
            bodies: vec![vec![[0.0; 3]; num_joints]; num_bodies],
        }
    }

    pub fn num_bodies(&self) -> usize {
        self.bodies.len()
    }

    /// Flattens to `bodies * joints * 3` coordinates, body-major.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for body in &self.bodies {
            for j in body {
                out.extend_from_slice(j);
            }
        }
        out
    }
}

/// A labeled skeletal sequence with capture-session metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSequence {
    /// Stable identifier (file stem for parsed data, generated name for
    /// synthetic data). Used to derive per-sample randomness, so it must
    /// be unique within a dataset.
    pub sample_id: String,
    /// Zero-based action class.
    pub label: u32,
    pub subject_id: u32,
    pub setup_id: u32,
    pub camera_id: u32,
    /// Nominal capture rate in frames per second.
    pub fps: f64,
    pub frames: Vec<Frame>,
}

impl SkeletonSequence {
    /// Validates the rectangular-layout and finiteness contract.
    ///
    /// Rules: at least two frames (a sequence is a path, and every operator
    /// here needs distinct first and last anchors); positive finite fps;
    /// every frame has the same body count in `1..=MAX_BODIES`; every body
    /// has the same positive joint count; every coordinate is finite.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| {
            Err(CoreError::InvalidSequence {
                id: self.sample_id.clone(),
                msg,
            })
        };
        if self.frames.len() < 2 {
            return fail(format!("need at least 2 frames, got {}", self.frames.len()));
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return fail(format!("fps must be positive and finite, got {}", self.fps));
        }
        let nb = self.frames[0].bodies.len();
        if nb == 0 || nb > MAX_BODIES {
            return fail(format!("body count must be 1..={MAX_BODIES}, got {nb}"));
        }
        let nj = self.frames[0].bodies[0].len();
        if nj == 0 {
            return fail("body 0 of frame 0 has no joints".into());
        }
        for (t, frame) in self.frames.iter().enumerate() {
            if frame.bodies.len() != nb {
                return fail(format!(
                    "frame {t} has {} bodies, expected {nb}",
                    frame.bodies.len()
                ));
            }
            for (b, body) in frame.bodies.iter().enumerate() {
                if body.len() != nj {
                    return fail(format!(
                        "frame {t} body {b} has {} joints, expected {nj}",
                        body.len()
                    ));
                }
                for (j, joint) in body.iter().enumerate() {
                    if !joint.iter().all(|c| c.is_finite()) {
                        return fail(format!("frame {t} body {b} joint {j} is not finite"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }

    pub fn num_bodies(&self) -> usize {
        self.frames[0].bodies.len()
    }

    /// Joints per body.
    pub fn num_joints(&self) -> usize {
        self.frames[0].bodies[0].len()
    }

    /// Coordinates per frame when flattened: `bodies * joints * 3`. This is
    /// the path dimension d seen by feature extractors.
    pub fn frame_dim(&self) -> usize {
        self.num_bodies() * self.num_joints() * CHANNELS
    }

    /// Duration in seconds spanned by the frame times, `(T - 1) / fps`.
    pub fn duration_secs(&self) -> f64 {
        (self.frames.len() - 1) as f64 / self.fps
    }

    /// The sequence as a `T x frame_dim` row-major matrix of coordinates.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        self.frames.iter().map(Frame::flatten).collect()
    }

    /// Replaces the frames, keeping all metadata. The caller is responsible
    /// for upholding the layout invariants of the replacement frames.
    pub fn with_frames(&self, frames: Vec<Frame>) -> SkeletonSequence {
        SkeletonSequence {
            frames,
            ..self.clone()
        }
    }
}

#[cfg(test)]
pub(crate) fn test_sequence(id: &str, frames: usize) -> SkeletonSequence {
    let joint = |v: f64| [v, v + 0.5, v - 0.5];
    SkeletonSequence {
        sample_id: id.into(),
        label: 3,
        subject_id: 1,
        setup_id: 1,
        camera_id: 1,
        fps: 30.0,
        frames: (0..frames)
            .map(|t| Frame {
                bodies: vec![vec![joint(t as f64), joint(t as f64 + 10.0)]],
            })
            .collect(),
    }
}
