//! Length-normalization strategies applied before feature extraction.
//!
//! Downstream consumers want fixed-length inputs; how a variable-length
//! (possibly degraded) stream is fitted to that length turns out to drive
//! robustness. Three conventions are implemented:
//!
//! * **resample_linear** — stretch/squeeze to the target grid by linear
//!   interpolation along time (the "bilinear downsample to 64" recipe:
//!   time is the only continuous axis, channels are independent);
//! * **pad_replicate** — tile the whole clip until the target is filled;
//! * **pad_repeat_last** — freeze on the final frame.
//!
//! All three consume a plain frame list: a degraded stream is treated as a
//! compacted sequence indexed `0..len-1`, its original timestamps
//! discarded. That is exactly how a deletion-unaware consumer sees the
//! data, and it is the failure mode interpolation mitigation repairs.

use serde::{Deserialize, Serialize};

use crate::data::{Frame, SkeletonSequence};
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreprocKind {
    ResampleLinear,
    PadReplicate,
    PadRepeatLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocSpec {
    pub kind: PreprocKind,
    pub target_len: usize,
}

impl PreprocSpec {
    pub fn validate(&self) -> Result<()> {
        if self.target_len < 2 {
            return Err(CoreError::InvalidParameter(format!(
                "target_len must be >= 2, got {}",
                self.target_len
            )));
        }
        Ok(())
    }
}

fn check(seq: &SkeletonSequence, target_len: usize) -> Result<usize> {
    if target_len < 2 {
        return Err(CoreError::InvalidParameter(format!(
            "target_len must be >= 2, got {target_len}"
        )));
    }
    let t = seq.frames.len();
    if t < 2 {
        return Err(CoreError::InvalidSequence {
            id: seq.sample_id.clone(),
            msg: format!("pre-processing needs >= 2 frames, got {t}"),
        });
    }
    Ok(t)
}

fn lerp_frame(a: &Frame, b: &Frame, alpha: f64) -> Frame {
    Frame {
        bodies: a
            .bodies
            .iter()
            .zip(&b.bodies)
            .map(|(ba, bb)| {
                ba.iter()
                    .zip(bb)
                    .map(|(ja, jb)| {
                        [
                            ja[0] + alpha * (jb[0] - ja[0]),
                            ja[1] + alpha * (jb[1] - ja[1]),
                            ja[2] + alpha * (jb[2] - ja[2]),
                        ]
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Resamples to exactly `target_len` frames: output position `p` reads the
/// source at `t = p * (T-1) / (target_len-1)`, linearly interpolating
/// between the bracketing frames. Endpoints map exactly to the source
/// endpoints, and an integral grid (`target_len == T`) copies frames
/// bit-for-bit.
pub fn resample_linear(seq: &SkeletonSequence, target_len: usize) -> Result<SkeletonSequence> {
    let t = check(seq, target_len)?;
    let mut frames = Vec::with_capacity(target_len);
    for p in 0..target_len {
        // Exact integer product first, one correctly-rounded division after:
        // integral grid positions come out exact.
        let pos = (p * (t - 1)) as f64 / (target_len - 1) as f64;
        let i0 = pos.floor() as usize;
        let alpha = pos - i0 as f64;
        if alpha == 0.0 || i0 + 1 >= t {
            frames.push(seq.frames[i0.min(t - 1)].clone());
        } else {
            frames.push(lerp_frame(&seq.frames[i0], &seq.frames[i0 + 1], alpha));
        }
    }
    Ok(seq.with_frames(frames))
}

/// Tiles the whole clip (`f0..f_{T-1}, f0..f_{T-1}, ...`) truncated at
/// `target_len`. Requires `T <= target_len`.
pub fn pad_replicate(seq: &SkeletonSequence, target_len: usize) -> Result<SkeletonSequence> {
    let t = check(seq, target_len)?;
    if t > target_len {
        return Err(CoreError::InvalidParameter(format!(
            "pad_replicate: sequence length {t} exceeds target {target_len}"
        )));
    }
    let frames = (0..target_len).map(|i| seq.frames[i % t].clone()).collect();
    Ok(seq.with_frames(frames))
}

/// Copies the clip and repeats its final frame up to `target_len`.
/// Requires `T <= target_len`.
pub fn pad_repeat_last(seq: &SkeletonSequence, target_len: usize) -> Result<SkeletonSequence> {
    let t = check(seq, target_len)?;
    if t > target_len {
        return Err(CoreError::InvalidParameter(format!(
            "pad_repeat_last: sequence length {t} exceeds target {target_len}"
        )));
    }
    let frames = (0..target_len)
        .map(|i| seq.frames[i.min(t - 1)].clone())
        .collect();
    Ok(seq.with_frames(frames))
}

/// Applies whichever strategy the spec names.
pub fn apply_preproc(seq: &SkeletonSequence, spec: &PreprocSpec) -> Result<SkeletonSequence> {
    match spec.kind {
        PreprocKind::ResampleLinear => resample_linear(seq, spec.target_len),
        PreprocKind::PadReplicate => pad_replicate(seq, spec.target_len),
        PreprocKind::PadRepeatLast => pad_repeat_last(seq, spec.target_len),
    }
}
