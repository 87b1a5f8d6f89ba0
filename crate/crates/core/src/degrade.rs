//! Temporal degradation operators and the interpolation mitigation.
//!
//! Three ways of deleting frames from a sequence, each parameterized so a
//! family of severities can be swept:
//!
//! * **uniform** — keep every n-th frame (a lower capture rate);
//! * **random** — drop a fraction of frames chosen uniformly at random
//!   (transmission loss);
//! * **block** — erase one contiguous run of frames (an occlusion or
//!   outage).
//!
//! The first and last frames are never deleted: they anchor interpolation,
//! so every degraded sequence can be reconstructed to full length. Frame
//! timestamps keep their original indices — a degraded sequence lives on a
//! non-uniform time base, and that irregularity (not just missing data) is
//! the experimental variable.
//!
//! Stochastic operators draw from the frozen generator seeded per sample
//! as `mix(master_seed, sample_id)`; masks are pure functions of
//! `(sample_id, spec)` and reproduce bit-identically across platforms.

use serde::{Deserialize, Serialize};

use crate::data::{Frame, SkeletonSequence};
use crate::error::{CoreError, Result};
use crate::rng::{sample_seed, SplitMix64};

/// Highest supported deletion fraction for the stochastic operators.
/// Beyond this the surviving interior is too sparse to be meaningful.
pub const MAX_RATE: f64 = 0.95;

/// A degradation to apply, with its own randomness root where relevant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegradationSpec {
    /// Keep every n-th frame (plus the final anchor). Seed-free.
    Uniform { n: usize },
    /// Drop `round(rate * T)` interior frames uniformly at random.
    Random { rate: f64, master_seed: u64 },
    /// Erase one contiguous block of `round(rate * T)` interior frames.
    Block { rate: f64, master_seed: u64 },
}

impl DegradationSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            DegradationSpec::Uniform { n } => {
                if *n < 1 {
                    return Err(CoreError::InvalidParameter(
                        "uniform stride n must be >= 1".into(),
                    ));
                }
            }
            DegradationSpec::Random { rate, .. } | DegradationSpec::Block { rate, .. } => {
                if !(rate.is_finite() && (0.0..=MAX_RATE).contains(rate)) {
                    return Err(CoreError::InvalidParameter(format!(
                        "rate must be in [0, {MAX_RATE}], got {rate}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Nominal fraction of deleted frames: `1 - 1/n` for uniform stride,
    /// the configured rate otherwise. The realized fraction of a concrete
    /// mask can differ slightly (anchors, rounding); see
    /// [`RetentionMask::realized_rate`].
    pub fn nominal_rate(&self) -> f64 {
        match self {
            DegradationSpec::Uniform { n } => 1.0 - 1.0 / (*n as f64),
            DegradationSpec::Random { rate, .. } | DegradationSpec::Block { rate, .. } => *rate,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DegradationSpec::Uniform { .. } => "uniform",
            DegradationSpec::Random { .. } => "random",
            DegradationSpec::Block { .. } => "block",
        }
    }
}

/// Equivalent capture rate of a uniform stride: `base_fps / n`.
pub fn fps_equivalent(n: usize, base_fps: f64) -> Result<f64> {
    if n < 1 {
        return Err(CoreError::InvalidParameter(
            "uniform stride n must be >= 1".into(),
        ));
    }
    if !(base_fps.is_finite() && base_fps > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "base_fps must be positive, got {base_fps}"
        )));
    }
    Ok(base_fps / n as f64)
}

/// Which original frame indices survived a degradation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetentionMask {
    pub original_length: usize,
    /// Strictly increasing; always contains 0 and `original_length - 1`.
    pub retained_indices: Vec<usize>,
}

impl RetentionMask {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CoreError::InvalidParameter(format!("mask: {msg}")));
        if self.original_length < 2 {
            return fail(format!("original_length must be >= 2, got {}", self.original_length));
        }
        if self.retained_indices.len() < 2 {
            return fail("needs at least 2 retained indices".into());
        }
        if self.retained_indices[0] != 0 {
            return fail("first anchor (index 0) missing".into());
        }
        if *self.retained_indices.last().unwrap() != self.original_length - 1 {
            return fail(format!("last anchor (index {}) missing", self.original_length - 1));
        }
        if !self.retained_indices.windows(2).all(|w| w[0] < w[1]) {
            return fail("indices must be strictly increasing".into());
        }
        Ok(())
    }

    pub fn num_retained(&self) -> usize {
        self.retained_indices.len()
    }

    /// Fraction of frames actually deleted: `1 - retained / T`.
    pub fn realized_rate(&self) -> f64 {
        1.0 - self.retained_indices.len() as f64 / self.original_length as f64
    }

    pub fn is_identity(&self) -> bool {
        self.retained_indices.len() == self.original_length
    }

    /// Maximal runs of missing indices, as `(start, length)` pairs.
    pub fn gaps(&self) -> Vec<(usize, usize)> {
        self.retained_indices
            .windows(2)
            .filter(|w| w[1] > w[0] + 1)
            .map(|w| (w[0] + 1, w[1] - w[0] - 1))
            .collect()
    }
}

/// A sequence after frame deletion: the retained frames in original order,
/// the mask describing what survived, and the untouched source.
#[derive(Debug, Clone, PartialEq)]
pub struct DegradedSequence {
    pub source: SkeletonSequence,
    pub mask: RetentionMask,
    pub frames: Vec<Frame>,
}

impl DegradedSequence {
    fn from_mask(source: SkeletonSequence, mask: RetentionMask) -> Result<Self> {
        mask.validate()?;
        if mask.original_length != source.frames.len() {
            return Err(CoreError::InvalidParameter(format!(
                "mask length {} does not match sequence length {}",
                mask.original_length,
                source.frames.len()
            )));
        }
        let frames = mask
            .retained_indices
            .iter()
            .map(|&i| source.frames[i].clone())
            .collect();
        Ok(DegradedSequence {
            source,
            mask,
            frames,
        })
    }

    /// The degraded stream as a standalone sequence: retained frames
    /// re-indexed 0..len-1 with original timestamps discarded. This is how
    /// a consumer that is unaware of the deletion sees the data.
    pub fn compacted(&self) -> SkeletonSequence {
        self.source.with_frames(self.frames.clone())
    }
}

fn check_input(seq: &SkeletonSequence) -> Result<usize> {
    let t = seq.frames.len();
    if t < 2 {
        return Err(CoreError::InvalidSequence {
            id: seq.sample_id.clone(),
            msg: format!("degradation needs >= 2 frames, got {t}"),
        });
    }
    Ok(t)
}

fn check_rate(r: f64) -> Result<()> {
    if !(r.is_finite() && (0.0..1.0).contains(&r)) {
        return Err(CoreError::InvalidParameter(format!(
            "rate must be in [0, 1), got {r}"
        )));
    }
    Ok(())
}

/// Number of frames to delete at rate `r`: round-half-away-from-zero of
/// `r * T`, capped so both anchors and the mask invariants survive.
fn drop_count(t: usize, r: f64) -> usize {
    ((r * t as f64).round() as usize).min(t - 2)
}

/// Keeps indices `{i : i mod n == 0}` plus the final frame.
pub fn uniform_subsample(seq: &SkeletonSequence, n: usize) -> Result<DegradedSequence> {
    let t = check_input(seq)?;
    if n < 1 {
        return Err(CoreError::InvalidParameter(
            "uniform stride n must be >= 1".into(),
        ));
    }
    let mut retained: Vec<usize> = (0..t).filter(|i| i % n == 0).collect();
    if *retained.last().unwrap() != t - 1 {
        retained.push(t - 1);
    }
    DegradedSequence::from_mask(
        seq.clone(),
        RetentionMask {
            original_length: t,
            retained_indices: retained,
        },
    )
}

/// Drops `round(r * T)` interior frames (indices `1..=T-2`) chosen
/// uniformly without replacement by the seeded generator.
pub fn random_subsample(seq: &SkeletonSequence, r: f64, master_seed: u64) -> Result<DegradedSequence> {
    let t = check_input(seq)?;
    check_rate(r)?;
    let k = drop_count(t, r);
    let mut rng = SplitMix64::new(sample_seed(master_seed, &seq.sample_id));
    let mut dropped = vec![false; t];
    // Interior frames are 1..=t-2: pool index p maps to frame p+1.
    for p in rng.sample_distinct(t - 2, k) {
        dropped[p + 1] = true;
    }
    let retained = (0..t).filter(|&i| !dropped[i]).collect();
    DegradedSequence::from_mask(
        seq.clone(),
        RetentionMask {
            original_length: t,
            retained_indices: retained,
        },
    )
}

/// Erases one contiguous block of `round(r * T)` frames starting at a
/// seeded position in `[1, T-1-L]`.
pub fn block_dropout(seq: &SkeletonSequence, r: f64, master_seed: u64) -> Result<DegradedSequence> {
    let t = check_input(seq)?;
    check_rate(r)?;
    let l = drop_count(t, r);
    let retained = if l == 0 {
        (0..t).collect()
    } else {
        let mut rng = SplitMix64::new(sample_seed(master_seed, &seq.sample_id));
        let start = 1 + rng.below((t - 1 - l) as u64) as usize;
        (0..t).filter(|&i| i < start || i >= start + l).collect()
    };
    DegradedSequence::from_mask(
        seq.clone(),
        RetentionMask {
            original_length: t,
            retained_indices: retained,
        },
    )
}

/// Applies whichever operator the spec names.
pub fn apply_degradation(seq: &SkeletonSequence, spec: &DegradationSpec) -> Result<DegradedSequence> {
    spec.validate()?;
    match spec {
        DegradationSpec::Uniform { n } => uniform_subsample(seq, *n),
        DegradationSpec::Random { rate, master_seed } => random_subsample(seq, *rate, *master_seed),
        DegradationSpec::Block { rate, master_seed } => block_dropout(seq, *rate, *master_seed),
    }
}

/// Reconstructs a full-length sequence from a degraded one by linear
/// interpolation: each missing frame between retained neighbors `a < b`
/// gets `x(j) = x(a) + (j-a)/(b-a) * (x(b) - x(a))` per joint per channel.
/// Retained frames are copied verbatim; metadata and fps are preserved.
pub fn interpolate_missing(deg: &DegradedSequence) -> SkeletonSequence {
    let t = deg.mask.original_length;
    let mut out: Vec<Option<Frame>> = vec![None; t];
    for (pos, &idx) in deg.mask.retained_indices.iter().enumerate() {
        out[idx] = Some(deg.frames[pos].clone());
    }
    for w in deg.mask.retained_indices.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a + 1 {
            continue;
        }
        let fa = out[a].clone().unwrap();
        let fb = out[b].clone().unwrap();
        for j in a + 1..b {
            let alpha = (j - a) as f64 / (b - a) as f64;
            let bodies = fa
                .bodies
                .iter()
                .zip(&fb.bodies)
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
                .collect();
            out[j] = Some(Frame { bodies });
        }
    }
    deg.source
        .with_frames(out.into_iter().map(Option::unwrap).collect())
}

/// Sidecar document recording a mask so the mitigation path can be run by
/// a separate process: the deletion pattern is assumed *known*, only the
/// frame contents are lost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSidecar {
    pub sample_id: String,
    pub original_length: usize,
    pub retained_indices: Vec<usize>,
    pub spec: DegradationSpec,
}

impl MaskSidecar {
    pub fn new(deg: &DegradedSequence, spec: &DegradationSpec) -> Self {
        MaskSidecar {
            sample_id: deg.source.sample_id.clone(),
            original_length: deg.mask.original_length,
            retained_indices: deg.mask.retained_indices.clone(),
            spec: spec.clone(),
        }
    }

    pub fn mask(&self) -> RetentionMask {
        RetentionMask {
            original_length: self.original_length,
            retained_indices: self.retained_indices.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_sequence;

    fn seq(t: usize) -> SkeletonSequence {
        test_sequence("deg-test", t)
    }

    #[test]
    fn uniform_stride_one_is_identity() {
        let d = uniform_subsample(&seq(7), 1).unwrap();
        assert!(d.mask.is_identity());
        assert_eq!(d.frames.len(), 7);
    }

    #[test]
    fn uniform_t10_n2_keeps_even_and_last() {
        let d = uniform_subsample(&seq(10), 2).unwrap();
        assert_eq!(d.mask.retained_indices, vec![0, 2, 4, 6, 8, 9]);
    }

    #[test]
    fn uniform_t30_n3_keeps_eleven() {
        let d = uniform_subsample(&seq(30), 3).unwrap();
        let expected: Vec<usize> = (0..30).step_by(3).chain([29]).collect();
        assert_eq!(d.mask.retained_indices, expected);
        assert_eq!(d.mask.num_retained(), 11);
    }

    #[test]
    fn uniform_rate_and_fps_arithmetic() {
        assert_eq!(fps_equivalent(2, 30.0).unwrap(), 15.0);
        assert_eq!(fps_equivalent(3, 30.0).unwrap(), 10.0);
        assert_eq!(fps_equivalent(6, 30.0).unwrap(), 5.0);
        assert_eq!(fps_equivalent(10, 30.0).unwrap(), 3.0);
        let rate = |n| DegradationSpec::Uniform { n }.nominal_rate();
        assert_eq!(rate(2), 0.5);
        assert!((rate(3) - 2.0 / 3.0).abs() < 1e-15);
        assert!((rate(6) - 5.0 / 6.0).abs() < 1e-15);
        assert!((rate(10) - 0.9).abs() < 1e-15);
        assert!(fps_equivalent(0, 30.0).is_err());
    }

    #[test]
    fn random_rate_zero_is_identity() {
        let d = random_subsample(&seq(10), 0.0, 42).unwrap();
        assert!(d.mask.is_identity());
    }

    #[test]
    fn random_t10_r09_keeps_only_anchors() {
        // k = min(round(9.0), 8) = 8, so all interior frames go.
        let d = random_subsample(&seq(10), 0.9, 42).unwrap();
        assert_eq!(d.mask.retained_indices, vec![0, 9]);
    }

    #[test]
    fn random_is_deterministic_per_sample_and_seed() {
        let a = random_subsample(&seq(40), 0.5, 7).unwrap();
        let b = random_subsample(&seq(40), 0.5, 7).unwrap();
        assert_eq!(a.mask, b.mask);
        let c = random_subsample(&seq(40), 0.5, 8).unwrap();
        assert_ne!(a.mask, c.mask);
        let mut other = seq(40);
        other.sample_id = "another-id".into();
        let d = random_subsample(&other, 0.5, 7).unwrap();
        assert_ne!(a.mask, d.mask);
    }

    #[test]
    fn random_drop_count_matches_rounding() {
        // T=20, r=0.33: round(6.6) = 7 dropped, 13 retained.
        let d = random_subsample(&seq(20), 0.33, 1).unwrap();
        assert_eq!(d.mask.num_retained(), 13);
        // T=21, r=0.5: round(10.5) = 11 (half away from zero), 10 retained.
        let d = random_subsample(&seq(21), 0.5, 1).unwrap();
        assert_eq!(d.mask.num_retained(), 10);
    }

    #[test]
    fn block_t10_r05_structure() {
        // L = 5; start must land in [1, 4] for every seed.
        let mut seen_three = None;
        for master_seed in 0..64 {
            let d = block_dropout(&seq(10), 0.5, master_seed).unwrap();
            let gaps = d.mask.gaps();
            assert_eq!(gaps.len(), 1);
            let (start, len) = gaps[0];
            assert_eq!(len, 5);
            assert!((1..=4).contains(&start), "start {start}");
            if start == 3 && seen_three.is_none() {
                seen_three = Some(d);
            }
        }
        let d = seen_three.expect("64 seeds never produced start=3");
        assert_eq!(d.mask.retained_indices, vec![0, 1, 2, 8, 9]);
    }

    #[test]
    fn block_rate_zero_is_identity() {
        let d = block_dropout(&seq(10), 0.0, 3).unwrap();
        assert!(d.mask.is_identity());
        assert!(d.mask.gaps().is_empty());
    }

    #[test]
    fn degraded_frames_match_source_at_mask() {
        let s = seq(15);
        let d = random_subsample(&s, 0.4, 9).unwrap();
        for (pos, &idx) in d.mask.retained_indices.iter().enumerate() {
            assert_eq!(d.frames[pos], s.frames[idx]);
        }
        let compact = d.compacted();
        assert_eq!(compact.num_frames(), d.mask.num_retained());
        assert_eq!(compact.sample_id, s.sample_id);
    }

    #[test]
    fn apply_dispatches_by_kind() {
        let s = seq(30);
        let u = apply_degradation(&s, &DegradationSpec::Uniform { n: 3 }).unwrap();
        assert_eq!(u.mask.num_retained(), 11);
        let r = apply_degradation(
            &s,
            &DegradationSpec::Random { rate: 0.0, master_seed: 1 },
        )
        .unwrap();
        assert!(r.mask.is_identity());
        assert!(apply_degradation(
            &s,
            &DegradationSpec::Random { rate: 0.96, master_seed: 1 },
        )
        .is_err());
        assert!(apply_degradation(&s, &DegradationSpec::Uniform { n: 0 }).is_err());
    }

    #[test]
    fn interpolation_fills_linear_midpoint() {
        // Frames at t=0 -> (0,0,0) and t=2 -> (2,2,2); t=1 missing.
        let mut s = seq(3);
        for (t, f) in s.frames.iter_mut().enumerate() {
            f.bodies = vec![vec![[t as f64; 3]]];
        }
        let d = DegradedSequence::from_mask(
            s,
            RetentionMask {
                original_length: 3,
                retained_indices: vec![0, 2],
            },
        )
        .unwrap();
        let rec = interpolate_missing(&d);
        assert_eq!(rec.frames[1].bodies[0][0], [1.0, 1.0, 1.0]);
        assert_eq!(rec.num_frames(), 3);
    }

    #[test]
    fn interpolation_on_identity_mask_is_exact() {
        let s = seq(12);
        let d = random_subsample(&s, 0.0, 5).unwrap();
        assert_eq!(interpolate_missing(&d), s);
    }

    #[test]
    fn linear_motion_reconstructs_exactly() {
        // Every joint moves linearly in t, so interpolation is exact for
        // any degradation of any severity.
        let mut s = seq(40);
        for (t, f) in s.frames.iter_mut().enumerate() {
            let v = t as f64 * 0.05;
            f.bodies = vec![vec![[v, 1.0 - 2.0 * v, 0.5 * v], [3.0 * v, v, -v]]];
        }
        for spec in [
            DegradationSpec::Uniform { n: 6 },
            DegradationSpec::Random { rate: 0.9, master_seed: 3 },
            DegradationSpec::Block { rate: 0.7, master_seed: 3 },
        ] {
            let rec = interpolate_missing(&apply_degradation(&s, &spec).unwrap());
            for (rf, sf) in rec.frames.iter().zip(&s.frames) {
                for (rb, sb) in rf.bodies.iter().zip(&sf.bodies) {
                    for (rj, sj) in rb.iter().zip(sb) {
                        for c in 0..3 {
                            assert!(
                                (rj[c] - sj[c]).abs() <= 1e-12,
                                "{spec:?}: {} vs {}",
                                rj[c],
                                sj[c]
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sidecar_round_trips_through_json() {
        let s = seq(25);
        let spec = DegradationSpec::Block { rate: 0.4, master_seed: 11 };
        let d = apply_degradation(&s, &spec).unwrap();
        let side = MaskSidecar::new(&d, &spec);
        let text = serde_json::to_string(&side).unwrap();
        let back: MaskSidecar = serde_json::from_str(&text).unwrap();
        assert_eq!(back, side);
        assert_eq!(back.mask(), d.mask);
        assert!(text.contains("\"kind\":\"block\""), "{text}");
    }

    #[test]
    fn realized_rate_matches_mask() {
        let mask = RetentionMask {
            original_length: 10,
            retained_indices: vec![0, 9],
        };
        assert!((mask.realized_rate() - 0.8).abs() < 1e-15);
    }
}
