//! Canonical sequence interchange formats.
//!
//! Two encodings of the same document, both self-contained per sequence:
//!
//! * **JSON** — inspectable, diff-friendly; the format of record. Keys:
//!   `{sample_id, label, subject_id, setup_id, camera_id, fps, num_joints,
//!   channels, frames}` where `frames` is a `T x (bodies*num_joints) x
//!   channels` numeric array. `num_joints` counts joints *per body*; the
//!   body count is recovered as `row_len / num_joints` (1 or 2).
//! * **Binary** (`.skb`) — length-prefixed little-endian for bulk runs:
//!   magic `SKELSEQ1`, the metadata fields, dimension header, then the
//!   coordinate block as raw f64 little-endian, frame-major.
//!
//! Both round-trip bit-exactly: JSON floats are printed in shortest-exact
//! form and re-parse to identical bits; the binary codec copies bit
//! patterns verbatim.

use serde::{Deserialize, Serialize};

use crate::data::{Frame, SkeletonSequence, CHANNELS, MAX_BODIES};
use crate::error::{CoreError, Result};

#[derive(Serialize, Deserialize)]
struct CanonicalDoc {
    sample_id: String,
    label: u32,
    subject_id: u32,
    setup_id: u32,
    camera_id: u32,
    fps: f64,
    num_joints: usize,
    channels: usize,
    frames: Vec<Vec<Vec<f64>>>,
}

fn codec_err(msg: String) -> CoreError {
    CoreError::Codec(msg)
}

/// Serializes a validated sequence to canonical JSON.
pub fn write_json(seq: &SkeletonSequence) -> Result<String> {
    seq.validate()?;
    let doc = CanonicalDoc {
        sample_id: seq.sample_id.clone(),
        label: seq.label,
        subject_id: seq.subject_id,
        setup_id: seq.setup_id,
        camera_id: seq.camera_id,
        fps: seq.fps,
        num_joints: seq.num_joints(),
        channels: CHANNELS,
        frames: seq
            .frames
            .iter()
            .map(|f| {
                f.bodies
                    .iter()
                    .flat_map(|body| body.iter().map(|j| j.to_vec()))
                    .collect()
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc)?;
    out.push('\n');
    Ok(out)
}

/// Parses canonical JSON back into a sequence.
pub fn read_json(text: &str) -> Result<SkeletonSequence> {
    let doc: CanonicalDoc = serde_json::from_str(text)?;
    if doc.channels != CHANNELS {
        return Err(codec_err(format!(
            "field `channels` must be {CHANNELS}, got {}",
            doc.channels
        )));
    }
    if doc.num_joints == 0 {
        return Err(codec_err("field `num_joints` must be positive".into()));
    }
    if doc.frames.is_empty() {
        return Err(codec_err("field `frames` is empty".into()));
    }
    let row_len = doc.frames[0].len();
    if row_len % doc.num_joints != 0 {
        return Err(codec_err(format!(
            "field `frames`: row length {row_len} is not a multiple of num_joints {}",
            doc.num_joints
        )));
    }
    let bodies = row_len / doc.num_joints;
    if bodies == 0 || bodies > MAX_BODIES {
        return Err(codec_err(format!(
            "field `frames`: implied body count {bodies} outside 1..={MAX_BODIES}"
        )));
    }
    let mut frames = Vec::with_capacity(doc.frames.len());
    for (t, row) in doc.frames.iter().enumerate() {
        if row.len() != row_len {
            return Err(codec_err(format!(
                "field `frames`: frame {t} has {} joints, expected {row_len}",
                row.len()
            )));
        }
        let mut frame = Frame::zeros(bodies, doc.num_joints);
        for (slot, coords) in row.iter().enumerate() {
            if coords.len() != CHANNELS {
                return Err(codec_err(format!(
                    "field `frames`: frame {t} joint {slot} has {} channels, expected {CHANNELS}",
                    coords.len()
                )));
            }
            let b = slot / doc.num_joints;
            let j = slot % doc.num_joints;
            frame.bodies[b][j] = [coords[0], coords[1], coords[2]];
        }
        frames.push(frame);
    }
    let seq = SkeletonSequence {
        sample_id: doc.sample_id,
        label: doc.label,
        subject_id: doc.subject_id,
        setup_id: doc.setup_id,
        camera_id: doc.camera_id,
        fps: doc.fps,
        frames,
    };
    seq.validate()?;
    Ok(seq)
}

const MAGIC: &[u8; 8] = b"SKELSEQ1";

/// Serializes a validated sequence to the binary variant.
pub fn write_binary(seq: &SkeletonSequence) -> Result<Vec<u8>> {
    seq.validate()?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    let id = seq.sample_id.as_bytes();
    out.extend_from_slice(&(id.len() as u32).to_le_bytes());
    out.extend_from_slice(id);
    for v in [seq.label, seq.subject_id, seq.setup_id, seq.camera_id] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&seq.fps.to_le_bytes());
    for v in [
        seq.num_frames(),
        seq.num_bodies(),
        seq.num_joints(),
        CHANNELS,
    ] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for frame in &seq.frames {
        for body in &frame.bodies {
            for joint in body {
                for c in joint {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(codec_err(format!(
                "truncated payload at byte {} (wanted {n} more)",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Parses the binary variant back into a sequence.
pub fn read_binary(bytes: &[u8]) -> Result<SkeletonSequence> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    if cur.take(8)? != MAGIC {
        return Err(codec_err("bad magic, not a SKELSEQ1 payload".into()));
    }
    let id_len = cur.u32()? as usize;
    let sample_id = std::str::from_utf8(cur.take(id_len)?)
        .map_err(|_| codec_err("sample_id is not valid UTF-8".into()))?
        .to_string();
    let label = cur.u32()?;
    let subject_id = cur.u32()?;
    let setup_id = cur.u32()?;
    let camera_id = cur.u32()?;
    let fps = cur.f64()?;
    let t = cur.u32()? as usize;
    let bodies = cur.u32()? as usize;
    let joints = cur.u32()? as usize;
    let channels = cur.u32()? as usize;
    if channels != CHANNELS {
        return Err(codec_err(format!(
            "channel count {channels} unsupported, expected {CHANNELS}"
        )));
    }
    if bodies == 0 || bodies > MAX_BODIES {
        return Err(codec_err(format!(
            "body count {bodies} outside 1..={MAX_BODIES}"
        )));
    }
    let expected = t
        .checked_mul(bodies)
        .and_then(|v| v.checked_mul(joints))
        .and_then(|v| v.checked_mul(CHANNELS))
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(|| codec_err("dimension header overflows".into()))?;
    let remaining = bytes.len() - cur.pos;
    if remaining != expected {
        return Err(codec_err(format!(
            "coordinate block is {remaining} bytes, dimensions require {expected}"
        )));
    }
    let mut frames = Vec::with_capacity(t);
    for _ in 0..t {
        let mut frame = Frame::zeros(bodies, joints);
        for b in 0..bodies {
            for j in 0..joints {
                for c in 0..CHANNELS {
                    frame.bodies[b][j][c] = cur.f64()?;
                }
            }
        }
        frames.push(frame);
    }
    let seq = SkeletonSequence {
        sample_id,
        label,
        subject_id,
        setup_id,
        camera_id,
        fps,
        frames,
    };
    seq.validate()?;
    Ok(seq)
}

/// Loads a sequence from a path, choosing the codec by extension:
/// `.json` canonical JSON, `.skb` binary, `.skeleton` NTU text.
pub fn load_sequence(path: &std::path::Path) -> Result<SkeletonSequence> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_json(&std::fs::read_to_string(path)?),
        Some("skb") => read_binary(&std::fs::read(path)?),
        Some("skeleton") => crate::ntu::parse_ntu_file(path),
        other => Err(codec_err(format!(
            "unrecognized sequence extension {:?} for `{}`",
            other,
            path.display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::test_sequence;

    fn two_body_sequence() -> SkeletonSequence {
        let mut s = test_sequence("2body", 3);
        for (t, f) in s.frames.iter_mut().enumerate() {
            let second: Vec<_> = f.bodies[0]
                .iter()
                .map(|j| [j[0] + 0.25, j[1] * 1.5, j[2] - t as f64 / 3.0])
                .collect();
            f.bodies.push(second);
        }
        s
    }

    #[test]
    fn json_round_trip_is_exact() {
        for seq in [test_sequence("rt", 5), two_body_sequence()] {
            let text = write_json(&seq).unwrap();
            let back = read_json(&text).unwrap();
            assert_eq!(back, seq);
        }
    }

    #[test]
    fn json_round_trip_preserves_awkward_floats() {
        let mut s = test_sequence("floats", 3);
        s.frames[0].bodies[0][0] = [0.1 + 0.2, 1.0 / 3.0, f64::MIN_POSITIVE];
        s.frames[1].bodies[0][1] = [-0.0, 1e-300, 123456789.123456789];
        let back = read_json(&write_json(&s).unwrap()).unwrap();
        for (a, b) in back
            .to_matrix()
            .iter()
            .flatten()
            .zip(s.to_matrix().iter().flatten())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn binary_round_trip_is_exact() {
        for seq in [test_sequence("rt", 5), two_body_sequence()] {
            let bytes = write_binary(&seq).unwrap();
            let back = read_binary(&bytes).unwrap();
            assert_eq!(back, seq);
        }
    }

    #[test]
    fn missing_key_is_named() {
        let text = write_json(&test_sequence("x", 3)).unwrap();
        let broken = text.replace("\"fps\"", "\"fps_gone\"");
        let err = read_json(&broken).unwrap_err();
        assert!(err.to_string().contains("fps"), "{err}");
    }

    #[test]
    fn ragged_frames_are_dimension_errors() {
        let text = write_json(&test_sequence("x", 3)).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["frames"][1]
            .as_array_mut()
            .unwrap()
            .pop();
        let err = read_json(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("frame 1"), "{err}");
    }

    #[test]
    fn non_finite_is_rejected_on_read() {
        let text = write_json(&test_sequence("x", 3)).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["frames"][0][0][0] = serde_json::Value::Null;
        assert!(read_json(&doc.to_string()).is_err());
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let bytes = write_binary(&test_sequence("x", 3)).unwrap();
        let err = read_binary(&bytes[..bytes.len() - 4]).unwrap_err();
        assert!(err.to_string().contains("coordinate block"), "{err}");
        assert!(read_binary(&bytes[..6]).is_err());
    }

    #[test]
    fn bad_magic_is_rejected() {
        let mut bytes = write_binary(&test_sequence("x", 3)).unwrap();
        bytes[0] = b'X';
        assert!(read_binary(&bytes).is_err());
    }

    #[test]
    fn ntu_parse_then_canonical_round_trip() {
        let text = crate::ntu::tests::payload(3, 2, |f, b, j| {
            (f as f64) * 0.5 + (b as f64) * 0.01 + (j as f64) * 0.001
        });
        let seq = crate::ntu::parse_ntu_skeleton(&text, "S002C003P008R001A005.skeleton").unwrap();
        let back = read_json(&write_json(&seq).unwrap()).unwrap();
        assert_eq!(back, seq);
        let back2 = read_binary(&write_binary(&seq).unwrap()).unwrap();
        assert_eq!(back2, seq);
    }
}
