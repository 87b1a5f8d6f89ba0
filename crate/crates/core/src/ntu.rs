//! Parser for the NTU RGB+D `.skeleton` text format.
//!
//! Layout of the community text format, per file:
//!
//! ```text
//! <frame count>
//! for each frame:
//!   <body count>
//!   for each body:
//!     <10-field tracking header (body id, clipped edges, hand states, lean, tracking state)>
//!     <joint count, always 25>
//!     for each joint: <12 whitespace-separated values; the first 3 are x y z in meters>
//! ```
//!
//! Only the x/y/z columns are consumed. Clip metadata (action class, setup,
//! camera, performer) is authoritative in the file *name*, which follows the
//! `SsssCcccPpppRrrrAaaa` convention; in-file body headers are ignored.
//!
//! Output frames always use a fixed two-body slot layout with absent bodies
//! zero-filled, so the flattened channel dimension is constant across a
//! dataset (150 = 2 bodies x 25 joints x 3 channels). Frames reporting more
//! than two tracked bodies keep the first two in file order.

use crate::data::{Frame, SkeletonSequence, MAX_BODIES};
use crate::error::{CoreError, Result};

/// Joints per body in the NTU skeleton layout.
pub const NTU_JOINTS: usize = 25;

/// Capture rate of the source recordings.
pub const NTU_FPS: f64 = 30.0;

/// Fields on a body tracking header line.
const BODY_HEADER_FIELDS: usize = 10;

/// Fields on a joint line (x y z, depth/color projections, orientation,
/// tracking state).
const JOINT_FIELDS: usize = 12;

/// Metadata decoded from an NTU sample name such as `S001C002P003R002A017`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NtuSampleName {
    pub setup_id: u32,
    pub camera_id: u32,
    pub subject_id: u32,
    pub replication: u32,
    /// One-based action number as written in the name.
    pub action: u32,
}

impl NtuSampleName {
    /// Zero-based class label.
    pub fn label(&self) -> u32 {
        self.action - 1
    }
}

/// Decodes the `SsssCcccPpppRrrrAaaa` naming convention. Accepts a bare
/// stem, a file name with extension, or a full path.
pub fn decode_sample_name(name: &str) -> Result<NtuSampleName> {
    let stem = name
        .rsplit(['/', '\\'])
        .next()
        .unwrap_or(name)
        .trim_end_matches(".skeleton");
    let bytes = stem.as_bytes();
    let bad = || CoreError::Parse {
        line: 0,
        msg: format!("sample name `{stem}` does not match SsssCcccPpppRrrrAaaa"),
    };
    if bytes.len() != 20 {
        return Err(bad());
    }
    let field = |tag: u8, offset: usize| -> Result<u32> {
        if bytes[offset] != tag {
            return Err(bad());
        }
        let digits = &stem[offset + 1..offset + 4];
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        digits.parse::<u32>().map_err(|_| bad())
    };
    let name = NtuSampleName {
        setup_id: field(b'S', 0)?,
        camera_id: field(b'C', 4)?,
        subject_id: field(b'P', 8)?,
        replication: field(b'R', 12)?,
        action: field(b'A', 16)?,
    };
    if name.action == 0 {
        return Err(CoreError::Parse {
            line: 0,
            msg: format!("sample name `{stem}`: action number must be >= 1"),
        });
    }
    Ok(name)
}

/// Line cursor with 1-based positions for error reporting.
struct Lines<'a> {
    iter: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines(),
            line_no: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str> {
        for line in self.iter.by_ref() {
            self.line_no += 1;
            let line = line.trim();
            if !line.is_empty() {
                return Ok(line);
            }
        }
        Err(CoreError::Parse {
            line: self.line_no + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, msg: String) -> CoreError {
        CoreError::Parse {
            line: self.line_no,
            msg,
        }
    }

    fn next_count(&mut self, what: &str) -> Result<usize> {
        let line = self.next(what)?;
        line.parse::<usize>()
            .map_err(|_| self.err(format!("expected {what} (integer), got `{line}`")))
    }
}

/// Parses one `.skeleton` payload. `name` is the sample file name (or stem)
/// carrying the clip metadata.
pub fn parse_ntu_skeleton(text: &str, name: &str) -> Result<SkeletonSequence> {
    let meta = decode_sample_name(name)?;
    let sample_id = {
        let stem = name.rsplit(['/', '\\']).next().unwrap_or(name);
        stem.trim_end_matches(".skeleton").to_string()
    };

    let mut lines = Lines::new(text);
    let frame_count = lines.next_count("frame count")?;
    let mut frames = Vec::with_capacity(frame_count);

    for frame_idx in 0..frame_count {
        let body_count = lines.next_count("body count")?;
        let mut frame = Frame::zeros(MAX_BODIES, NTU_JOINTS);
        for body_idx in 0..body_count {
            let header = lines.next("body header")?;
            let header_fields = header.split_whitespace().count();
            if header_fields != BODY_HEADER_FIELDS {
                return Err(lines.err(format!(
                    "body header has {header_fields} fields, expected {BODY_HEADER_FIELDS}"
                )));
            }
            let joint_count = lines.next_count("joint count")?;
            if joint_count != NTU_JOINTS {
                return Err(lines.err(format!(
                    "body block declares {joint_count} joints, expected {NTU_JOINTS}"
                )));
            }
            for joint_idx in 0..joint_count {
                let line = lines.next("joint line")?;
                let fields: Vec<&str> = line.split_whitespace().collect();
                if fields.len() != JOINT_FIELDS {
                    return Err(lines.err(format!(
                        "joint line has {} fields, expected {JOINT_FIELDS}",
                        fields.len()
                    )));
                }
                let mut xyz = [0.0f64; 3];
                for (c, slot) in xyz.iter_mut().enumerate() {
                    *slot = fields[c].parse::<f64>().map_err(|_| {
                        lines.err(format!("bad coordinate `{}`", fields[c]))
                    })?;
                }
                if !xyz.iter().all(|c| c.is_finite()) {
                    return Err(CoreError::InvalidSequence {
                        id: sample_id.clone(),
                        msg: format!(
                            "non-finite coordinate at frame {frame_idx} body {body_idx} joint {joint_idx}"
                        ),
                    });
                }
                // Bodies beyond the two-slot layout are consumed but dropped.
                if body_idx < MAX_BODIES {
                    frame.bodies[body_idx][joint_idx] = xyz;
                }
            }
        }
        frames.push(frame);
    }

    if let Ok(extra) = lines.next("end of file") {
        return Err(lines.err(format!(
            "trailing content after {frame_count} frames: `{extra}`"
        )));
    }

    let seq = SkeletonSequence {
        sample_id,
        label: meta.label(),
        subject_id: meta.subject_id,
        setup_id: meta.setup_id,
        camera_id: meta.camera_id,
        fps: NTU_FPS,
        frames,
    };
    seq.validate()?;
    Ok(seq)
}

/// Reads and parses a `.skeleton` file, deriving metadata from its name.
pub fn parse_ntu_file(path: &std::path::Path) -> Result<SkeletonSequence> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CoreError::Parse {
            line: 0,
            msg: format!("path `{}` has no usable file name", path.display()),
        })?;
    parse_ntu_skeleton(&text, name)
}
