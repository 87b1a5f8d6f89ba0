//! Train/test partitioning keyed on capture metadata.
//!
//! Benchmarks split by held-out *people* (cross-subject) or held-out
//! *capture setups* (cross-setup), never by random shuffling, so that a
//! classifier cannot score by memorizing an actor or a camera rig. The id
//! sets are explicit and disjoint; every sample must land on exactly one
//! side, and an unassignable sample is an error rather than a silent drop.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::SkeletonSequence;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    CrossSubject,
    CrossSetup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub kind: SplitKind,
    pub train_ids: BTreeSet<u32>,
    pub test_ids: BTreeSet<u32>,
}

impl SplitSpec {
    pub fn new(kind: SplitKind, train_ids: BTreeSet<u32>, test_ids: BTreeSet<u32>) -> Result<Self> {
        let overlap: Vec<u32> = train_ids.intersection(&test_ids).copied().collect();
        if !overlap.is_empty() {
            return Err(CoreError::InvalidParameter(format!(
                "split ids appear on both sides: {overlap:?}"
            )));
        }
        if train_ids.is_empty() || test_ids.is_empty() {
            return Err(CoreError::InvalidParameter(
                "split requires non-empty train and test id sets".into(),
            ));
        }
        Ok(SplitSpec {
            kind,
            train_ids,
            test_ids,
        })
    }

    /// The conventional cross-setup rule: even-numbered setups train,
    /// odd-numbered setups test, over setups `1..=max_setup`.
    pub fn cross_setup_even_odd(max_setup: u32) -> Result<Self> {
        let train = (1..=max_setup).filter(|s| s % 2 == 0).collect();
        let test = (1..=max_setup).filter(|s| s % 2 == 1).collect();
        Self::new(SplitKind::CrossSetup, train, test)
    }

    /// Loads id sets from plain-text files: one integer per line, blank
    /// lines and `#` comments ignored.
    pub fn from_files(kind: SplitKind, train: &Path, test: &Path) -> Result<Self> {
        Self::new(kind, read_id_file(train)?, read_id_file(test)?)
    }

    fn key_of(&self, seq: &SkeletonSequence) -> u32 {
        match self.kind {
            SplitKind::CrossSubject => seq.subject_id,
            SplitKind::CrossSetup => seq.setup_id,
        }
    }
}

/// Reads one id per line; `#` starts a comment.
pub fn read_id_file(path: &Path) -> Result<BTreeSet<u32>> {
    let text = std::fs::read_to_string(path)?;
    let mut ids = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let id = line.parse::<u32>().map_err(|_| CoreError::Parse {
            line: i + 1,
            msg: format!("expected an integer id, got `{line}`"),
        })?;
        ids.insert(id);
    }
    Ok(ids)
}

/// Partitions samples by the split key, preserving input order on both
/// sides. Errors if any sample's key is assigned to neither side.
pub fn split_dataset(
    samples: Vec<SkeletonSequence>,
    spec: &SplitSpec,
) -> Result<(Vec<SkeletonSequence>, Vec<SkeletonSequence>)> {
    let unassigned: Vec<String> = samples
        .iter()
        .filter(|s| {
            let k = spec.key_of(s);
            !spec.train_ids.contains(&k) && !spec.test_ids.contains(&k)
        })
        .map(|s| format!("{} (key {})", s.sample_id, spec.key_of(s)))
        .collect();
    if !unassigned.is_empty() {
        return Err(CoreError::InvalidParameter(format!(
            "samples not covered by the split: {}",
            unassigned.join(", ")
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for s in samples {
        if spec.train_ids.contains(&spec.key_of(&s)) {
            train.push(s);
        } else {
            test.push(s);
        }
    }
    Ok((train, test))
}
