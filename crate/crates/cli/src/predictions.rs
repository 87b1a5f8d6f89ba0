//! External prediction files: the interop path that lets any model be
//! scored by this harness.
//!
//! Format: optional `# model: NAME` / `# provenance: TEXT` comment
//! header, then a `sample_id,predicted_label` CSV. Scoring demands an
//! exact one-to-one match with the truth set: duplicates, unknown ids,
//! and missing ids are all named in the error rather than skipped
//! silently.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use skelbench_model::Accuracy;

use crate::error::{CliError, Result};

pub const PREDICTIONS_HEADER: &str = "sample_id,predicted_label";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionFile {
    pub model: String,
    pub provenance: String,
    /// `(sample_id, predicted_label)` in file order; ids unique.
    pub rows: Vec<(String, u32)>,
}

impl PredictionFile {
    pub fn new(model: &str, provenance: &str, rows: Vec<(String, u32)>) -> Result<PredictionFile> {
        let file = PredictionFile {
            model: model.to_string(),
            provenance: provenance.to_string(),
            rows,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(CliError::Data("prediction file has no rows".into()));
        }
        let mut seen = BTreeSet::new();
        for (id, _) in &self.rows {
            if id.is_empty() || id.contains(',') || id.contains('\n') {
                return Err(CliError::Data(format!(
                    "sample id {id:?} is empty or contains a separator"
                )));
            }
            if !seen.insert(id.as_str()) {
                return Err(CliError::Data(format!("duplicate sample id {id}")));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut out = String::new();
        if !self.model.is_empty() {
            out.push_str(&format!("# model: {}\n", self.model));
        }
        if !self.provenance.is_empty() {
            out.push_str(&format!("# provenance: {}\n", self.provenance));
        }
        out.push_str(PREDICTIONS_HEADER);
        out.push('\n');
        for (id, label) in &self.rows {
            out.push_str(&format!("{id},{label}\n"));
        }
        Ok(out)
    }

    pub fn parse_csv(text: &str) -> Result<PredictionFile> {
        let mut model = String::new();
        let mut provenance = String::new();
        let mut rows = Vec::new();
        let mut header_seen = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("model:") {
                    model = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("provenance:") {
                    provenance = v.trim().to_string();
                }
                continue;
            }
            if !header_seen {
                if line != PREDICTIONS_HEADER {
                    return Err(CliError::Data(format!(
                        "line {}: expected header {PREDICTIONS_HEADER:?}, got {line:?}",
                        lineno + 1
                    )));
                }
                header_seen = true;
                continue;
            }
            let (id, label) = line.split_once(',').ok_or_else(|| {
                CliError::Data(format!("line {}: expected `sample_id,label`", lineno + 1))
            })?;
            let label: u32 = label.trim().parse().map_err(|_| {
                CliError::Data(format!(
                    "line {}: label {:?} is not a non-negative integer",
                    lineno + 1,
                    label
                ))
            })?;
            rows.push((id.trim().to_string(), label));
        }
        if !header_seen {
            return Err(CliError::Data("prediction file has no header line".into()));
        }
        let file = PredictionFile {
            model,
            provenance,
            rows,
        };
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<PredictionFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("reading {}: {e}", path.display())))?;
        Self::parse_csv(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)
            .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
    }
}

/// Scores predictions against ground truth. Every truth id must be
/// predicted exactly once and no prediction may name an unknown id.
pub fn score_predictions(
    pred: &PredictionFile,
    truth: &BTreeMap<String, u32>,
    num_classes: usize,
) -> Result<Accuracy> {
    pred.validate()?;
    if truth.is_empty() {
        return Err(CliError::Data("truth set is empty".into()));
    }
    let unknown: Vec<&str> = pred
        .rows
        .iter()
        .filter(|(id, _)| !truth.contains_key(id))
        .map(|(id, _)| id.as_str())
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::Data(format!(
            "predictions name unknown sample ids: {}",
            unknown.join(", ")
        )));
    }
    let predicted: BTreeSet<&str> = pred.rows.iter().map(|(id, _)| id.as_str()).collect();
    let missing: Vec<&str> = truth
        .keys()
        .filter(|id| !predicted.contains(id.as_str()))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Data(format!(
            "predictions are missing test ids: {}",
            missing.join(", ")
        )));
    }
    if let Some((id, label)) = pred
        .rows
        .iter()
        .find(|(_, label)| *label as usize >= num_classes)
    {
        return Err(CliError::Data(format!(
            "prediction for {id} has label {label}, outside 0..{num_classes}"
        )));
    }
    let correct = pred
        .rows
        .iter()
        .filter(|(id, label)| truth[id] == *label)
        .count();
    Ok(Accuracy {
        correct,
        total: truth.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth_of(n: usize, k: u32) -> BTreeMap<String, u32> {
        (0..n)
            .map(|i| (format!("s{i:04}"), (i as u32) % k))
            .collect()
    }

    #[test]
    fn exact_fraction_557_of_1000() {
        let truth = truth_of(1000, 10);
        // Predict correctly for the first 557 ids, off-by-one for the rest.
        let rows: Vec<(String, u32)> = truth
            .iter()
            .enumerate()
            .map(|(i, (id, &y))| (id.clone(), if i < 557 { y } else { (y + 1) % 10 }))
            .collect();
        let pred = PredictionFile::new("external", "test fixture", rows).unwrap();
        let acc = score_predictions(&pred, &truth, 10).unwrap();
        assert_eq!(acc, Accuracy { correct: 557, total: 1000 });
        assert_eq!(acc.fraction(), 0.557);
        assert_eq!(format!("{acc}"), "557/1000 (0.5570)");
    }

    #[test]
    fn all_correct_is_one() {
        let truth = truth_of(40, 8);
        let rows: Vec<(String, u32)> = truth.iter().map(|(i, &y)| (i.clone(), y)).collect();
        let pred = PredictionFile::new("m", "", rows).unwrap();
        let acc = score_predictions(&pred, &truth, 8).unwrap();
        assert_eq!(acc.fraction(), 1.0);
    }

    #[test]
    fn missing_id_is_named() {
        let truth = truth_of(5, 2);
        let rows: Vec<(String, u32)> = truth
            .iter()
            .filter(|(id, _)| id.as_str() != "s0003")
            .map(|(i, &y)| (i.clone(), y))
            .collect();
        let pred = PredictionFile::new("m", "", rows).unwrap();
        let err = score_predictions(&pred, &truth, 2).unwrap_err();
        assert!(err.to_string().contains("s0003"), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_ids_are_errors() {
        let truth = truth_of(3, 2);
        let mut rows: Vec<(String, u32)> =
            truth.iter().map(|(i, &y)| (i.clone(), y)).collect();
        rows.push(("stranger".into(), 0));
        let pred = PredictionFile {
            model: "m".into(),
            provenance: String::new(),
            rows: rows.clone(),
        };
        let err = score_predictions(&pred, &truth, 2).unwrap_err();
        assert!(err.to_string().contains("stranger"));

        rows.pop();
        rows.push(("s0000".into(), 1));
        assert!(PredictionFile::new("m", "", rows).is_err());
    }

    #[test]
    fn label_range_is_enforced() {
        let truth = truth_of(3, 2);
        let rows: Vec<(String, u32)> = truth.iter().map(|(i, _)| (i.clone(), 9)).collect();
        let pred = PredictionFile::new("m", "", rows).unwrap();
        assert!(score_predictions(&pred, &truth, 2).is_err());
    }

    #[test]
    fn csv_round_trip_keeps_metadata() {
        let truth = truth_of(4, 2);
        let rows: Vec<(String, u32)> = truth.iter().map(|(i, &y)| (i.clone(), y)).collect();
        let pred = PredictionFile::new("degcn-export", "run 2026-03-01, x-sub", rows).unwrap();
        let text = pred.to_csv().unwrap();
        let back = PredictionFile::parse_csv(&text).unwrap();
        assert_eq!(back, pred);
        assert!(text.starts_with("# model: degcn-export\n"));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(PredictionFile::parse_csv("").is_err());
        assert!(PredictionFile::parse_csv("id,label\n").is_err());
        assert!(PredictionFile::parse_csv("sample_id,predicted_label\nabc\n").is_err());
        assert!(PredictionFile::parse_csv("sample_id,predicted_label\na,-1\n").is_err());
    }
}
