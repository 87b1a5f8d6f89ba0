//! The results table: one row per (extractor arm, grid point, mitigation
//! setting), its CSV/JSON renderings, per-curve plot series, and table
//! diffing.
//!
//! CSV columns, in order:
//! `extractor,split,kind,nominal_rate,realized_rate,fps,mitigated,accuracy,n_samples,seed`.
//! Floats render with four decimal places; parsing accepts any float
//! text, so hand-written tables round-trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const CSV_HEADER: &str =
    "extractor,split,kind,nominal_rate,realized_rate,fps,mitigated,accuracy,n_samples,seed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsRow {
    pub extractor: String,
    pub split: String,
    pub kind: String,
    pub nominal_rate: f64,
    pub realized_rate: f64,
    pub fps: f64,
    pub mitigated: bool,
    pub accuracy: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl ResultsRow {
    /// Alignment key for diffing and series grouping: everything that
    /// identifies a measurement except the mitigation flag and the
    /// measured numbers. Rates are keyed at the table's own rendering
    /// precision (4 decimals) so parsed and generated tables align.
    pub fn key(&self) -> RowKey {
        RowKey {
            extractor: self.extractor.clone(),
            split: self.split.clone(),
            kind: self.kind.clone(),
            nominal_rate: format!("{:.4}", self.nominal_rate),
        }
    }

    fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{:.4},{:.4},{:.4},{},{:.4},{},{}",
            self.extractor,
            self.split,
            self.kind,
            self.nominal_rate,
            self.realized_rate,
            self.fps,
            self.mitigated,
            self.accuracy,
            self.n_samples,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RowKey {
    pub extractor: String,
    pub split: String,
    pub kind: String,
    pub nominal_rate: String,
}

impl std::fmt::Display for RowKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}/{}/{}@{}",
            self.extractor, self.split, self.kind, self.nominal_rate
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResultsTable {
    pub rows: Vec<ResultsRow>,
}

impl ResultsTable {
    pub fn new(rows: Vec<ResultsRow>) -> ResultsTable {
        ResultsTable { rows }
    }

    /// Checks the invariants of a *measured* table (not a delta table):
    /// accuracies in [0,1], realized rates in [0,1), no stray characters
    /// in the text fields, and at most one row per (key, mitigated).
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (name, text) in [
                ("extractor", &row.extractor),
                ("split", &row.split),
                ("kind", &row.kind),
            ] {
                if text.is_empty() || text.contains(',') || text.contains('\n') {
                    return Err(CliError::Data(format!(
                        "row {i}: {name} field {text:?} is empty or contains a separator"
                    )));
                }
            }
            if !(0.0..=1.0).contains(&row.accuracy) {
                return Err(CliError::Data(format!(
                    "row {i}: accuracy {} outside [0, 1]",
                    row.accuracy
                )));
            }
            if !(0.0..1.0).contains(&row.realized_rate) {
                return Err(CliError::Data(format!(
                    "row {i}: realized rate {} outside [0, 1)",
                    row.realized_rate
                )));
            }
            if let Some(j) = seen.insert((row.key(), row.mitigated), i) {
                return Err(CliError::Data(format!(
                    "rows {j} and {i} duplicate the grid point {} (mitigated={})",
                    row.key(),
                    row.mitigated
                )));
            }
        }
        Ok(())
    }

    /// Renders the CSV with a trailing newline.
    pub fn to_csv(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(CliError::Config("refusing to emit an empty table".into()));
        }
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        if self.rows.is_empty() {
            return Err(CliError::Config("refusing to emit an empty table".into()));
        }
        let mut text = serde_json::to_string_pretty(&self.rows)
            .map_err(|e| CliError::Data(format!("table to json: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    /// Parses the CSV rendering. Does not apply the measured-table range
    /// checks (delta tables contain negative accuracies); call
    /// [`ResultsTable::validate`] where those invariants are expected.
    pub fn parse_csv(text: &str) -> Result<ResultsTable> {
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() || l.starts_with('#') => continue,
                Some((_, l)) => break l,
                None => return Err(CliError::Data("results csv is empty".into())),
            }
        };
        if header.trim() != CSV_HEADER {
            return Err(CliError::Data(format!(
                "unexpected results header {:?}",
                header.trim()
            )));
        }
        let mut rows = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 10 {
                return Err(CliError::Data(format!(
                    "line {}: expected 10 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let fl = |i: usize, name: &str| -> Result<f64> {
                fields[i].parse::<f64>().map_err(|_| {
                    CliError::Data(format!(
                        "line {}: {name} field {:?} is not a number",
                        lineno + 1,
                        fields[i]
                    ))
                })
            };
            let mitigated = match fields[6] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(CliError::Data(format!(
                        "line {}: mitigated field {other:?} must be true or false",
                        lineno + 1
                    )))
                }
            };
            rows.push(ResultsRow {
                extractor: fields[0].to_string(),
                split: fields[1].to_string(),
                kind: fields[2].to_string(),
                nominal_rate: fl(3, "nominal_rate")?,
                realized_rate: fl(4, "realized_rate")?,
                fps: fl(5, "fps")?,
                mitigated,
                accuracy: fl(7, "accuracy")?,
                n_samples: fields[8].parse().map_err(|_| {
                    CliError::Data(format!("line {}: bad n_samples", lineno + 1))
                })?,
                seed: fields[9].parse().map_err(|_| {
                    CliError::Data(format!("line {}: bad seed", lineno + 1))
                })?,
            });
        }
        if rows.is_empty() {
            return Err(CliError::Data("results csv has a header but no rows".into()));
        }
        Ok(ResultsTable { rows })
    }

    pub fn read_csv(path: &std::path::Path) -> Result<ResultsTable> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("reading {}: {e}", path.display())))?;
        Self::parse_csv(&text).map_err(|e| e.context(&path.display().to_string()))
    }

    /// Groups rows into plot curves keyed by (extractor, split, kind,
    /// mitigated), each sorted by ascending nominal rate. Duplicate x
    /// positions within one curve are an error.
    pub fn plot_series(&self) -> Result<Vec<PlotSeries>> {
        if self.rows.is_empty() {
            return Err(CliError::Config("cannot plot an empty table".into()));
        }
        let mut groups: BTreeMap<(String, String, String, bool), Vec<(f64, f64)>> =
            BTreeMap::new();
        for row in &self.rows {
            groups
                .entry((
                    row.extractor.clone(),
                    row.split.clone(),
                    row.kind.clone(),
                    row.mitigated,
                ))
                .or_default()
                .push((row.nominal_rate, row.accuracy));
        }
        let mut series = Vec::new();
        for ((extractor, split, kind, mitigated), mut points) in groups {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            if points.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(CliError::Data(format!(
                    "curve {extractor}/{split}/{kind} (mitigated={mitigated}) has duplicate x values"
                )));
            }
            series.push(PlotSeries {
                extractor,
                split,
                kind,
                mitigated,
                points,
            });
        }
        Ok(series)
    }

    /// Convenience lookup used by reports and tests.
    pub fn find(&self, extractor: &str, kind: &str, nominal_rate: f64, mitigated: bool) -> Option<&ResultsRow> {
        self.rows.iter().find(|r| {
            r.extractor == extractor
                && r.kind == kind
                && r.mitigated == mitigated
                && format!("{:.4}", r.nominal_rate) == format!("{nominal_rate:.4}")
        })
    }
}

/// One accuracy-versus-rate curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub extractor: String,
    pub split: String,
    pub kind: String,
    pub mitigated: bool,
    /// `(nominal_rate, accuracy)` with strictly increasing rates.
    pub points: Vec<(f64, f64)>,
}

/// Per-key `accuracy(b) - accuracy(a)`. Keys (extractor, split, kind,
/// rate) must match exactly; both tables must be duplicate-free on that
/// key. The output reuses the row shape with `accuracy` holding the
/// delta, `mitigated` taken from `b`, and the other measured columns
/// (realized rate, fps, counts) from `b`.
pub fn diff_tables(a: &ResultsTable, b: &ResultsTable) -> Result<ResultsTable> {
    let index = |t: &ResultsTable, name: &str| -> Result<BTreeMap<RowKey, ResultsRow>> {
        let mut map = BTreeMap::new();
        for row in &t.rows {
            if map.insert(row.key(), row.clone()).is_some() {
                return Err(CliError::Data(format!(
                    "table {name} has duplicate key {}; filter by mitigation first",
                    row.key()
                )));
            }
        }
        Ok(map)
    };
    let left = index(a, "a")?;
    let right = index(b, "b")?;
    let missing_right: Vec<String> = left
        .keys()
        .filter(|k| !right.contains_key(*k))
        .map(|k| k.to_string())
        .collect();
    let missing_left: Vec<String> = right
        .keys()
        .filter(|k| !left.contains_key(*k))
        .map(|k| k.to_string())
        .collect();
    if !missing_right.is_empty() || !missing_left.is_empty() {
        return Err(CliError::Data(format!(
            "tables do not align; missing from b: [{}]; missing from a: [{}]",
            missing_right.join(", "),
            missing_left.join(", ")
        )));
    }
    let mut rows = Vec::with_capacity(right.len());
    for (key, brow) in right {
        let arow = &left[&key];
        rows.push(ResultsRow {
            accuracy: brow.accuracy - arow.accuracy,
            ..brow
        });
    }
    Ok(ResultsTable { rows })
}

/// Filters a table by mitigation flag, e.g. to split a `both`-mode run
/// into diffable halves.
pub fn filter_mitigated(table: &ResultsTable, mitigated: bool) -> ResultsTable {
    ResultsTable {
        rows: table
            .rows
            .iter()
            .filter(|r| r.mitigated == mitigated)
            .cloned()
            .collect(),
    }
}
