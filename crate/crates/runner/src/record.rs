//! Result records: what an experiment leaves behind.
//!
//! A record is one JSON document with the resolved config echoed back,
//! named scalar outputs, an optional time series, and a verdict per
//! checked invariant. Everything that lands in a file must be a pure
//! function of the config: wall-clock readings, machine names, and thread
//! counts stay out, which is what makes repeated runs byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Format tag embedded in every record; bump on breaking layout changes.
pub const SCHEMA: &str = "mems-record/1";

/// Outcome of one checked invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail { reason: String },
    Skipped { reason: String },
}

impl Verdict {
    pub fn fail(reason: impl Into<String>) -> Self {
        Verdict::Fail {
            reason: reason.into(),
        }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Verdict::Skipped {
            reason: reason.into(),
        }
    }

    /// Pass iff `ok`, otherwise a failure carrying `reason`.
    pub fn check(ok: bool, reason: impl Into<String>) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::fail(reason)
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

/// One named check with its outcome. `note` carries context that is not a
/// failure reason (the measured value, the tolerance in force).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

/// A scalar output with the prose needed to read it cold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scalar {
    pub value: f64,
    /// What the number is and in which units (most are dimensionless).
    pub note: String,
}

/// Column-oriented time series; `columns` names each entry of a row.
/// Undefined values (NaN in the CSV) are carried as None, so the record
/// stays valid JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Series {
    pub fn from_rows(columns: &[&str], rows: &[Vec<f64>]) -> Self {
        Series {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| if v.is_finite() { Some(v) } else { None })
                        .collect()
                })
                .collect(),
        }
    }
}

/// The complete outcome of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub scalars: BTreeMap<String, Scalar>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub series: Option<Series>,
    pub checks: Vec<Check>,
}

impl ResultRecord {
    pub fn new(experiment: &str, config: ExperimentConfig) -> Self {
        ResultRecord {
            schema: SCHEMA.to_string(),
            experiment: experiment.to_string(),
            config,
            scalars: BTreeMap::new(),
            series: None,
            checks: Vec::new(),
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64, note: &str) {
        self.scalars.insert(
            name.to_string(),
            Scalar {
                value,
                note: note.to_string(),
            },
        );
    }

    pub fn check(&mut self, name: &str, verdict: Verdict) {
        self.checks.push(Check {
            name: name.to_string(),
            verdict,
            note: None,
        });
    }

    pub fn check_with_note(&mut self, name: &str, verdict: Verdict, note: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            verdict,
            note: Some(note.to_string()),
        });
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    /// Serialized form written to disk; JSON cannot carry NaN, so the few
    /// columns that may hold one live in the CSV only.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = self.to_json()?;
        fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&body)?)
    }
}

/// Writes a column-oriented series as CSV. Floats print in shortest
/// round-trip form, so the bytes are a pure function of the values.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{}", columns.join(",")).expect("vec write");
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", cells.join(",")).expect("vec write");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn record_round_trips_through_json() {
        let mut rec = ResultRecord::new("evolve", ExperimentConfig::default());
        rec.scalar("final_sup", 0.25, "sup of the final profile");
        rec.check("admissible", Verdict::Pass);
        rec.check("quench", Verdict::skipped("run stayed below the guard"));
        rec.series = Some(Series::from_rows(
            &["t", "sup_u"],
            &[vec![0.0, 0.0], vec![0.5, f64::NAN]],
        ));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("record.json");
        rec.write(&path).unwrap();
        let back = ResultRecord::read(&path).unwrap();
        assert_eq!(rec, back);
        // NaN crosses the JSON boundary as null, not as a parse error
        assert_eq!(back.series.unwrap().rows[1][1], None);
    }

    #[test]
    fn verdict_tags_are_kebab_case_strings() {
        let v = serde_json::to_value(Verdict::fail("boom")).unwrap();
        assert_eq!(v["status"], "fail");
        assert_eq!(v["reason"], "boom");
        let v = serde_json::to_value(Verdict::Pass).unwrap();
        assert_eq!(v["status"], "pass");
    }

    #[test]
    fn identical_records_serialize_to_identical_bytes() {
        let mut a = ResultRecord::new("thresholds", ExperimentConfig::default());
        a.scalar("lambda_star_local", 0.35, "fold of the local branch");
        let b = a.clone();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn csv_uses_shortest_float_form() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        write_csv(&path, &["t", "sup_u"], &[vec![0.1, 0.5], vec![0.2, f64::NAN]]).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        assert_eq!(body, "t,sup_u\n0.1,0.5\n0.2,NaN\n");
    }
}
