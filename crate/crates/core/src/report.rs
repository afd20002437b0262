//! Structured experiment records and their JSON / CSV / gnuplot writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::Result;

/// Serializes an `f64`, writing non-finite values as the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_f64(*v))
    }
}

fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_f64(v, s),
        None => s.serialize_none(),
    }
}

fn ser_vec_f64<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Num(*x))?;
    }
    seq.end()
}

fn ser_map_f64<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(k, &Num(*v))?;
    }
    map.end()
}

struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ser_f64(&self.0, s)
    }
}

/// Text form used in CSV cells and JSON strings.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:e}")
    }
}

/// A numeric table with one descriptive header per column.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    #[serde(serialize_with = "ser_rows")]
    pub rows: Vec<Vec<f64>>,
}

fn ser_rows<S: Serializer>(rows: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    struct Row<'a>(&'a [f64]);
    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            ser_vec_f64(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for r in rows {
        seq.serialize_element(&Row(r))?;
    }
    seq.end()
}

impl Table {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(header: I) -> Table {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.iter().map(|h| csv_escape(h)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| fmt_f64(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Outcome of one inequality experiment.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub name: String,
    /// The inequality or identity being exercised, in words.
    pub statement: String,
    pub samples: usize,
    #[serde(serialize_with = "ser_opt_f64")]
    pub constant: Option<f64>,
    #[serde(serialize_with = "ser_map_f64")]
    pub constants: BTreeMap<String, f64>,
    #[serde(serialize_with = "ser_f64")]
    pub max_violation: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_s: f64,
    pub notes: Vec<String>,
    pub table: Table,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, statement: impl Into<String>) -> Self {
        VerificationReport {
            name: name.into(),
            statement: statement.into(),
            samples: 0,
            constant: None,
            constants: BTreeMap::new(),
            max_violation: 0.0,
            tolerance: 0.0,
            pass: false,
            runtime_s: 0.0,
            notes: Vec::new(),
            table: Table::default(),
        }
    }

    pub fn set(&mut self, key: &str, v: f64) {
        self.constants.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<stem>.json`, `<stem>.csv` and `<stem>.gp` into `dir`.
    pub fn write_all(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{stem}.json")), self.to_json())?;
        std::fs::write(dir.join(format!("{stem}.csv")), self.table.to_csv())?;
        std::fs::write(dir.join(format!("{stem}.gp")), gnuplot_script(&self.table, &format!("{stem}.csv"), &self.name))?;
        Ok(())
    }
}

/// A gnuplot script plotting every column against the first one on log axes.
pub fn gnuplot_script(table: &Table, csv_name: &str, title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set title '{}'", title.replace('\'', ""));
    let _ = writeln!(s, "set logscale xy");
    if let Some(first) = table.header.first() {
        let _ = writeln!(s, "set xlabel '{}'", first.replace('\'', ""));
    }
    let cols: Vec<String> = (2..=table.header.len())
        .map(|c| format!("'{csv_name}' using 1:{c} with linespoints"))
        .collect();
    if !cols.is_empty() {
        let _ = writeln!(s, "plot {}", cols.join(", \\\n     "));
    }
    s
}

/// The worst sample found by a condition check.
#[derive(Clone, Debug, Default, Serialize)]
pub struct WorstSample {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    #[serde(serialize_with = "ser_f64")]
    pub t: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub radius: Option<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Counts {
    pub points: usize,
    pub balls: usize,
    pub pairs: usize,
    pub t_values: usize,
    pub evaluations: usize,
}

/// Result of a sampled structural-condition check.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub holds: bool,
    #[serde(serialize_with = "ser_f64")]
    pub beta: f64,
    #[serde(serialize_with = "ser_opt_f64")]
    pub coarse_beta: Option<f64>,
    pub worst_sample: WorstSample,
    pub counts: Counts,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn new(condition: impl Into<String>) -> Self {
        ConditionReport {
            condition: condition.into(),
            holds: false,
            beta: f64::NAN,
            coarse_beta: None,
            worst_sample: WorstSample::default(),
            counts: Counts::default(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_become_strings() {
        let mut r = VerificationReport::new("x", "y");
        r.max_violation = f64::INFINITY;
        r.constant = Some(f64::NAN);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["max_violation"], "inf");
        assert_eq!(v["constant"], "nan");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut t = Table::new(["t", "value, scaled"]);
        t.push(vec![1.0, f64::INFINITY]);
        let csv = t.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "t,\"value, scaled\"");
        assert_eq!(csv.lines().nth(1).unwrap(), "1e0,inf");
    }

    #[test]
    fn condition_report_field_names() {
        let r = ConditionReport::new("A0");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["condition", "holds", "beta", "worst_sample", "counts"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}
