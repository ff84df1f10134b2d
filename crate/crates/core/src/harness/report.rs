//! Machine-readable suite reports.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, Serializer};

use super::SuiteSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    /// The statement the case checks, in words.
    pub anchor: String,
    pub status: Status,
    pub metrics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub repro: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub undetermined: usize,
    /// Calls per public operation during the run.
    pub coverage: BTreeMap<String, u64>,
    /// Operations never called during the run.
    pub uncovered: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub timestamp: String,
    pub config: SuiteSpec,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn is_success(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn case(&self, id: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.id == id)
    }

    /// Cases whose id starts with `prefix`.
    pub fn cases_with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Case> + 'a {
        self.cases.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// Pretty JSON with every float written to 17 significant digits.
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// One row per `(case, metric)`.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["case", "status", "metric", "value"])?;
        for case in &self.cases {
            let status = match case.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Undetermined => "undetermined",
            };
            for (k, v) in &case.metrics {
                w.write_record([case.id.as_str(), status, k.as_str(), &format_f64(*v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Pretty JSON with every float written to 17 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    write_json(value, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(value: &T, writer: W) -> serde_json::Result<()> {
    let mut ser = Serializer::with_formatter(writer, RoundTripFormatter::default());
    value.serialize(&mut ser)
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// serde_json's pretty formatter with floats in 17-digit scientific form.
#[derive(Default)]
struct RoundTripFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Accumulates one case over many samples: records the worst observed value
/// against a fixed limit, the number of violations, and a witness for the
/// first violation.
pub(crate) struct Tally {
    id: String,
    anchor: String,
    limit: f64,
    worst: f64,
    samples: usize,
    failures: usize,
    undetermined: usize,
    witness: Option<Vec<f64>>,
    extra: BTreeMap<String, f64>,
}

impl Tally {
    /// A case that passes while every observed value is `≤ limit`.
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, limit: f64) -> Self {
        Self {
            id: id.into(),
            anchor: anchor.into(),
            limit,
            worst: f64::NEG_INFINITY,
            samples: 0,
            failures: 0,
            undetermined: 0,
            witness: None,
            extra: BTreeMap::new(),
        }
    }

    /// A case made of boolean checks.
    pub fn boolean(id: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self::new(id, anchor, 0.0)
    }

    pub fn le(&mut self, value: f64, witness: impl FnOnce() -> Vec<f64>) {
        self.samples += 1;
        if value > self.worst || value.is_nan() {
            self.worst = value;
        }
        if value.is_nan() || value > self.limit {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> Vec<f64>) {
        self.le(if ok { 0.0 } else { 1.0 }, witness);
    }

    pub fn is_empty(&self) -> bool {
        self.samples == 0
    }

    pub fn undetermined(&mut self) {
        self.samples += 1;
        self.undetermined += 1;
    }

    /// Records an auxiliary metric, keeping the largest value seen.
    pub fn metric_max(&mut self, key: &str, value: f64) {
        let e = self.extra.entry(key.to_owned()).or_insert(f64::NEG_INFINITY);
        if value > *e {
            *e = value;
        }
    }

    /// Records an auxiliary metric, keeping the smallest value seen.
    pub fn metric_min(&mut self, key: &str, value: f64) {
        let e = self.extra.entry(key.to_owned()).or_insert(f64::INFINITY);
        if value < *e {
            *e = value;
        }
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.extra.insert(key.to_owned(), value);
    }

    pub fn finish(self, repro: &str) -> Case {
        let status = if self.failures > 0 || self.samples == 0 {
            Status::Fail
        } else if self.undetermined > 0 {
            Status::Undetermined
        } else {
            Status::Pass
        };
        let mut metrics = self.extra;
        metrics.insert("samples".into(), self.samples as f64);
        metrics.insert("failures".into(), self.failures as f64);
        metrics.insert("limit".into(), self.limit);
        metrics.insert("worst".into(), self.worst);
        if self.undetermined > 0 {
            metrics.insert("undetermined".into(), self.undetermined as f64);
        }
        // JSON has no representation for non-finite numbers
        metrics.retain(|_, v| v.is_finite());
        Case {
            id: self.id,
            anchor: self.anchor,
            status,
            metrics,
            witness: self.witness,
            repro: (status == Status::Fail).then(|| repro.to_owned()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = format_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let digits = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(digits.len(), 17);
        }
    }

    #[test]
    fn json_uses_scientific_floats() {
        let json = to_json(&vec![0.1, 2.0]);
        assert!(json.contains("1.0000000000000001e-1"));
        assert!(json.contains("2.0000000000000000e0"));
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![0.1, 2.0]);
    }

    #[test]
    fn tally_status() {
        let mut t = Tally::new("a", "b", 1.0);
        t.le(0.5, Vec::new);
        assert_eq!(t.finish("cmd").status, Status::Pass);
        let mut t = Tally::new("a", "b", 1.0);
        t.le(2.0, || vec![1.0]);
        t.le(f64::NAN, || vec![2.0]);
        let c = t.finish("cmd");
        assert_eq!(c.status, Status::Fail);
        assert_eq!(c.metrics["failures"], 2.0);
        assert_eq!(c.witness, Some(vec![1.0]));
        assert_eq!(c.repro.as_deref(), Some("cmd"));
        let t = Tally::boolean("empty", "no samples");
        assert_eq!(t.finish("cmd").status, Status::Fail);
    }
}
