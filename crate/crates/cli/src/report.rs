//! Scenario reports and their table, CSV and json-like renderings.
//!
//! Every number is rounded to 12 significant digits when it enters a report
//! and printed as `{:.11e}`, so rendering is byte-stable and parsing the
//! json-like form gives back the same report.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use permanence::{DensityMatrix, Matrix};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    JsonLike,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::JsonLike => "json-like",
        })
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json-like" | "json" => Ok(Format::JsonLike),
            other => Err(format!(
                "unknown format `{other}` (expected table, csv or json-like)"
            )),
        }
    }
}

/// `x` rounded to 12 significant digits; `-0.0` becomes `0.0`.
pub fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &Matrix<f64>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| round12(z.re)).collect(),
            im: m.as_slice().iter().map(|z| round12(z.im)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

impl Verdict {
    /// Passes iff the (rounded) deviation is below the tolerance; NaN fails.
    pub fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        let deviation = round12(deviation);
        let tolerance = round12(tolerance);
        Self {
            name: name.into(),
            pass: deviation < tolerance,
            deviation,
            tolerance,
        }
    }

    /// A yes/no check expressed as deviation 0 (holds) or 1 (fails)
    /// against tolerance ½.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} deviation={} tolerance={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            fmt_num(self.deviation),
            fmt_num(self.tolerance)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioReport {
    pub kind: String,
    pub config: Vec<(String, String)>,
    pub scalars: Vec<(String, f64)>,
    pub flags: Vec<(String, bool)>,
    pub spectra: Vec<(String, Vec<f64>)>,
    pub matrices: Vec<(String, MatrixRecord)>,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed report: {0}")]
pub struct ParseReportError(String);

impl ScenarioReport {
    pub fn new(kind: impl Into<String>, config: Vec<(String, String)>) -> Self {
        Self {
            kind: kind.into(),
            config,
            ..Self::default()
        }
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.push((name.to_string(), round12(value)));
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.flags.push((name.to_string(), value));
    }

    pub fn spectrum(&mut self, name: &str, values: &[f64]) {
        self.spectra.push((
            name.to_string(),
            values.iter().copied().map(round12).collect(),
        ));
    }

    pub fn matrix(&mut self, name: &str, m: &Matrix<f64>) {
        self.matrices
            .push((name.to_string(), MatrixRecord::from_matrix(m)));
    }

    pub fn density(&mut self, name: &str, rho: &DensityMatrix<f64>) {
        self.matrix(name, rho.matrix());
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn get_scalar(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }

    pub fn get_flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn get_verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::Csv => render_csv(std::slice::from_ref(self)),
            Format::JsonLike => self.render_json_like(),
        }
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if !self.kind.is_empty() {
            let _ = writeln!(out, "kind: {}", self.kind);
        }
        let width = self
            .scalars
            .iter()
            .map(|(k, _)| k.len())
            .chain(self.flags.iter().map(|(k, _)| k.len()))
            .chain(self.spectra.iter().map(|(k, _)| k.len()))
            .max()
            .unwrap_or(0);
        if !self.config.is_empty() {
            out.push_str("config\n");
            for (k, v) in &self.config {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        if !self.scalars.is_empty() {
            out.push_str("scalars\n");
            for (k, v) in &self.scalars {
                let _ = writeln!(out, "  {k:<width$}  {}", fmt_num(*v));
            }
        }
        if !self.flags.is_empty() {
            out.push_str("flags\n");
            for (k, v) in &self.flags {
                let _ = writeln!(out, "  {k:<width$}  {v}");
            }
        }
        if !self.spectra.is_empty() {
            out.push_str("eigenvalues\n");
            for (k, v) in &self.spectra {
                let vals: Vec<String> = v.iter().map(|x| fmt_num(*x)).collect();
                let _ = writeln!(out, "  {k:<width$}  [{}]", vals.join(", "));
            }
        }
        if !self.matrices.is_empty() {
            out.push_str("matrices\n");
            for (k, m) in &self.matrices {
                let _ = writeln!(out, "  {k} ({}x{})", m.rows, m.cols);
                for i in 0..m.rows {
                    let row: Vec<String> = (0..m.cols)
                        .map(|j| {
                            let idx = i * m.cols + j;
                            let im = m.im[idx];
                            let sign = if im.is_sign_negative() { '-' } else { '+' };
                            format!("{}{sign}{}i", fmt_num(m.re[idx]), fmt_num(im.abs()))
                        })
                        .collect();
                    let _ = writeln!(out, "    {}", row.join("  "));
                }
            }
        }
        if !self.verdicts.is_empty() {
            out.push_str("verdicts\n");
            for v in &self.verdicts {
                let _ = writeln!(out, "  {}", v.line());
            }
            let passed = self.verdicts.iter().filter(|v| v.pass).count();
            let _ = writeln!(out, "summary: {passed}/{} passed", self.verdicts.len());
        }
        out
    }

    /// Flat columns: kind, config, scalars, flags, eigenvalues, verdicts.
    /// Matrices appear only in the table and json-like renderings.
    pub fn flat_record(&self) -> Vec<(String, String)> {
        let mut rec = vec![("kind".to_string(), self.kind.clone())];
        for (k, v) in &self.config {
            rec.push((format!("config.{k}"), v.clone()));
        }
        for (k, v) in &self.scalars {
            rec.push((k.clone(), fmt_num(*v)));
        }
        for (k, v) in &self.flags {
            rec.push((k.clone(), v.to_string()));
        }
        for (k, vs) in &self.spectra {
            for (i, v) in vs.iter().enumerate() {
                rec.push((format!("{k}.{i}"), fmt_num(*v)));
            }
        }
        for v in &self.verdicts {
            rec.push((format!("verdict.{}.pass", v.name), v.pass.to_string()));
            rec.push((
                format!("verdict.{}.deviation", v.name),
                fmt_num(v.deviation),
            ));
        }
        rec
    }

    pub fn render_json_like(&self) -> String {
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"kind\": {},", quote(&self.kind));

        let obj = |out: &mut String, name: &str, items: Vec<(String, String)>, last: bool| {
            let _ = write!(out, "  {}: {{", quote(name));
            for (i, (k, v)) in items.iter().enumerate() {
                let sep = if i + 1 == items.len() { "" } else { "," };
                let _ = write!(out, "\n    {}: {v}{sep}", quote(k));
            }
            if !items.is_empty() {
                out.push_str("\n  ");
            }
            out.push('}');
            out.push_str(if last { "\n" } else { ",\n" });
        };
        let list = |v: &[f64]| -> String {
            let parts: Vec<String> = v.iter().map(|x| fmt_num(*x)).collect();
            format!("[{}]", parts.join(", "))
        };

        obj(
            &mut out,
            "config",
            self.config
                .iter()
                .map(|(k, v)| (k.clone(), quote(v)))
                .collect(),
            false,
        );
        obj(
            &mut out,
            "scalars",
            self.scalars
                .iter()
                .map(|(k, v)| (k.clone(), fmt_num(*v)))
                .collect(),
            false,
        );
        obj(
            &mut out,
            "flags",
            self.flags
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            false,
        );
        obj(
            &mut out,
            "eigenvalues",
            self.spectra
                .iter()
                .map(|(k, v)| (k.clone(), list(v)))
                .collect(),
            false,
        );
        obj(
            &mut out,
            "matrices",
            self.matrices
                .iter()
                .map(|(k, m)| {
                    (
                        k.clone(),
                        format!(
                            "{{\"rows\": {}, \"cols\": {}, \"re\": {}, \"im\": {}}}",
                            m.rows,
                            m.cols,
                            list(&m.re),
                            list(&m.im)
                        ),
                    )
                })
                .collect(),
            false,
        );
        out.push_str("  \"verdicts\": [");
        for (i, v) in self.verdicts.iter().enumerate() {
            let sep = if i + 1 == self.verdicts.len() {
                ""
            } else {
                ","
            };
            let _ = write!(
                out,
                "\n    {{\"name\": {}, \"pass\": {}, \"deviation\": {}, \"tolerance\": {}}}{sep}",
                quote(&v.name),
                v.pass,
                fmt_num(v.deviation),
                fmt_num(v.tolerance)
            );
        }
        if !self.verdicts.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("]\n}\n");
        out
    }

    pub fn parse_json_like(text: &str) -> Result<Self, ParseReportError> {
        let bad = |m: &str| ParseReportError(m.to_string());
        let root: Value =
            serde_json::from_str(text).map_err(|e| ParseReportError(e.to_string()))?;
        let section = |name: &str| {
            root.get(name)
                .and_then(Value::as_object)
                .ok_or_else(|| bad(&format!("missing object `{name}`")))
        };
        let num = |v: &Value| v.as_f64().ok_or_else(|| bad("expected a number"));
        let nums = |v: &Value| -> Result<Vec<f64>, ParseReportError> {
            v.as_array()
                .ok_or_else(|| bad("expected an array"))?
                .iter()
                .map(num)
                .collect()
        };

        let mut r = ScenarioReport::new(
            root.get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("missing `kind`"))?,
            Vec::new(),
        );
        for (k, v) in section("config")? {
            let s = v.as_str().ok_or_else(|| bad("config values are strings"))?;
            r.config.push((k.clone(), s.to_string()));
        }
        for (k, v) in section("scalars")? {
            r.scalars.push((k.clone(), num(v)?));
        }
        for (k, v) in section("flags")? {
            r.flags.push((
                k.clone(),
                v.as_bool().ok_or_else(|| bad("flags are booleans"))?,
            ));
        }
        for (k, v) in section("eigenvalues")? {
            r.spectra.push((k.clone(), nums(v)?));
        }
        for (k, v) in section("matrices")? {
            let dim = |f: &str| {
                v.get(f)
                    .and_then(Value::as_u64)
                    .map(|x| x as usize)
                    .ok_or_else(|| bad("matrix dimensions"))
            };
            let field = |f: &str| v.get(f).ok_or_else(|| bad("matrix entries")).and_then(nums);
            r.matrices.push((
                k.clone(),
                MatrixRecord {
                    rows: dim("rows")?,
                    cols: dim("cols")?,
                    re: field("re")?,
                    im: field("im")?,
                },
            ));
        }
        for v in root
            .get("verdicts")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `verdicts`"))?
        {
            r.verdicts.push(Verdict {
                name: v
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("verdict name"))?
                    .to_string(),
                pass: v
                    .get("pass")
                    .and_then(Value::as_bool)
                    .ok_or_else(|| bad("verdict pass"))?,
                deviation: num(v.get("deviation").ok_or_else(|| bad("verdict deviation"))?)?,
                tolerance: num(v.get("tolerance").ok_or_else(|| bad("verdict tolerance"))?)?,
            });
        }
        Ok(r)
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// One CSV row per report. Columns are the union of the reports' flat
/// records in first-seen order; absent cells are left empty.
pub fn render_csv(reports: &[ScenarioReport]) -> String {
    let records: Vec<Vec<(String, String)>> = reports.iter().map(|r| r.flat_record()).collect();
    let mut header: Vec<String> = Vec::new();
    for rec in &records {
        for (k, _) in rec {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for rec in &records {
        let row = header.iter().map(|h| {
            rec.iter()
                .find(|(k, _)| k == h)
                .map_or("", |(_, v)| v.as_str())
        });
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Renders several reports: CSV as one table, the other formats one after
/// another (json-like as an array).
pub fn render_many(reports: &[ScenarioReport], format: Format) -> String {
    match format {
        Format::Csv => render_csv(reports),
        Format::Table => reports
            .iter()
            .map(|r| r.render_table())
            .collect::<Vec<_>>()
            .join("\n"),
        Format::JsonLike => {
            let parts: Vec<String> = reports
                .iter()
                .map(|r| r.render_json_like().trim_end().to_string())
                .collect();
            format!("[\n{}\n]\n", parts.join(",\n"))
        }
    }
}
