//! File formats shared by the command-line tool.
//!
//! * domain JSON: `{"intervals": [["0", "1/2"], ["1", "3/2"]]}`; endpoints
//!   may be exact rational strings or plain numbers,
//! * boundary matrix JSON: `{"n": 2, "re": [[…]], "im": [[…]]}`,
//! * spectrum CSV (`lambda,multiplicity,smin_residual`) or JSON,
//! * Gram CSV (`row,col,re,im`) and evolution CSV.
//!
//! Every loader also accepts a report object that carries the same payload
//! under `inputs` or `results`, so emitted reports can be fed back in.

use nalgebra::DMatrix;
use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::boundary_spectrum::{BoundaryMatrix, SpectrumPoint, SpectrumSet};
use crate::error::{Error, Result};
use crate::interval_domain::{IntervalUnion, SampledFunction};
use crate::rational::format_rational;

fn input(e: impl std::fmt::Display) -> Error {
    Error::Input(e.to_string())
}

/// Looks for `key` at the top level, then under `inputs` and `results`.
fn find<'a>(value: &'a Value, key: &str) -> Option<&'a Value> {
    if value.get(key).is_some() {
        return Some(value);
    }
    for wrapper in ["inputs", "results"] {
        if let Some(inner) = value.get(wrapper) {
            if inner.get(key).is_some() {
                return Some(inner);
            }
            if let Some(nested) = inner.values_by_key(key) {
                return Some(nested);
            }
        }
    }
    None
}

trait ValuesByKey {
    fn values_by_key(&self, key: &str) -> Option<&Value>;
}

impl ValuesByKey for Value {
    /// An object one level down whose own field `key` exists.
    fn values_by_key(&self, key: &str) -> Option<&Value> {
        self.as_object()?.values().find(|v| v.get(key).is_some())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Endpoint {
    Text(String),
    Number(f64),
}

impl Endpoint {
    fn text(&self) -> String {
        match self {
            Endpoint::Text(s) => s.clone(),
            Endpoint::Number(x) => x.to_string(),
        }
    }
}

pub fn domain_from_json(text: &str) -> Result<IntervalUnion> {
    let value: Value = serde_json::from_str(text).map_err(input)?;
    domain_from_value(&value)
}

pub fn domain_from_value(value: &Value) -> Result<IntervalUnion> {
    let holder = find(value, "intervals").ok_or_else(|| input("no \"intervals\" field"))?;
    let raw: Vec<[Endpoint; 2]> = serde_json::from_value(holder["intervals"].clone()).map_err(input)?;
    let pairs: Vec<(String, String)> = raw.iter().map(|[a, b]| (a.text(), b.text())).collect();
    IntervalUnion::from_text(&pairs)
}

/// Exact strings when the union was built from rationals, else the
/// shortest round-tripping decimal.
pub fn domain_to_value(domain: &IntervalUnion) -> Value {
    let pairs: Vec<[String; 2]> = match domain.exact_intervals() {
        Some(exact) => exact.iter().map(|(a, b)| [format_rational(a), format_rational(b)]).collect(),
        None => domain.intervals().iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
    };
    json!({ "intervals": pairs })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoundaryMatrixFile {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn bmatrix_to_value(b: &BoundaryMatrix) -> Value {
    let m = b.matrix();
    let n = b.n();
    let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
    let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
    serde_json::to_value(BoundaryMatrixFile { n, re, im }).expect("plain data serializes")
}

pub fn bmatrix_from_json(text: &str, tol: f64) -> Result<BoundaryMatrix> {
    let value: Value = serde_json::from_str(text).map_err(input)?;
    bmatrix_from_value(&value, tol)
}

pub fn bmatrix_from_value(value: &Value, tol: f64) -> Result<BoundaryMatrix> {
    let holder = find(value, "re").ok_or_else(|| input("no boundary matrix (\"n\", \"re\", \"im\")"))?;
    let file: BoundaryMatrixFile = serde_json::from_value(holder.clone()).map_err(input)?;
    let n = file.n;
    let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
    if n == 0 || !rows_ok(&file.re) || !rows_ok(&file.im) {
        return Err(input(format!("boundary matrix entries must be {n}×{n}")));
    }
    let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(file.re[i][j], file.im[i][j]));
    BoundaryMatrix::with_tolerance(m, tol)
}

#[derive(Debug, Deserialize)]
struct SpectrumRow {
    lambda: f64,
    multiplicity: usize,
    smin_residual: f64,
}

pub fn spectrum_to_csv(spectrum: &SpectrumSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "multiplicity", "smin_residual"]).expect("in-memory write");
    for p in &spectrum.points {
        w.write_record([format!("{:?}", p.lambda), p.multiplicity.to_string(), format!("{:?}", p.residual)])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn spectrum_from_csv(text: &str) -> Result<SpectrumSet> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for row in r.deserialize::<SpectrumRow>() {
        let row = row.map_err(input)?;
        points.push(SpectrumPoint { lambda: row.lambda, multiplicity: row.multiplicity, residual: row.smin_residual });
    }
    let window = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (a.lambda, b.lambda),
        _ => (0.0, 0.0),
    };
    Ok(SpectrumSet { window, points })
}

/// Frequencies from a spectrum file: a spectrum CSV, a `SpectrumSet` JSON,
/// `{"frequencies": […]}`, a bare array, or a report holding one of these.
pub fn frequencies_from_text(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    if !(trimmed.starts_with('{') || trimmed.starts_with('[')) {
        return Ok(spectrum_from_csv(text)?.frequencies());
    }
    let value: Value = serde_json::from_str(text).map_err(input)?;
    frequencies_from_value(&value)
}

pub fn frequencies_from_value(value: &Value) -> Result<Vec<f64>> {
    if let Some(list) = value.as_array() {
        return serde_json::from_value(Value::Array(list.clone())).map_err(input);
    }
    if let Some(holder) = find(value, "frequencies") {
        return serde_json::from_value(holder["frequencies"].clone()).map_err(input);
    }
    if let Some(holder) = find(value, "points") {
        let set: SpectrumSet = serde_json::from_value(holder.clone()).map_err(input)?;
        return Ok(set.frequencies());
    }
    Err(input("no spectrum (\"frequencies\" or \"points\") found"))
}

pub fn gram_to_csv(gram: &DMatrix<Complex64>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "re", "im"]).expect("in-memory write");
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let z = gram[(i, j)];
            w.write_record([i.to_string(), j.to_string(), format!("{:?}", z.re), format!("{:?}", z.im)])
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

/// Samples as `interval_index,x,re,im` after a `# t=…,snap_error=…` line.
pub fn evolution_to_csv(f: &SampledFunction, t: f64, snap_error: f64) -> String {
    let mut out = format!("# t={t},snap_error={snap_error}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["interval_index", "x", "re", "im"]).expect("in-memory write");
    for i in 0..f.domain().interval_count() {
        for k in 0..f.samples_per_interval() {
            let z = f.value(i, k);
            w.write_record([i.to_string(), format!("{:?}", f.grid_point(i, k)), format!("{:?}", z.re), format!("{:?}", z.im)])
                .expect("in-memory write");
        }
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"));
    out
}

/// Any serializable row type as CSV with a header.
pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(input)?;
    }
    String::from_utf8(w.into_inner().map_err(input)?).map_err(input)
}
