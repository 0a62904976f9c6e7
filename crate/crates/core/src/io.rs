//! Time-series CSV ingestion and tensor files.
//!
//! Series CSV is long format with header `series_id,t,x1,...,xd`; the `t`
//! column may be omitted. Rows are grouped by `series_id` in order of first
//! appearance and sorted by `t` within each group. Series without a `t`
//! column keep file order and carry no timestamps.
//!
//! A tensor file holds one record per series: a `#<series_id>` line followed
//! by the text form of [`TruncatedTensor`].

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::path::PiecewiseLinearPath;
use crate::tensor::TruncatedTensor;

/// A named path read from or written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub id: String,
    pub path: PiecewiseLinearPath,
}

impl Series {
    pub fn new(id: impl Into<String>, path: PiecewiseLinearPath) -> Self {
        Self { id: id.into(), path }
    }
}

fn parse_err(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        line,
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Reads series from a CSV file.
pub fn read_series_csv(path: &Path) -> Result<Vec<Series>> {
    parse_series_csv(open(path)?, &path.display().to_string())
}

/// `(t, values, line)` of one parsed record.
type Row = (f64, Vec<f64>, usize);

/// Parses series CSV; `source` names the input in error messages.
pub fn parse_series_csv<R: Read>(input: R, source: &str) -> Result<Vec<Series>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers().map_err(|e| parse_err(source, 1, e.to_string()))?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(parse_err(source, 1, "empty file"));
    }
    if &header[0] != "series_id" {
        return Err(parse_err(source, 1, format!("first column must be `series_id`, got `{}`", &header[0])));
    }
    let has_t = header.len() > 1 && &header[1] == "t";
    let first_x = if has_t { 2 } else { 1 };
    let dim = header.len() - first_x;
    if dim == 0 {
        return Err(parse_err(source, 1, "no coordinate columns"));
    }

    let mut groups: Vec<(String, Vec<Row>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(source, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(parse_err(source, line, format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        let num = |k: usize| -> Result<f64> {
            let v: f64 = rec[k]
                .parse()
                .map_err(|_| parse_err(source, line, format!("column `{}`: cannot parse `{}`", &header[k], &rec[k])))?;
            if !v.is_finite() {
                return Err(parse_err(source, line, format!("column `{}`: non-finite value", &header[k])));
            }
            Ok(v)
        };
        let t = if has_t { num(1)? } else { 0.0 };
        let x = (first_x..header.len()).map(num).collect::<Result<Vec<_>>>()?;
        let id = rec[0].to_string();
        let g = *index.entry(id.clone()).or_insert_with(|| {
            groups.push((id, Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push((t, x, line));
    }
    if groups.is_empty() {
        return Err(parse_err(source, 1, "no data rows"));
    }

    groups
        .into_iter()
        .map(|(id, mut rows)| {
            if has_t {
                rows.sort_by(|a, b| a.0.total_cmp(&b.0));
                if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
                    return Err(parse_err(source, w[1].2, format!("series `{id}`: duplicate time {}", w[1].0)));
                }
            }
            let flat = rows.iter().flat_map(|r| r.1.iter().copied()).collect();
            let mut path = PiecewiseLinearPath::new(dim, flat)?;
            if has_t {
                path = path.with_times(rows.iter().map(|r| r.0).collect())?;
            }
            Ok(Series { id, path })
        })
        .collect()
}

/// Writes series CSV. A `t` column is written when every series is
/// timestamped.
pub fn write_series_csv<W: Write>(out: W, series: &[Series]) -> Result<()> {
    let dim = series.first().map_or(1, |s| s.path.dim());
    if series.iter().any(|s| s.path.dim() != dim) {
        return Err(Error::DimensionMismatch("series of differing dimension".into()));
    }
    let with_t = !series.is_empty() && series.iter().all(|s| s.path.has_times());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["series_id".to_string()];
    if with_t {
        header.push("t".into());
    }
    header.extend((1..=dim).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for s in series {
        let times = s.path.times();
        for (i, p) in s.path.points().enumerate() {
            let mut row = vec![s.id.clone()];
            if let (true, Some(ts)) = (with_t, times) {
                row.push(format!("{}", ts[i]));
            }
            row.extend(p.iter().map(|v| format!("{v}")));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_tensor_file<W: Write>(mut out: W, records: &[(String, TruncatedTensor)]) -> Result<()> {
    for (id, t) in records {
        writeln!(out, "#{id}")?;
        out.write_all(t.to_text().as_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_tensor_file(path: &Path) -> Result<Vec<(String, TruncatedTensor)>> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    parse_tensor_file(&text, &path.display().to_string())
}

/// Parses `#id`-delimited tensor records. A file without any `#` line is
/// read as a single unnamed record.
pub fn parse_tensor_file(text: &str, source: &str) -> Result<Vec<(String, TruncatedTensor)>> {
    // (id, first body line number, body)
    let mut records: Vec<(String, usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(id) = line.strip_prefix('#') {
            records.push((id.trim().to_string(), i + 2, String::new()));
            continue;
        }
        if records.is_empty() {
            if line.trim().is_empty() {
                continue;
            }
            records.push((String::new(), i + 1, String::new()));
        }
        let body = &mut records.last_mut().expect("record started").2;
        body.push_str(line);
        body.push('\n');
    }
    if records.is_empty() {
        return Err(parse_err(source, 1, "no tensor records"));
    }
    records
        .into_iter()
        .map(|(id, start, body)| {
            let t = TruncatedTensor::from_text(&body).map_err(|e| match e {
                Error::Parse { line, message, .. } => parse_err(source, start + line - 1, format!("record `{id}`: {message}")),
                other => other,
            })?;
            Ok((id, t))
        })
        .collect()
}
