//! Labeled datasets as CSV: one row per point, a label column and the
//! features as decimal floats.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use advrobust_core::data::LabeledDataset;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvOptions {
    pub label_col: usize,
    pub pos_label: String,
    pub neg_label: String,
    pub delimiter: u8,
    /// `None` detects a header: the first row is one if any feature cell
    /// does not parse as a number.
    pub has_header: Option<bool>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label_col: 0,
            pos_label: "1".into(),
            neg_label: "-1".into(),
            delimiter: b',',
            has_header: None,
        }
    }
}

fn data_err(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<LabeledDataset> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    load_csv_from(file, path, opts)
}

/// Parses CSV from any reader; `path` is only used in messages.
pub fn load_csv_from<R: std::io::Read>(
    reader: R,
    path: &Path,
    opts: &CsvOptions,
) -> Result<LabeledDataset> {
    if opts.pos_label == opts.neg_label {
        return Err(CliError::Usage(
            "positive and negative labels must differ".into(),
        ));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(opts.delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(row as u64 + 1, |p| p.line());
            data_err(path, line, e)
        })?;
        let line = record.position().map_or(row as u64 + 1, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if opts.label_col >= record.len() {
            return Err(data_err(
                path,
                line,
                format!(
                    "label column {} out of range ({} fields)",
                    opts.label_col,
                    record.len()
                ),
            ));
        }
        let features = record
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != opts.label_col);
        if row == 0 {
            let header = opts
                .has_header
                .unwrap_or_else(|| features.clone().any(|(_, v)| v.parse::<f64>().is_err()));
            if header {
                continue;
            }
        }
        let label = &record[opts.label_col];
        let y = if label == opts.pos_label {
            1
        } else if label == opts.neg_label {
            -1
        } else {
            return Err(data_err(
                path,
                line,
                format!(
                    "label {label:?} is neither {:?} nor {:?}",
                    opts.pos_label, opts.neg_label
                ),
            ));
        };
        let x = features
            .map(|(col, v)| {
                v.parse::<f64>()
                    .ok()
                    .filter(|f| f.is_finite())
                    .ok_or_else(|| {
                        data_err(
                            path,
                            line,
                            format!("column {col}: {v:?} is not a finite number"),
                        )
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = points.first() {
            let first: &Vec<f64> = first;
            if first.len() != x.len() {
                return Err(data_err(
                    path,
                    line,
                    format!("expected {} features, found {}", first.len(), x.len()),
                ));
            }
        }
        points.push(x);
        labels.push(y);
    }
    if points.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    LabeledDataset::new(points, labels)
        .map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

/// Writes `label,x1,…,xd` rows with a header; floats keep full precision.
pub fn write_csv(path: &Path, ds: &LabeledDataset, opts: &CsvOptions) -> Result<()> {
    let io = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .delimiter(opts.delimiter)
        .from_path(path)
        .map_err(io)?;
    let mut header = vec!["label".to_string()];
    header.extend((1..=ds.dim()).map(|i| format!("x{i}")));
    w.write_record(&header).map_err(io)?;
    for (x, y) in ds.iter() {
        let mut row = vec![if y == 1 {
            opts.pos_label.clone()
        } else {
            opts.neg_label.clone()
        }];
        row.extend(x.iter().map(|v| format!("{v:?}")));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes rows of already formatted cells under a header.
pub(crate) fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| CliError::io(path, e))
}
