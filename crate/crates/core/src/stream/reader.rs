use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ClassSpace, Instance};
use crate::error::{Error, Result};

/// Layout of a recorded stream file: `m` numeric columns then one label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvSchema {
    pub delimiter: char,
    pub has_header: bool,
    /// Expected number of feature columns; inferred from the first data
    /// row when absent.
    pub feature_count: Option<usize>,
    /// Substitute for `inf`/`NaN` cells; such cells are rejected when absent.
    pub non_finite: Option<f64>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: false,
            feature_count: None,
            non_finite: None,
        }
    }
}

/// Reads a delimiter-separated stream in file order.
///
/// Time indices start at 0 and follow row order. Labels are interned into
/// `classes`, so several files can share one label space.
pub fn read_recorded_stream(
    path: impl AsRef<Path>,
    schema: &CsvSchema,
    classes: &mut ClassSpace,
) -> Result<Vec<Instance>> {
    let path = path.as_ref();
    if !schema.delimiter.is_ascii() {
        return Err(Error::config("delimiter must be a single ASCII character"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let mut width = schema.feature_count.map(|m| m + 1);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |column: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message,
        };
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(parse_err(
                record.len().min(expected) + 1,
                format!("expected {expected} fields, found {}", record.len()),
            ));
        }
        if expected < 2 {
            return Err(parse_err(1, "need at least one feature and a label".into()));
        }
        let mut features = Vec::with_capacity(expected - 1);
        for (j, cell) in record.iter().take(expected - 1).enumerate() {
            if cell.is_empty() {
                return Err(parse_err(j + 1, "missing value".into()));
            }
            let mut v: f64 = cell
                .parse()
                .map_err(|_| parse_err(j + 1, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                v = schema
                    .non_finite
                    .ok_or_else(|| parse_err(j + 1, format!("non-finite value {cell:?}")))?;
            }
            features.push(v);
        }
        let label = &record[expected - 1];
        if label.is_empty() {
            return Err(parse_err(expected, "missing label".into()));
        }
        let id = classes.intern(label);
        out.push(Instance::labeled(out.len() as u64, features, id)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyStream(path.to_path_buf()));
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}
