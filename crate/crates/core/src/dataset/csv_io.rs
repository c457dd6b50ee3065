//! CSV input/output for raw tables and prepared datasets.
//!
//! Conventions: UTF-8, comma-separated, first row is a header, empty
//! fields and the literal token `NA` are missing, dates are ISO-8601
//! `YYYY-MM-DD`. Floats are written in the shortest decimal form that
//! parses back to the identical bit pattern.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, ColumnKind, Dataset, RawTable, TableSchema};
use crate::dataset::engineer::{CategoricalEncoding, TARGET_COLUMN};
use crate::error::{Error, Result};

pub const SIDECAR_FORMAT_VERSION: u32 = 1;

const MISSING_TOKEN: &str = "NA";
const DATE_FORMAT: &str = "%Y-%m-%d";

fn is_missing_field(field: &str) -> bool {
    field.is_empty() || field == MISSING_TOKEN
}

/// Loads a CSV file into a [`RawTable`], typing each declared column.
///
/// Every schema column must appear in the header; extra file columns are
/// ignored. Rows whose cell count differs from the header and fields that
/// fail numeric or date parsing produce errors naming the offending line.
pub fn load_csv(path: impl AsRef<Path>, schema: &TableSchema) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, None, e.to_string()))?
        .clone();
    let header_width = headers.len();

    // Map each schema column to its position in the file.
    let mut positions = Vec::with_capacity(schema.columns.len());
    for (name, kind) in &schema.columns {
        let pos = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("{}: missing column `{name}`", path.display())))?;
        positions.push((pos, name.as_str(), *kind));
    }

    let mut table = RawTable::from_schema(schema);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(0);
            Error::parse(line, None, e.to_string())
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(table.n_rows() + 2);
        if record.len() != header_width {
            return Err(Error::parse(
                line,
                None,
                format!("row has {} cells, expected {header_width}", record.len()),
            ));
        }

        let mut row = Vec::with_capacity(positions.len());
        for &(pos, name, kind) in &positions {
            let field = record.get(pos).unwrap_or("");
            row.push(parse_cell(field, kind, line, name)?);
        }
        table.push_row(row)?;
    }
    Ok(table)
}

fn parse_cell(field: &str, kind: ColumnKind, line: usize, column: &str) -> Result<Cell> {
    if is_missing_field(field) {
        return Ok(Cell::Missing);
    }
    match kind {
        ColumnKind::Numeric => field
            .parse::<f64>()
            .map(Cell::Number)
            .map_err(|_| Error::parse(line, Some(column), format!("`{field}` is not a number"))),
        ColumnKind::Date => NaiveDate::parse_from_str(field, DATE_FORMAT)
            .map(Cell::Date)
            .map_err(|_| {
                Error::parse(line, Some(column), format!("`{field}` is not a YYYY-MM-DD date"))
            }),
        ColumnKind::Categorical | ColumnKind::Identifier => Ok(Cell::Text(field.to_owned())),
    }
}

fn cell_to_field(cell: &Cell) -> String {
    match cell {
        Cell::Missing => String::new(),
        Cell::Number(v) => format!("{v}"),
        Cell::Date(d) => d.format(DATE_FORMAT).to_string(),
        Cell::Text(s) => s.clone(),
    }
}

/// Writes a [`RawTable`] as CSV; missing cells become empty fields.
pub fn write_csv(table: &RawTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer
        .write_record(table.columns.iter().map(|(name, _)| name.as_str()))
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    for row in &table.rows {
        writer
            .write_record(row.iter().map(cell_to_field))
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Sidecar persisted next to a prepared CSV: the engineered-feature list
/// and the categorical code maps needed to encode new data consistently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepSidecar {
    pub format_version: u32,
    pub reference_date: NaiveDate,
    pub feature_names: Vec<String>,
    pub encodings: Vec<CategoricalEncoding>,
}

impl PrepSidecar {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let sidecar: PrepSidecar = serde_json::from_str(&text)
            .map_err(|e| Error::parse(e.line(), None, e.to_string()))?;
        if sidecar.format_version != SIDECAR_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unknown sidecar format_version {}",
                sidecar.format_version
            )));
        }
        Ok(sidecar)
    }
}

/// Writes a prepared dataset: all feature columns followed by `target`.
pub fn save_prepared(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut line = String::new();
    for name in dataset.feature_names() {
        line.push_str(name);
        line.push(',');
    }
    line.push_str(TARGET_COLUMN);
    writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;

    for row in 0..dataset.n_rows() {
        line.clear();
        for feature in 0..dataset.n_features() {
            if let Some(v) = dataset.value(feature, row) {
                line.push_str(&format!("{v}"));
            }
            line.push(',');
        }
        line.push_str(if dataset.target()[row] == 1 { "1" } else { "0" });
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a prepared CSV back into a [`Dataset`]. The header must contain
/// a `target` column; every other column is a numeric feature.
pub fn load_prepared(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(BufReader::new(file));
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, None, e.to_string()))?
        .clone();
    let target_pos = headers
        .iter()
        .position(|h| h == TARGET_COLUMN)
        .ok_or_else(|| {
            Error::Schema(format!(
                "{}: missing `{TARGET_COLUMN}` column",
                path.display()
            ))
        })?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_pos)
        .map(|(_, h)| h.to_owned())
        .collect();

    let n_features = feature_names.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_features];
    let mut masks: Vec<Vec<bool>> = vec![Vec::new(); n_features];
    let mut target = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, None, e.to_string())
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(target.len() + 2);
        if record.len() != headers.len() {
            return Err(Error::parse(
                line,
                None,
                format!("row has {} cells, expected {}", record.len(), headers.len()),
            ));
        }
        let mut feature = 0usize;
        for (i, field) in record.iter().enumerate() {
            if i == target_pos {
                target.push(match field {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::parse(
                            line,
                            Some(TARGET_COLUMN),
                            format!("`{other}` is not a binary label"),
                        ))
                    }
                });
                continue;
            }
            if is_missing_field(field) {
                columns[feature].push(f64::NAN);
                masks[feature].push(true);
            } else {
                let v = field.parse::<f64>().map_err(|_| {
                    Error::parse(
                        line,
                        Some(&feature_names[feature]),
                        format!("`{field}` is not a number"),
                    )
                })?;
                columns[feature].push(v);
                masks[feature].push(false);
            }
            feature += 1;
        }
    }
    Dataset::new(feature_names, columns, masks, target)
}
