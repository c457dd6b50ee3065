//! Tabular ingestion, feature engineering, and synthetic data.
//!
//! The pipeline moves data through two representations: [`RawTable`] holds
//! typed cells straight out of a CSV file, and [`Dataset`] is the
//! model-ready column-major numeric matrix with an explicit missing-value
//! mask. Missingness is carried through to the booster (which learns
//! default directions) rather than imputed.

mod csv_io;
mod engineer;
mod synth;

pub use csv_io::{load_csv, load_prepared, save_prepared, write_csv, PrepSidecar, SIDECAR_FORMAT_VERSION};
pub use engineer::{
    encode_categoricals, join_and_engineer, CategoricalEncoding, Prepared, ENGINEERED_FEATURES,
    GOOD_LABEL, TARGET_COLUMN,
};
pub use synth::{
    demographic_schema, performance_schema, previous_schema, synth_generate, SynthConfig,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared type of a raw CSV column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Date,
    Identifier,
}

/// One typed cell of a [`RawTable`]. Empty fields and the literal `NA`
/// parse to `Missing`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Missing,
    Number(f64),
    Date(NaiveDate),
    Text(String),
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            Cell::Date(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// Schema of a raw table: its identifier plus the declared column kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSchema {
    pub name: String,
    pub columns: Vec<(String, ColumnKind)>,
}

impl TableSchema {
    pub fn new(name: impl Into<String>, columns: Vec<(&str, ColumnKind)>) -> Self {
        TableSchema {
            name: name.into(),
            columns: columns
                .into_iter()
                .map(|(n, k)| (n.to_owned(), k))
                .collect(),
        }
    }
}

/// A typed table of cells, one entry per CSV field.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub name: String,
    pub columns: Vec<(String, ColumnKind)>,
    pub rows: Vec<Vec<Cell>>,
}

impl RawTable {
    /// Creates an empty table, rejecting duplicate column names.
    pub fn new(name: impl Into<String>, columns: Vec<(String, ColumnKind)>) -> Result<Self> {
        let name = name.into();
        for (i, (col, _)) in columns.iter().enumerate() {
            if columns[..i].iter().any(|(c, _)| c == col) {
                return Err(Error::Schema(format!(
                    "duplicate column `{col}` in table `{name}`"
                )));
            }
        }
        Ok(RawTable {
            name,
            columns,
            rows: Vec::new(),
        })
    }

    pub fn from_schema(schema: &TableSchema) -> Self {
        RawTable {
            name: schema.name.clone(),
            columns: schema.columns.clone(),
            rows: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    /// Appends a row; the cell count must match the column count.
    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Schema(format!(
                "table `{}`: row has {} cells, expected {}",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| c == name)
    }

    /// Column index by name, or a schema error naming the table.
    pub fn require_column(&self, name: &str) -> Result<usize> {
        self.column_index(name).ok_or_else(|| {
            Error::Schema(format!("table `{}` is missing column `{name}`", self.name))
        })
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.rows[row][col]
    }
}

/// Model-ready column-major feature matrix with missing mask and binary
/// target (0 = default/"bad", 1 = "good").
///
/// Cells flagged in `missing_mask` carry no numeric value; every reader
/// must consult the mask before using `columns`.
#[derive(Debug, Clone)]
pub struct Dataset {
    feature_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    missing_mask: Vec<Vec<bool>>,
    target: Vec<u8>,
    n_rows: usize,
}

impl Dataset {
    /// Assembles a dataset, validating that all columns, masks, and the
    /// target share one length and that labels are binary.
    pub fn new(
        feature_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        missing_mask: Vec<Vec<bool>>,
        target: Vec<u8>,
    ) -> Result<Self> {
        let n_rows = target.len();
        if feature_names.len() != columns.len() || columns.len() != missing_mask.len() {
            return Err(Error::Argument(format!(
                "feature name/column/mask counts differ: {}/{}/{}",
                feature_names.len(),
                columns.len(),
                missing_mask.len()
            )));
        }
        for (i, (col, mask)) in columns.iter().zip(&missing_mask).enumerate() {
            if col.len() != n_rows || mask.len() != n_rows {
                return Err(Error::Argument(format!(
                    "column `{}` has length {} (mask {}), expected {n_rows}",
                    feature_names[i],
                    col.len(),
                    mask.len()
                )));
            }
        }
        if let Some(bad) = target.iter().find(|&&y| y > 1) {
            return Err(Error::Argument(format!(
                "target labels must be 0 or 1, found {bad}"
            )));
        }
        Ok(Dataset {
            feature_names,
            columns,
            missing_mask,
            target,
            n_rows,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn target(&self) -> &[u8] {
        &self.target
    }

    pub fn column(&self, feature: usize) -> &[f64] {
        &self.columns[feature]
    }

    pub fn mask(&self, feature: usize) -> &[bool] {
        &self.missing_mask[feature]
    }

    /// Value of one cell, `None` when flagged missing.
    pub fn value(&self, feature: usize, row: usize) -> Option<f64> {
        if self.missing_mask[feature][row] {
            None
        } else {
            Some(self.columns[feature][row])
        }
    }

    /// New dataset holding the given rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        let missing_mask = self
            .missing_mask
            .iter()
            .map(|mask| rows.iter().map(|&r| mask[r]).collect())
            .collect();
        let target = rows.iter().map(|&r| self.target[r]).collect::<Vec<_>>();
        Dataset {
            feature_names: self.feature_names.clone(),
            columns,
            missing_mask,
            target,
            n_rows: rows.len(),
        }
    }
}

impl PartialEq for Dataset {
    /// Equality consults the mask: masked cells compare equal regardless
    /// of their stored placeholder, unmasked cells compare bit-exactly.
    fn eq(&self, other: &Self) -> bool {
        if self.feature_names != other.feature_names
            || self.target != other.target
            || self.missing_mask != other.missing_mask
        {
            return false;
        }
        self.columns
            .iter()
            .zip(&other.columns)
            .zip(&self.missing_mask)
            .all(|((a, b), mask)| {
                a.iter()
                    .zip(b)
                    .zip(mask)
                    .all(|((x, y), &m)| m || x.to_bits() == y.to_bits())
            })
    }
}
