//! Join + feature engineering: three raw loan tables in, one model-ready
//! [`Dataset`] out.
//!
//! The output has one row per performance row (left join on the customer
//! id, with per-customer aggregates of the previous-loans table). Where a
//! source cell is missing the engineered feature stays missing; nothing
//! is imputed.

use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::dataset::{Cell, ColumnKind, Dataset, PrepSidecar, RawTable, SIDECAR_FORMAT_VERSION};
use crate::error::{Error, Result};

/// Target column name in prepared CSVs.
pub const TARGET_COLUMN: &str = "target";
/// `good_bad_flag` value mapped to label 1; anything else is 0 (default).
pub const GOOD_LABEL: &str = "good";

pub(crate) const CUSTOMER_ID: &str = "customer_id";
pub(crate) const GOOD_BAD_FLAG: &str = "good_bad_flag";

/// Engineered numeric features, in output order. Encoded categorical
/// columns from the demographic table follow these.
pub const ENGINEERED_FEATURES: [&str; 12] = [
    "age_years",
    "loan_amount",
    "total_due",
    "term_days",
    "interest_burden",
    "loan_number",
    "longitude",
    "latitude",
    "prev_loan_count",
    "prev_mean_amount",
    "prev_mean_term_days",
    "prev_mean_days_late",
];

/// Frequency-ordered integer coding of one categorical column.
///
/// `levels[i]` carries code `i`; every other level (including levels not
/// seen when the map was fitted) maps to [`CategoricalEncoding::other_code`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEncoding {
    pub column: String,
    pub levels: Vec<String>,
}

impl CategoricalEncoding {
    /// Fits a code map: levels ordered by descending frequency (ties
    /// broken lexicographically), keeping at most `max_levels - 1`
    /// explicit levels.
    pub fn fit<'a>(
        column: &str,
        cells: impl Iterator<Item = &'a Cell>,
        max_levels: usize,
    ) -> Self {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for cell in cells {
            if let Some(text) = cell.as_text() {
                *counts.entry(text).or_insert(0) += 1;
            }
        }
        let mut ordered: Vec<(&str, usize)> = counts.into_iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ordered.truncate(max_levels - 1);
        CategoricalEncoding {
            column: column.to_owned(),
            levels: ordered.into_iter().map(|(l, _)| l.to_owned()).collect(),
        }
    }

    /// Code assigned to levels outside the explicit list.
    pub fn other_code(&self) -> f64 {
        self.levels.len() as f64
    }

    pub fn code_for(&self, level: &str) -> f64 {
        self.levels
            .iter()
            .position(|l| l == level)
            .map(|i| i as f64)
            .unwrap_or_else(|| self.other_code())
    }

    /// Encodes one cell; missing stays missing.
    pub fn encode(&self, cell: &Cell) -> Option<f64> {
        cell.as_text().map(|t| self.code_for(t))
    }
}

/// Fits code maps for every categorical column of `table`, in schema order.
pub fn encode_categoricals(table: &RawTable, max_levels: usize) -> Result<Vec<CategoricalEncoding>> {
    if max_levels < 2 {
        return Err(Error::Argument(format!(
            "max_levels must be at least 2, got {max_levels}"
        )));
    }
    Ok(table
        .columns
        .iter()
        .enumerate()
        .filter(|(_, (_, kind))| *kind == ColumnKind::Categorical)
        .map(|(idx, (name, _))| {
            CategoricalEncoding::fit(name, table.rows.iter().map(|row| &row[idx]), max_levels)
        })
        .collect())
}

/// A prepared dataset together with everything the sidecar must persist.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dataset: Dataset,
    pub encodings: Vec<CategoricalEncoding>,
    pub reference_date: NaiveDate,
}

impl Prepared {
    pub fn sidecar(&self) -> PrepSidecar {
        PrepSidecar {
            format_version: SIDECAR_FORMAT_VERSION,
            reference_date: self.reference_date,
            feature_names: self.dataset.feature_names().to_vec(),
            encodings: self.encodings.clone(),
        }
    }
}

#[derive(Default)]
struct PrevAggregate {
    count: usize,
    amount: MeanAccumulator,
    term_days: MeanAccumulator,
    days_late: MeanAccumulator,
}

#[derive(Default)]
struct MeanAccumulator {
    sum: f64,
    n: usize,
}

impl MeanAccumulator {
    fn push(&mut self, v: Option<f64>) {
        if let Some(v) = v {
            self.sum += v;
            self.n += 1;
        }
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

struct FeatureBuilder {
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl FeatureBuilder {
    fn with_capacity(n: usize) -> Self {
        FeatureBuilder {
            values: Vec::with_capacity(n),
            mask: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, v: Option<f64>) {
        match v {
            Some(v) => {
                self.values.push(v);
                self.mask.push(false);
            }
            None => {
                self.values.push(f64::NAN);
                self.mask.push(true);
            }
        }
    }
}

/// Joins the three tables and derives the engineered feature set.
///
/// One output row per performance row. Customers absent from the
/// demographic or previous-loans tables keep the corresponding features
/// missing. Categorical code maps are fitted on the demographic table
/// with `max_levels`, or taken verbatim from `reuse_encodings` so that
/// scoring-time data is encoded exactly like the training run.
pub fn join_and_engineer(
    demographic: &RawTable,
    performance: &RawTable,
    previous: &RawTable,
    reference_date: NaiveDate,
    max_levels: usize,
    reuse_encodings: Option<&[CategoricalEncoding]>,
) -> Result<Prepared> {
    // Required columns.
    let perf_cid = performance.require_column(CUSTOMER_ID)?;
    let perf_flag = performance.column_index(GOOD_BAD_FLAG).ok_or_else(|| {
        Error::Schema(format!(
            "table `{}` is missing column `{GOOD_BAD_FLAG}`",
            performance.name
        ))
    })?;
    let perf_amount = performance.require_column("loan_amount")?;
    let perf_due = performance.require_column("total_due")?;
    let perf_term = performance.require_column("term_days")?;
    let perf_number = performance.require_column("loan_number")?;

    let demo_cid = demographic.require_column(CUSTOMER_ID)?;
    let demo_birth = demographic.require_column("birthdate")?;
    let demo_lon = demographic.require_column("longitude")?;
    let demo_lat = demographic.require_column("latitude")?;
    let demo_categoricals: Vec<(usize, &str)> = demographic
        .columns
        .iter()
        .enumerate()
        .filter(|(_, (_, kind))| *kind == ColumnKind::Categorical)
        .map(|(idx, (name, _))| (idx, name.as_str()))
        .collect();

    let prev_cid = previous.require_column(CUSTOMER_ID)?;
    let prev_amount = previous.require_column("loan_amount")?;
    let prev_term = previous.require_column("term_days")?;
    let prev_due_date = previous.require_column("first_due_date")?;
    let prev_repaid = previous.require_column("first_repaid_date")?;

    // Demographic lookup; duplicate customer ids are a schema error.
    let mut demo_by_id: HashMap<&str, usize> = HashMap::new();
    for (i, row) in demographic.rows.iter().enumerate() {
        if let Some(id) = row[demo_cid].as_text() {
            if demo_by_id.insert(id, i).is_some() {
                return Err(Error::Schema(format!(
                    "duplicate customer id `{id}` in table `{}`",
                    demographic.name
                )));
            }
        }
    }

    // Per-customer aggregates of previous loans.
    let mut prev_by_id: HashMap<&str, PrevAggregate> = HashMap::new();
    for row in &previous.rows {
        let Some(id) = row[prev_cid].as_text() else {
            continue;
        };
        let agg = prev_by_id.entry(id).or_default();
        agg.count += 1;
        agg.amount.push(row[prev_amount].as_number());
        agg.term_days.push(row[prev_term].as_number());
        let late = match (row[prev_due_date].as_date(), row[prev_repaid].as_date()) {
            (Some(due), Some(repaid)) => Some((repaid - due).num_days() as f64),
            _ => None,
        };
        agg.days_late.push(late);
    }

    // Categorical code maps.
    let encodings: Vec<CategoricalEncoding> = match reuse_encodings {
        Some(existing) => demo_categoricals
            .iter()
            .map(|(_, name)| {
                existing
                    .iter()
                    .find(|e| e.column == *name)
                    .cloned()
                    .ok_or_else(|| {
                        Error::Schema(format!("no reusable encoding for column `{name}`"))
                    })
            })
            .collect::<Result<_>>()?,
        None => {
            if max_levels < 2 {
                return Err(Error::Argument(format!(
                    "max_levels must be at least 2, got {max_levels}"
                )));
            }
            demo_categoricals
                .iter()
                .map(|&(idx, name)| {
                    CategoricalEncoding::fit(
                        name,
                        demographic.rows.iter().map(move |row| &row[idx]),
                        max_levels,
                    )
                })
                .collect()
        }
    };

    let n = performance.n_rows();
    let feature_names: Vec<String> = ENGINEERED_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain(demo_categoricals.iter().map(|(_, name)| name.to_string()))
        .collect();
    let mut builders: Vec<FeatureBuilder> = (0..feature_names.len())
        .map(|_| FeatureBuilder::with_capacity(n))
        .collect();
    let mut target = Vec::with_capacity(n);

    for (r, row) in performance.rows.iter().enumerate() {
        let flag = &row[perf_flag];
        if flag.is_missing() {
            return Err(Error::Schema(format!(
                "`{GOOD_BAD_FLAG}` is missing in performance row {}",
                r + 1
            )));
        }
        target.push(u8::from(flag.as_text() == Some(GOOD_LABEL)));

        let demo_row = row[perf_cid]
            .as_text()
            .and_then(|id| demo_by_id.get(id))
            .map(|&i| &demographic.rows[i]);
        let prev_agg = row[perf_cid]
            .as_text()
            .and_then(|id| prev_by_id.get(id));

        let loan_amount = row[perf_amount].as_number();
        let total_due = row[perf_due].as_number();
        let interest_burden = match (loan_amount, total_due) {
            (Some(amount), Some(due)) if amount != 0.0 => Some((due - amount) / amount),
            _ => None,
        };
        let age_years = demo_row
            .and_then(|d| d[demo_birth].as_date())
            .map(|birth| (reference_date - birth).num_days() as f64 / 365.25);

        let mut b = builders.iter_mut();
        b.next().unwrap().push(age_years);
        b.next().unwrap().push(loan_amount);
        b.next().unwrap().push(total_due);
        b.next().unwrap().push(row[perf_term].as_number());
        b.next().unwrap().push(interest_burden);
        b.next().unwrap().push(row[perf_number].as_number());
        b.next().unwrap().push(demo_row.and_then(|d| d[demo_lon].as_number()));
        b.next().unwrap().push(demo_row.and_then(|d| d[demo_lat].as_number()));
        b.next().unwrap().push(prev_agg.map(|a| a.count as f64));
        b.next().unwrap().push(prev_agg.and_then(|a| a.amount.mean()));
        b.next().unwrap().push(prev_agg.and_then(|a| a.term_days.mean()));
        b.next().unwrap().push(prev_agg.and_then(|a| a.days_late.mean()));
        for (((idx, _), encoding), builder) in demo_categoricals.iter().zip(&encodings).zip(b) {
            builder.push(demo_row.and_then(|d| encoding.encode(&d[*idx])));
        }
    }

    let mut columns = Vec::with_capacity(builders.len());
    let mut masks = Vec::with_capacity(builders.len());
    for b in builders {
        columns.push(b.values);
        masks.push(b.mask);
    }
    let dataset = Dataset::new(feature_names, columns, masks, target)?;
    Ok(Prepared {
        dataset,
        encodings,
        reference_date,
    })
}
