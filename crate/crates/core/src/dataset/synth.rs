//! Seeded synthetic loan data, schema-compatible with the real pipeline
//! input.
//!
//! The `good_bad_flag` labels come from a planted logistic model over the
//! customer's age and location, so those features carry genuine signal.
//! The model intercept is calibrated by bisection so that the expected
//! bad fraction equals `bad_rate` regardless of the planted effect sizes.

use chrono::{Duration, NaiveDate};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

use crate::dataset::engineer::{CUSTOMER_ID, GOOD_BAD_FLAG, GOOD_LABEL};
use crate::dataset::{Cell, ColumnKind, RawTable, TableSchema};
use crate::error::{Error, Result};

/// Snapshot date the generator works backwards from: ages, loan dates,
/// and repayment dates are all drawn relative to this day. Use it as the
/// `reference_date` when preparing generated data.
pub const SYNTH_AS_OF: (i32, u32, u32) = (2017, 8, 1);

/// Planted effect sizes (per standardized unit) for the label model.
const EFFECT_AGE: f64 = 2.1;
const EFFECT_LATITUDE: f64 = 1.8;
const EFFECT_LONGITUDE: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_demographic: usize,
    pub n_performance: usize,
    pub n_previous: usize,
    /// Expected fraction of `bad` labels, in (0, 1).
    pub bad_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_demographic: 4346,
            n_performance: 4368,
            n_previous: 18183,
            bad_rate: 0.22,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if !(self.bad_rate > 0.0 && self.bad_rate < 1.0) {
            return Err(Error::Config(format!(
                "bad_rate must lie strictly between 0 and 1, got {}",
                self.bad_rate
            )));
        }
        if self.n_demographic == 0 || self.n_performance == 0 {
            return Err(Error::Config(
                "n_demographic and n_performance must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn demographic_schema() -> TableSchema {
    use ColumnKind::*;
    TableSchema::new(
        "demographic",
        vec![
            (CUSTOMER_ID, Identifier),
            ("birthdate", Date),
            ("longitude", Numeric),
            ("latitude", Numeric),
            ("bank_account_type", Categorical),
            ("bank_name", Categorical),
            ("employment_status", Categorical),
            ("education_level", Categorical),
            ("has_referral", Categorical),
        ],
    )
}

pub fn performance_schema() -> TableSchema {
    use ColumnKind::*;
    TableSchema::new(
        "performance",
        vec![
            (CUSTOMER_ID, Identifier),
            ("loan_id", Identifier),
            ("loan_number", Numeric),
            ("approved_date", Date),
            ("creation_date", Date),
            ("loan_amount", Numeric),
            ("total_due", Numeric),
            ("term_days", Numeric),
            ("referred_by", Identifier),
            (GOOD_BAD_FLAG, Categorical),
        ],
    )
}

pub fn previous_schema() -> TableSchema {
    use ColumnKind::*;
    TableSchema::new(
        "previous",
        vec![
            (CUSTOMER_ID, Identifier),
            ("loan_id", Identifier),
            ("loan_number", Numeric),
            ("approved_date", Date),
            ("creation_date", Date),
            ("loan_amount", Numeric),
            ("total_due", Numeric),
            ("term_days", Numeric),
            ("closed_date", Date),
            ("first_due_date", Date),
            ("first_repaid_date", Date),
            ("referred_by", Identifier),
        ],
    )
}

const BANK_NAMES: [&str; 8] = [
    "GT Bank",
    "Access Bank",
    "First Bank",
    "UBA",
    "Zenith Bank",
    "Sterling Bank",
    "Fidelity Bank",
    "Union Bank",
];

/// Regional centres the locations cluster around (longitude, latitude).
const REGIONS: [(f64, f64); 4] = [
    (3.4, 6.5),  // Lagos
    (7.5, 9.1),  // Abuja
    (8.5, 12.0), // Kano
    (7.0, 4.8),  // Port Harcourt
];

struct Customer {
    id: String,
    age_years: f64,
    longitude: f64,
    latitude: f64,
}

impl Customer {
    /// Planted log-odds contribution (before the calibrated intercept).
    fn risk_effect(&self) -> f64 {
        EFFECT_AGE * (self.age_years - 39.0) / 12.0
            + EFFECT_LATITUDE * (self.latitude - 8.1) / 2.7
            + EFFECT_LONGITUDE * (self.longitude - 6.6) / 2.0
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn pick_weighted<'a>(rng: &mut Pcg64, choices: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = choices.iter().map(|(_, w)| w).sum();
    let mut u = rng.random::<f64>() * total;
    for (value, w) in choices {
        u -= w;
        if u <= 0.0 {
            return value;
        }
    }
    choices.last().expect("non-empty choices").0
}

fn as_of_date() -> NaiveDate {
    let (y, m, d) = SYNTH_AS_OF;
    NaiveDate::from_ymd_opt(y, m, d).expect("valid as-of date")
}

/// Loan amount skewed toward small tickets, rounded to 500.
fn draw_amount(rng: &mut Pcg64) -> f64 {
    let u: f64 = rng.random();
    let raw = 5_000.0 + 45_000.0 * u * u * u;
    (raw / 500.0).round() * 500.0
}

fn draw_term(rng: &mut Pcg64) -> f64 {
    match rng.random::<f64>() {
        u if u < 0.2 => 15.0,
        u if u < 0.7 => 30.0,
        u if u < 0.9 => 60.0,
        _ => 90.0,
    }
}

fn total_due_for(rng: &mut Pcg64, amount: f64, term_days: f64) -> f64 {
    let base_rate = match term_days as i64 {
        15 => 0.075,
        30 => 0.125,
        60 => 0.22,
        _ => 0.30,
    };
    let rate = base_rate * (1.0 + 0.2 * (rng.random::<f64>() - 0.5));
    ((amount * (1.0 + rate)) * 100.0).round() / 100.0
}

/// Generates the three raw tables. Deterministic for a fixed config.
pub fn synth_generate(config: &SynthConfig) -> Result<(RawTable, RawTable, RawTable)> {
    config.validate()?;
    let mut rng = Pcg64::seed_from_u64(config.seed);
    let as_of = as_of_date();

    // Demographic table and the latent covariates the labels depend on.
    let mut demographic = RawTable::from_schema(&demographic_schema());
    let mut customers = Vec::with_capacity(config.n_demographic);
    for i in 0..config.n_demographic {
        let id = format!("cust_{i:06}");
        let age_years = 18.0 + 42.0 * rng.random::<f64>();
        let birthdate = as_of - Duration::days((age_years * 365.25).round() as i64);
        let region = REGIONS[rng.random_range(0..REGIONS.len())];
        let longitude = (region.0 + 1.6 * (rng.random::<f64>() - 0.5)).clamp(2.5, 14.5);
        let latitude = (region.1 + 1.6 * (rng.random::<f64>() - 0.5)).clamp(4.0, 14.0);

        let account_type = pick_weighted(
            &mut rng,
            &[("savings", 0.6), ("current", 0.3), ("other", 0.1)],
        );
        let bank = BANK_NAMES[rng.random_range(0..BANK_NAMES.len())];
        let employment = if rng.random::<f64>() < 0.04 {
            Cell::Missing
        } else {
            Cell::Text(
                pick_weighted(
                    &mut rng,
                    &[
                        ("permanent", 0.45),
                        ("self_employed", 0.30),
                        ("student", 0.12),
                        ("unemployed", 0.08),
                        ("retired", 0.05),
                    ],
                )
                .to_owned(),
            )
        };
        let education = if rng.random::<f64>() < 0.08 {
            Cell::Missing
        } else {
            Cell::Text(
                pick_weighted(
                    &mut rng,
                    &[
                        ("secondary", 0.35),
                        ("graduate", 0.40),
                        ("postgraduate", 0.15),
                        ("primary", 0.10),
                    ],
                )
                .to_owned(),
            )
        };
        let has_referral = if rng.random::<f64>() < 0.25 { "yes" } else { "no" };

        demographic.push_row(vec![
            Cell::Text(id.clone()),
            Cell::Date(birthdate),
            Cell::Number(longitude),
            Cell::Number(latitude),
            Cell::Text(account_type.to_owned()),
            Cell::Text(bank.to_owned()),
            employment,
            education,
            Cell::Text(has_referral.to_owned()),
        ])?;
        customers.push(Customer {
            id,
            age_years,
            longitude,
            latitude,
        });
    }

    // Performance rows: covariates first, labels once the intercept is
    // calibrated against the realized effect distribution.
    let mut performance = RawTable::from_schema(&performance_schema());
    let mut effects = Vec::with_capacity(config.n_performance);
    for j in 0..config.n_performance {
        let customer = &customers[rng.random_range(0..customers.len())];
        let loan_number = 1.0 + (rng.random::<f64>().powi(2) * 11.0).floor();
        let approved = as_of - Duration::days(rng.random_range(1..=365));
        let creation = approved - Duration::days(rng.random_range(0..=5));
        let amount = draw_amount(&mut rng);
        let term = draw_term(&mut rng);
        let due = total_due_for(&mut rng, amount, term);
        let referred_by = if rng.random::<f64>() < 0.25 {
            Cell::Text(customers[rng.random_range(0..customers.len())].id.clone())
        } else {
            Cell::Missing
        };

        performance.push_row(vec![
            Cell::Text(customer.id.clone()),
            Cell::Text(format!("loan_p{j:06}")),
            Cell::Number(loan_number),
            Cell::Date(approved),
            Cell::Date(creation),
            Cell::Number(amount),
            Cell::Number(due),
            Cell::Number(term),
            referred_by,
            Cell::Missing, // placeholder, filled after calibration
        ])?;
        effects.push(customer.risk_effect());
    }

    let intercept = calibrate_intercept(&effects, 1.0 - config.bad_rate);
    let flag_col = performance
        .column_index(GOOD_BAD_FLAG)
        .expect("schema has flag column");
    for (row, effect) in performance.rows.iter_mut().zip(&effects) {
        let p_good = sigmoid(intercept + effect);
        let label = if rng.random::<f64>() < p_good {
            GOOD_LABEL
        } else {
            "bad"
        };
        row[flag_col] = Cell::Text(label.to_owned());
    }

    // Previous loans reference a random subset of customers. Repayment
    // lateness tilts with the planted risk so history is mildly
    // informative too.
    let mut previous = RawTable::from_schema(&previous_schema());
    for k in 0..config.n_previous {
        let customer = &customers[rng.random_range(0..customers.len())];
        let loan_number = 1.0 + (rng.random::<f64>().powi(2) * 11.0).floor();
        let approved = as_of - Duration::days(rng.random_range(60..=900));
        let creation = approved - Duration::days(rng.random_range(0..=5));
        let amount = draw_amount(&mut rng);
        let term = draw_term(&mut rng);
        let due = total_due_for(&mut rng, amount, term);
        let first_due = approved + Duration::days((term as i64).min(30));
        let days_late =
            (30.0 * rng.random::<f64>() - 5.0 - 1.2 * customer.risk_effect()).round() as i64;
        let first_repaid = if rng.random::<f64>() < 0.03 {
            Cell::Missing
        } else {
            Cell::Date(first_due + Duration::days(days_late))
        };
        let closed = match &first_repaid {
            Cell::Date(d) => Cell::Date((*d).max(approved + Duration::days(term as i64))),
            _ => Cell::Missing,
        };
        let referred_by = if rng.random::<f64>() < 0.2 {
            Cell::Text(customers[rng.random_range(0..customers.len())].id.clone())
        } else {
            Cell::Missing
        };

        previous.push_row(vec![
            Cell::Text(customer.id.clone()),
            Cell::Text(format!("loan_q{k:06}")),
            Cell::Number(loan_number),
            Cell::Date(approved),
            Cell::Date(creation),
            Cell::Number(amount),
            Cell::Number(due),
            Cell::Number(term),
            closed,
            Cell::Date(first_due),
            first_repaid,
            referred_by,
        ])?;
    }

    Ok((demographic, performance, previous))
}

/// Finds `b0` such that `mean(sigmoid(b0 + effect))` hits `target`, by
/// bisection; the mean is monotone increasing in the intercept.
fn calibrate_intercept(effects: &[f64], target: f64) -> f64 {
    let mean_p = |b0: f64| {
        effects.iter().map(|e| sigmoid(b0 + e)).sum::<f64>() / effects.len() as f64
    };
    let (mut lo, mut hi) = (-30.0_f64, 30.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_p(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}
