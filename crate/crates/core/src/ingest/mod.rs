//! Station files to annual temperature samples.
//!
//! Two assembly modes are supported. In cross-sectional mode every station's
//! daily (or monthly) records are reduced to station-month units and one year's
//! sample is the set of all units of that year from the balanced panel. In
//! single-station mode a year's sample is simply the station's daily means.

mod panel;
mod parse;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use panel::{
    assemble, assemble_daily_annual_samples, build_station_month_units, select_balanced_panel,
    AssembledPanel, BalancedPanel, MonthlyUnits, OmittedMonth, RowAccounting,
};
pub use parse::{
    parse_station_file, parse_station_reader, write_rejects, ParseOutcome, RejectedRow,
};

/// One dated observation of one station, in °C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationRecord {
    pub station_id: String,
    pub date: NaiveDate,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub tavg: f64,
}

/// Monthly mean of one station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationMonthUnit {
    pub station_id: String,
    pub year: i32,
    pub month: u32,
    pub value: f64,
}

/// One year's realization of the temperature distribution.
///
/// Values are held in ascending order; the sample is a multiset, so input
/// order never matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSample<S = f64> {
    year: i32,
    values: Vec<S>,
}

impl<S: Scalar> AnnualSample<S> {
    pub fn new(year: i32, mut values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort { needed: 1, got: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite temperature in sample for {year}"
            )));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self { year, values })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// Sorted observations.
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn map<F: Fn(S) -> S>(&self, f: F) -> Result<Self> {
        Self::new(self.year, self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn cast<T: Scalar>(&self) -> AnnualSample<T> {
        AnnualSample {
            year: self.year,
            values: self.values.iter().map(|v| T::of(v.as_f64())).collect(),
        }
    }
}

/// How annual samples are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PanelMode {
    #[default]
    CrossSectionalMonthly,
    SingleStationDaily,
}

/// Which station-month units a balanced panel keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PanelRule {
    /// A station is kept only if all twelve months are present in every year.
    #[default]
    Strict,
    /// A (station, calendar month) pair is kept if present in every year,
    /// independently of the station's other months.
    PerMonth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSpec {
    pub start_year: i32,
    pub end_year: i32,
    #[serde(default)]
    pub mode: PanelMode,
    /// Minimum fraction of days present for a month (or year) to count.
    #[serde(default = "default_coverage")]
    pub coverage: f64,
    #[serde(default)]
    pub rule: PanelRule,
}

fn default_coverage() -> f64 {
    0.8
}

impl PanelSpec {
    pub fn new(start_year: i32, end_year: i32) -> Self {
        Self {
            start_year,
            end_year,
            mode: PanelMode::default(),
            coverage: default_coverage(),
            rule: PanelRule::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.start_year >= self.end_year {
            return Err(Error::InvalidPanel(format!(
                "start year {} must precede end year {}",
                self.start_year, self.end_year
            )));
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return Err(Error::InvalidPanel(format!(
                "coverage threshold {} outside (0, 1]",
                self.coverage
            )));
        }
        Ok(())
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start_year..=self.end_year
    }
}

/// Whether a file carries one row per day or one row per month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Resolution {
    #[default]
    Daily,
    Monthly,
}

/// A column addressed by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub station: ColumnRef,
    pub date: ColumnRef,
    #[serde(default)]
    pub tmin: Option<ColumnRef>,
    #[serde(default)]
    pub tmax: Option<ColumnRef>,
    #[serde(default)]
    pub tavg: Option<ColumnRef>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            station: ColumnRef::Index(0),
            date: ColumnRef::Index(1),
            tmin: Some(ColumnRef::Index(2)),
            tmax: Some(ColumnRef::Index(3)),
            tavg: Some(ColumnRef::Index(4)),
        }
    }
}

/// Layout of a delimited station file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FileFormat {
    pub delimiter: char,
    pub has_header: bool,
    /// chrono format string; for monthly files `%Y-%m` style formats are accepted.
    pub date_format: String,
    pub resolution: Resolution,
    pub columns: ColumnMap,
    /// Field contents read as a missing value.
    pub missing: Vec<String>,
}

impl Default for FileFormat {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: false,
            date_format: "%Y-%m-%d".to_owned(),
            resolution: Resolution::Daily,
            columns: ColumnMap::default(),
            missing: vec![String::new(), "NA".to_owned(), "NaN".to_owned()],
        }
    }
}

pub(crate) fn days_in_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 {
        (year + 1, 1)
    } else {
        (year, month + 1)
    };
    let first = NaiveDate::from_ymd_opt(year, month, 1).expect("valid month");
    let next = NaiveDate::from_ymd_opt(ny, nm, 1).expect("valid month");
    (next - first).num_days() as u32
}

pub(crate) fn days_in_year(year: i32) -> u32 {
    if NaiveDate::from_ymd_opt(year, 2, 29).is_some() {
        366
    } else {
        365
    }
}
