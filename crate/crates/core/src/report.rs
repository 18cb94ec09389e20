//! Delimited-text exports of pipeline results.
//!
//! Every table has a fixed column order and one row per result object;
//! numbers are written with `Display`, which round-trips exactly.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::CharacteristicId;
use crate::error::{Error, Result};
use crate::regression::TrendResult;
use crate::scalar::Scalar;
use crate::warming::{DominanceResult, Period, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Table {
    Summary,
    Trend,
    QuantileTrend,
    Acceleration,
    Cotrend,
    Spacing,
    Typology,
    Amplification,
    Adf,
    Dominance,
}

impl Table {
    pub const ALL: [Table; 10] = [
        Table::Summary,
        Table::Trend,
        Table::QuantileTrend,
        Table::Acceleration,
        Table::Cotrend,
        Table::Spacing,
        Table::Typology,
        Table::Amplification,
        Table::Adf,
        Table::Dominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table::Summary => "summary",
            Table::Trend => "trend",
            Table::QuantileTrend => "quantile-trend",
            Table::Acceleration => "acceleration",
            Table::Cotrend => "cotrend",
            Table::Spacing => "spacing",
            Table::Typology => "typology",
            Table::Amplification => "amplification",
            Table::Adf => "adf",
            Table::Dominance => "dominance",
        }
    }

    pub fn header(self) -> &'static [&'static str] {
        const TREND: &[&str] = &[
            "region",
            "period",
            "characteristic",
            "beta",
            "se",
            "t",
            "p_value",
            "n",
            "bandwidth",
        ];
        match self {
            Table::Summary => &[
                "region",
                "period",
                "years",
                "mean_beta",
                "mean_p_value",
                "typology",
                "low_confidence",
                "reference",
                "dominance",
            ],
            Table::Trend | Table::QuantileTrend => TREND,
            Table::Acceleration => &[
                "region",
                "period",
                "characteristic",
                "split_year",
                "design",
                "beta_full",
                "beta_late",
                "se_diff",
                "t_diff",
                "p_one_sided",
            ],
            Table::Cotrend => &[
                "region",
                "period",
                "group",
                "members",
                "statistic",
                "df",
                "p_value",
            ],
            Table::Spacing => &[
                "region",
                "period",
                "spacing",
                "beta",
                "se",
                "t",
                "p_value",
                "n",
                "bandwidth",
            ],
            Table::Typology => &[
                "region",
                "period",
                "label",
                "low_confidence",
                "level",
                "family",
                "significant_quantiles",
                "cotrend_p_value",
                "iqr_beta",
                "iqr_p_value",
                "tail_beta",
                "tail_p_value",
            ],
            Table::Amplification => &[
                "region",
                "period",
                "characteristic",
                "mode",
                "slope",
                "se",
                "t",
                "p_one_sided",
            ],
            Table::Adf => &[
                "region",
                "period",
                "characteristic",
                "statistic",
                "lags",
                "nobs",
                "cv_1pct",
                "cv_5pct",
                "cv_10pct",
                "reject_5pct",
            ],
            Table::Dominance => &[
                "region",
                "reference",
                "period",
                "tau",
                "beta",
                "se",
                "t",
                "p_value",
                "verdict",
            ],
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn trend_cells<S: Scalar>(t: &TrendResult<S>) -> [String; 6] {
    [
        t.beta.to_string(),
        t.se_hac.to_string(),
        t.t_stat.to_string(),
        t.p_value().to_string(),
        t.n.to_string(),
        t.bandwidth.to_string(),
    ]
}

fn rows<S: Scalar>(report: &Report<S>, table: Table) -> Vec<Vec<String>> {
    let region = &report.region;
    let mut out = Vec::new();
    for p in &report.periods {
        let period = p.period.to_string();
        let lead = |extra: &[String]| -> Vec<String> {
            let mut row = vec![region.clone(), period.clone()];
            row.extend_from_slice(extra);
            row
        };
        match table {
            Table::Summary => {
                let mean = p
                    .trends
                    .iter()
                    .find(|t| t.name == CharacteristicId::Mean.name())
                    .map(|t| &t.trend);
                out.push(lead(&[
                    p.years.to_string(),
                    mean.map(|t| t.beta.to_string()).unwrap_or_default(),
                    mean.map(|t| t.p_value().to_string()).unwrap_or_default(),
                    p.typology.label.to_string(),
                    p.typology.low_confidence.to_string(),
                    report.reference.clone().unwrap_or_default(),
                    p.dominance
                        .as_ref()
                        .map(|d| d.verdict.as_str().to_owned())
                        .unwrap_or_default(),
                ]));
            }
            Table::Trend | Table::QuantileTrend | Table::Spacing => {
                let src = match table {
                    Table::Trend => &p.trends,
                    Table::QuantileTrend => &p.quantile_trends,
                    _ => &p.spacing,
                };
                for t in src {
                    let mut row = lead(std::slice::from_ref(&t.name));
                    row.extend(trend_cells(&t.trend));
                    out.push(row);
                }
            }
            Table::Acceleration => {
                for a in &p.acceleration {
                    out.push(lead(&[
                        a.characteristic.clone(),
                        a.split_year.to_string(),
                        a.design.as_str().to_owned(),
                        a.beta_full.to_string(),
                        a.beta_late.to_string(),
                        a.se_diff.to_string(),
                        a.t_diff.to_string(),
                        a.p_one_sided.to_string(),
                    ]));
                }
            }
            Table::Cotrend => {
                for c in &p.cotrend {
                    out.push(lead(&[
                        c.group.clone(),
                        c.wald.members.join(" "),
                        c.wald.statistic.to_string(),
                        c.wald.df.to_string(),
                        c.wald.p_value.to_string(),
                    ]));
                }
            }
            Table::Typology => {
                let v = &p.typology;
                let ev = &v.evidence;
                let significant: Vec<&str> = ev
                    .quantile_trends
                    .iter()
                    .filter(|(_, t)| t.significant_sign(v.level) != 0)
                    .map(|(n, _)| n.as_str())
                    .collect();
                out.push(lead(&[
                    v.label.to_string(),
                    v.low_confidence.to_string(),
                    v.level.to_string(),
                    v.family.as_str().to_owned(),
                    significant.join(" "),
                    ev.cotrend_all.p_value.to_string(),
                    ev.iqr_spacing.beta.to_string(),
                    ev.iqr_spacing.p_value().to_string(),
                    ev.tail_spacing
                        .as_ref()
                        .map(|t| t.beta.to_string())
                        .unwrap_or_default(),
                    ev.tail_spacing
                        .as_ref()
                        .map(|t| t.p_value().to_string())
                        .unwrap_or_default(),
                ]));
            }
            Table::Amplification => {
                for a in &p.amplification {
                    out.push(lead(&[
                        a.characteristic.clone(),
                        a.mode.as_str().to_owned(),
                        a.slope_on_mean.to_string(),
                        a.se_hac.to_string(),
                        a.t_stat.to_string(),
                        a.p_one_sided.to_string(),
                    ]));
                }
            }
            Table::Adf => {
                for a in &p.adf {
                    out.push(lead(&[
                        a.name.clone(),
                        a.adf.statistic.to_string(),
                        a.adf.lags.to_string(),
                        a.adf.nobs.to_string(),
                        a.adf.critical_values.one_pct.to_string(),
                        a.adf.critical_values.five_pct.to_string(),
                        a.adf.critical_values.ten_pct.to_string(),
                        a.adf.reject_5pct.to_string(),
                    ]));
                }
            }
            Table::Dominance => {
                if let Some(d) = &p.dominance {
                    let reference = report.reference.as_deref().unwrap_or_default();
                    out.extend(dominance_rows(region, reference, &period, d));
                }
            }
        }
    }
    out
}

fn dominance_rows<S: Scalar>(
    region: &str,
    reference: &str,
    period: &str,
    d: &DominanceResult<S>,
) -> Vec<Vec<String>> {
    d.rows
        .iter()
        .map(|r| {
            vec![
                region.to_owned(),
                reference.to_owned(),
                period.to_owned(),
                r.label.clone(),
                r.trend.beta.to_string(),
                r.trend.se_hac.to_string(),
                r.trend.t_stat.to_string(),
                r.trend.p_two_sided.to_string(),
                d.verdict.as_str().to_owned(),
            ]
        })
        .collect()
}

/// Dominance table for comparisons run outside a full report, in the layout
/// of [`Table::Dominance`].
pub fn write_dominance<S: Scalar, W: Write>(
    region: &str,
    reference: &str,
    results: &[(Period, DominanceResult<S>)],
    delimiter: u8,
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: "dominance".into(),
        source: e.into(),
    };
    w.write_record(Table::Dominance.header()).map_err(io)?;
    for (period, d) in results {
        for row in dominance_rows(region, reference, &period.to_string(), d) {
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Io {
        path: "dominance".into(),
        source: e,
    })
}

/// Writes one table covering every period of every report.
pub fn write_table<S: Scalar, W: Write>(
    reports: &[&Report<S>],
    table: Table,
    delimiter: u8,
    out: W,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: table.name().into(),
        source: e.into(),
    };
    w.write_record(table.header()).map_err(io)?;
    for r in reports {
        for row in rows(r, table) {
            w.write_record(&row).map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::Io {
        path: table.name().into(),
        source: e,
    })
}

/// Trend slopes with characteristics as rows and `region:period` as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap<S = f64> {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<S>>,
    /// Two-sided p-values, same layout as `cells`.
    pub p_values: Vec<Vec<S>>,
}

impl<S: Scalar> Heatmap<S> {
    pub fn from_reports(reports: &[&Report<S>]) -> Self {
        let rows: Vec<String> = CharacteristicId::ALL
            .iter()
            .map(|c| c.name().to_owned())
            .collect();
        let mut columns = Vec::new();
        let mut cells = vec![Vec::new(); rows.len()];
        let mut p_values = vec![Vec::new(); rows.len()];
        for r in reports {
            for p in &r.periods {
                columns.push(format!("{}:{}", r.region, p.period));
                for (i, name) in rows.iter().enumerate() {
                    let t = p.trends.iter().find(|t| &t.name == name).map(|t| &t.trend);
                    cells[i].push(t.map_or(S::nan(), |t| t.beta));
                    p_values[i].push(t.map_or(S::nan(), |t| t.p_value()));
                }
            }
        }
        Self {
            rows,
            columns,
            cells,
            p_values,
        }
    }

    /// `characteristic,<column>...` with one β per cell.
    pub fn write<W: Write>(&self, delimiter: u8, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(out);
        let io = |e: csv::Error| Error::Io {
            path: "heatmap".into(),
            source: e.into(),
        };
        let mut header = vec!["characteristic".to_owned()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for (name, row) in self.rows.iter().zip(&self.cells) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "heatmap".into(),
            source: e,
        })
    }

    /// Bar-chart layout: per column a `beta` and a `p_value` field, so
    /// regions sit side by side.
    pub fn write_bars<W: Write>(&self, delimiter: u8, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(out);
        let io = |e: csv::Error| Error::Io {
            path: "bars".into(),
            source: e.into(),
        };
        let mut header = vec!["characteristic".to_owned()];
        for c in &self.columns {
            header.push(format!("{c}:beta"));
            header.push(format!("{c}:p_value"));
        }
        w.write_record(&header).map_err(io)?;
        for (i, name) in self.rows.iter().enumerate() {
            let mut rec = vec![name.clone()];
            for j in 0..self.columns.len() {
                rec.push(self.cells[i][j].to_string());
                rec.push(self.p_values[i][j].to_string());
            }
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "bars".into(),
            source: e,
        })
    }
}
