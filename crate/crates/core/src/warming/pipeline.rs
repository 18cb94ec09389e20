use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::acceleration::{
    acceleration_test, AccelerationDesign, AccelerationResult, MIN_LATE_YEARS,
};
use super::amplification::{amplification_test, AmplificationMode, AmplificationResult};
use super::dominance::{check_grid, dominance_test, DominanceResult, QuantileSeries};
use super::typology::{
    classify_typology, QuantileFamily, TypologyEvidence, TypologyLabel, TypologyVerdict,
};
use crate::distributions::{
    characteristic_series, quantile_label, quantile_series, CharacteristicId, MIN_YEARS,
};
use crate::error::{Error, Result};
use crate::ingest::AnnualSample;
use crate::regression::{
    adf_test, default_adf_lags, multi_trend_wald, spacing_test, trend_test, AdfResult,
    Deterministic, TrendResult, WaldResult,
};
use crate::scalar::Scalar;

/// Inclusive year range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Period {
    pub start: i32,
    pub end: i32,
}

impl Period {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidArgument(format!(
                "period {start}-{end} is empty"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("period `{s}` is not of the form START-END"));
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        Self::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

/// Quantile grid of the published tables.
pub const DEFAULT_TAUS: [f64; 11] = [
    0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95,
];

/// Level of the typology and dominance verdicts.
pub const DEFAULT_LEVEL: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Empty means the full range of the data.
    pub periods: Vec<Period>,
    /// First year of the late segment of the acceleration test.
    pub split_year: Option<i32>,
    pub taus: Vec<f64>,
    pub level: f64,
    pub bandwidth: Option<usize>,
    pub adf_max_lags: Option<usize>,
    pub adf_deterministic: Deterministic,
    pub acceleration_design: AccelerationDesign,
    pub family: QuantileFamily,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            periods: Vec::new(),
            split_year: None,
            taus: DEFAULT_TAUS.to_vec(),
            level: DEFAULT_LEVEL,
            bandwidth: None,
            adf_max_lags: None,
            adf_deterministic: Deterministic::Constant,
            acceleration_design: AccelerationDesign::FullVsSuffix,
            family: QuantileFamily::PerTest,
        }
    }
}

/// A region's annual samples in increasing year order.
#[derive(Debug, Clone, Copy)]
pub struct Region<'a, S> {
    pub name: &'a str,
    pub samples: &'a [AnnualSample<S>],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTrend<S = f64> {
    pub name: String,
    pub trend: TrendResult<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAdf<S = f64> {
    pub name: String,
    pub adf: AdfResult<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotrendRow<S = f64> {
    pub group: String,
    pub wald: WaldResult<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport<S = f64> {
    pub period: Period,
    pub years: usize,
    /// Unit-root pre-tests; empty when the period is too short for them.
    pub adf: Vec<NamedAdf<S>>,
    /// One row per characteristic, in table order.
    pub trends: Vec<NamedTrend<S>>,
    /// One row per level of the quantile grid.
    pub quantile_trends: Vec<NamedTrend<S>>,
    /// Empty unless the split year leaves both segments inside the period.
    pub acceleration: Vec<AccelerationResult<S>>,
    pub cotrend: Vec<CotrendRow<S>>,
    pub spacing: Vec<NamedTrend<S>>,
    pub typology: TypologyVerdict<S>,
    pub amplification: Vec<AmplificationResult<S>>,
    pub dominance: Option<DominanceResult<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<S = f64> {
    pub region: String,
    pub reference: Option<String>,
    pub level: f64,
    pub taus: Vec<f64>,
    pub split_year: Option<i32>,
    pub periods: Vec<PeriodReport<S>>,
}

impl<S: Scalar> Report<S> {
    /// Typology label per period, in configured order.
    pub fn typology_path(&self) -> Vec<(Period, TypologyLabel)> {
        self.periods
            .iter()
            .map(|p| (p.period, p.typology.label))
            .collect()
    }
}

fn window<S: Scalar>(samples: &[AnnualSample<S>], period: Period) -> Vec<AnnualSample<S>> {
    samples
        .iter()
        .filter(|s| period.contains(s.year()))
        .cloned()
        .collect()
}

fn check_period<S: Scalar>(name: &str, samples: &[AnnualSample<S>], period: Period) -> Result<()> {
    let (first, last) = match (samples.first(), samples.last()) {
        (Some(f), Some(l)) => (f.year(), l.year()),
        _ => {
            return Err(Error::TooShort {
                needed: MIN_YEARS,
                got: 0,
            })
        }
    };
    if period.start < first || period.end > last {
        return Err(Error::InvalidArgument(format!(
            "{name}: period {period} outside data range {first}-{last}"
        )));
    }
    Ok(())
}

/// Quantile groups of the co-trending table: lower (τ ≤ 0.3), medium
/// (0.4 ≤ τ ≤ 0.6), upper (τ ≥ 0.7) and their unions.
pub fn cotrend_groups(taus: &[f64]) -> Vec<(String, Vec<usize>)> {
    let eps = 1e-9;
    let idx = |pred: &dyn Fn(f64) -> bool| -> Vec<usize> {
        (0..taus.len()).filter(|i| pred(taus[*i])).collect()
    };
    let lower = idx(&|t| t <= 0.30 + eps);
    let medium = idx(&|t| t >= 0.40 - eps && t <= 0.60 + eps);
    let upper = idx(&|t| t >= 0.70 - eps);
    let union = |a: &[usize], b: &[usize]| {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    vec![
        ("all".to_owned(), (0..taus.len()).collect()),
        ("lower".to_owned(), lower.clone()),
        ("medium".to_owned(), medium.clone()),
        ("upper".to_owned(), upper.clone()),
        ("lower-medium".to_owned(), union(&lower, &medium)),
        ("medium-upper".to_owned(), union(&medium, &upper)),
        ("lower-upper".to_owned(), union(&lower, &upper)),
    ]
    .into_iter()
    .filter(|(_, members)| members.len() >= 2)
    .collect()
}

/// Spacings tested for dispersion trends, as `(upper τ, lower τ)`.
pub const SPACINGS: [(f64, f64); 4] = [(0.50, 0.05), (0.95, 0.50), (0.95, 0.05), (0.75, 0.25)];

fn spacing_name(hi: f64, lo: f64) -> String {
    format!("{}-{}", quantile_label(hi), quantile_label(lo))
}

/// Quantile trends, all-quantile co-trending Wald test and the iqr and
/// `q95 - q05` spacing tests of one period's samples.
pub fn typology_evidence<S: Scalar>(
    samples: &[AnnualSample<S>],
    taus: &[f64],
    bandwidth: Option<usize>,
) -> Result<TypologyEvidence<S>> {
    check_grid(taus)?;
    let quantiles = QuantileSeries::from_samples(samples, taus)?;
    let quantile_trends = quantiles
        .series()
        .iter()
        .map(|s| Ok((s.name().to_owned(), trend_test(s, bandwidth)?)))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = quantiles.series().iter().collect();
    let cotrend_all = if refs.len() >= 2 {
        multi_trend_wald(&refs, bandwidth)?
    } else {
        return Err(Error::InvalidArgument(
            "typology needs at least two quantile levels".into(),
        ));
    };
    let q = |t: f64| quantile_series(samples, t);
    let iqr_spacing = spacing_test(&q(0.75)?, &q(0.25)?, bandwidth)?;
    let tail_spacing = Some(spacing_test(&q(0.95)?, &q(0.05)?, bandwidth)?);
    Ok(TypologyEvidence {
        quantile_trends,
        cotrend_all,
        iqr_spacing,
        tail_spacing,
    })
}

fn adf_lags(len: usize, requested: Option<usize>, det: Deterministic) -> Option<usize> {
    let det_terms = match det {
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    let cap = len.checked_sub(det_terms + 12)? / 2;
    Some(requested.unwrap_or_else(|| default_adf_lags(len)).min(cap))
}

fn analyze_period<S: Scalar>(
    region: Region<'_, S>,
    reference: Option<Region<'_, S>>,
    period: Period,
    config: &PipelineConfig,
) -> Result<PeriodReport<S>> {
    check_period(region.name, region.samples, period)?;
    let samples = window(region.samples, period);
    let set = characteristic_series(&samples)?;
    let bw = config.bandwidth;
    let level = S::of(config.level);

    let adf = if samples.len() >= 20 {
        let lags = adf_lags(samples.len(), config.adf_max_lags, config.adf_deterministic);
        CharacteristicId::ALL
            .par_iter()
            .map(|id| {
                Ok(NamedAdf {
                    name: id.name().to_owned(),
                    adf: adf_test(set.get(*id).values(), lags, config.adf_deterministic)?,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let trends = CharacteristicId::ALL
        .par_iter()
        .map(|id| {
            Ok(NamedTrend {
                name: id.name().to_owned(),
                trend: trend_test(set.get(*id), bw)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let acceleration = match config.split_year {
        Some(split)
            if split > period.start
                && samples.iter().filter(|s| s.year() >= split).count() >= MIN_LATE_YEARS =>
        {
            CharacteristicId::ALL
                .par_iter()
                .map(|id| acceleration_test(set.get(*id), split, config.acceleration_design, bw))
                .collect::<Result<Vec<_>>>()?
        }
        Some(split) => {
            log::info!(
                "{}: split year {split} not inside {period}; acceleration skipped",
                region.name
            );
            Vec::new()
        }
        None => Vec::new(),
    };

    let quantiles = QuantileSeries::from_samples(&samples, &config.taus)?;
    let quantile_trends = quantiles
        .series()
        .par_iter()
        .map(|s| {
            Ok(NamedTrend {
                name: s.name().to_owned(),
                trend: trend_test(s, bw)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let cotrend = cotrend_groups(&config.taus)
        .into_iter()
        .map(|(group, members)| {
            let refs: Vec<_> = members.iter().map(|i| &quantiles.series()[*i]).collect();
            Ok(CotrendRow {
                group,
                wald: multi_trend_wald(&refs, bw)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let spacing = SPACINGS
        .iter()
        .map(|(hi, lo)| {
            Ok(NamedTrend {
                name: spacing_name(*hi, *lo),
                trend: spacing_test(
                    &quantile_series(&samples, *hi)?,
                    &quantile_series(&samples, *lo)?,
                    bw,
                )?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let evidence = TypologyEvidence {
        quantile_trends: quantile_trends
            .iter()
            .map(|t| (t.name.clone(), t.trend.clone()))
            .collect(),
        cotrend_all: cotrend
            .iter()
            .find(|c| c.group == "all")
            .map(|c| c.wald.clone())
            .ok_or_else(|| {
                Error::InvalidArgument("typology needs at least two quantile levels".into())
            })?,
        iqr_spacing: spacing[3].trend.clone(),
        tail_spacing: Some(spacing[2].trend.clone()),
    };
    let typology = classify_typology(evidence, level, config.family);

    let own_mean = set.get(CharacteristicId::Mean);
    let mut amplification = quantiles
        .series()
        .iter()
        .map(|q| amplification_test(q, own_mean, AmplificationMode::Inner, bw))
        .collect::<Result<Vec<_>>>()?;

    let mut dominance = None;
    if let Some(reference) = reference {
        check_period(reference.name, reference.samples, period)?;
        let ref_samples = window(reference.samples, period);
        let ref_set = characteristic_series(&ref_samples)?;
        let ref_mean = ref_set.get(CharacteristicId::Mean);
        for q in quantiles.series() {
            amplification.push(amplification_test(
                q,
                ref_mean,
                AmplificationMode::Outer,
                bw,
            )?);
        }
        let ref_quantiles = QuantileSeries::from_samples(&ref_samples, &config.taus)?;
        dominance = Some(dominance_test(&quantiles, &ref_quantiles, level, bw)?);
    }

    Ok(PeriodReport {
        period,
        years: samples.len(),
        adf,
        trends,
        quantile_trends,
        acceleration,
        cotrend,
        spacing,
        typology,
        amplification,
        dominance,
    })
}

/// Runs the full battery for every configured period: unit-root pre-tests,
/// trend tests, acceleration, co-trending and spacing tables, typology,
/// amplification (inner, and outer against `reference`) and dominance over
/// `reference`.
pub fn run_pipeline<S: Scalar>(
    region: Region<'_, S>,
    reference: Option<Region<'_, S>>,
    config: &PipelineConfig,
) -> Result<Report<S>> {
    check_grid(&config.taus)?;
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "significance level {} outside (0, 1)",
            config.level
        )));
    }
    crate::distributions::check_years(region.samples, MIN_YEARS)?;
    let periods = if config.periods.is_empty() {
        let first = region.samples[0].year();
        let last = region.samples[region.samples.len() - 1].year();
        vec![Period::new(first, last)?]
    } else {
        config.periods.clone()
    };
    let reports = periods
        .iter()
        .map(|p| analyze_period(region, reference, *p, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        region: region.name.to_owned(),
        reference: reference.map(|r| r.name.to_owned()),
        level: config.level,
        taus: config.taus.clone(),
        split_year: config.split_year,
        periods: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_parsing() {
        let p: Period = "1950-2019".parse().unwrap();
        assert_eq!(
            p,
            Period {
                start: 1950,
                end: 2019
            }
        );
        assert_eq!(p.to_string(), "1950-2019");
        assert!("2019-1950".parse::<Period>().is_err());
        assert!("1950".parse::<Period>().is_err());
    }

    #[test]
    fn default_groups_match_tables() {
        let g = cotrend_groups(&DEFAULT_TAUS);
        let names: Vec<_> = g.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            [
                "all",
                "lower",
                "medium",
                "upper",
                "lower-medium",
                "medium-upper",
                "lower-upper"
            ]
        );
        let sizes: Vec<_> = g.iter().map(|(_, m)| m.len()).collect();
        assert_eq!(sizes, [11, 4, 3, 4, 7, 7, 8]);
    }

    #[test]
    fn spacing_names() {
        let names: Vec<_> = SPACINGS.iter().map(|(h, l)| spacing_name(*h, *l)).collect();
        assert_eq!(names, ["q50-q05", "q95-q50", "q95-q05", "q75-q25"]);
    }

    #[test]
    fn adf_lag_cap_for_short_periods() {
        assert_eq!(adf_lags(70, None, Deterministic::Constant), Some(10));
        assert_eq!(adf_lags(20, None, Deterministic::Constant), Some(3));
        assert_eq!(adf_lags(10, None, Deterministic::Constant), None);
    }
}
