//! Distributional characteristics of annual samples and their time series.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AnnualSample;
use crate::scalar::{noise_floor, Scalar};

/// The characteristics tracked for every year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharacteristicId {
    Mean,
    Max,
    Min,
    Std,
    Iqr,
    Rank,
    Kur,
    Skw,
    Q05,
    Q10,
    Q20,
    Q30,
    Q40,
    Q50,
    Q60,
    Q70,
    Q80,
    Q90,
    Q95,
}

impl CharacteristicId {
    /// Table order.
    pub const ALL: [CharacteristicId; 19] = [
        Self::Mean,
        Self::Max,
        Self::Min,
        Self::Std,
        Self::Iqr,
        Self::Rank,
        Self::Kur,
        Self::Skw,
        Self::Q05,
        Self::Q10,
        Self::Q20,
        Self::Q30,
        Self::Q40,
        Self::Q50,
        Self::Q60,
        Self::Q70,
        Self::Q80,
        Self::Q90,
        Self::Q95,
    ];

    pub const QUANTILES: [CharacteristicId; 11] = [
        Self::Q05,
        Self::Q10,
        Self::Q20,
        Self::Q30,
        Self::Q40,
        Self::Q50,
        Self::Q60,
        Self::Q70,
        Self::Q80,
        Self::Q90,
        Self::Q95,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Max => "max",
            Self::Min => "min",
            Self::Std => "std",
            Self::Iqr => "iqr",
            Self::Rank => "rank",
            Self::Kur => "kur",
            Self::Skw => "skw",
            Self::Q05 => "q05",
            Self::Q10 => "q10",
            Self::Q20 => "q20",
            Self::Q30 => "q30",
            Self::Q40 => "q40",
            Self::Q50 => "q50",
            Self::Q60 => "q60",
            Self::Q70 => "q70",
            Self::Q80 => "q80",
            Self::Q90 => "q90",
            Self::Q95 => "q95",
        }
    }

    /// Probability level for the quantile characteristics.
    pub fn tau(self) -> Option<f64> {
        Some(match self {
            Self::Q05 => 0.05,
            Self::Q10 => 0.10,
            Self::Q20 => 0.20,
            Self::Q30 => 0.30,
            Self::Q40 => 0.40,
            Self::Q50 => 0.50,
            Self::Q60 => 0.60,
            Self::Q70 => 0.70,
            Self::Q80 => 0.80,
            Self::Q90 => 0.90,
            Self::Q95 => 0.95,
            _ => return None,
        })
    }

    fn index(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).expect("listed")
    }
}

impl fmt::Display for CharacteristicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CharacteristicId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown characteristic `{s}`")))
    }
}

/// Name used for a quantile level in tables, e.g. `q05`, `q25`, `q975`.
pub fn quantile_label(tau: f64) -> String {
    let pct = tau * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("q{:02}", pct.round() as i64)
    } else {
        format!("q{}", format!("{pct}").replace('.', ""))
    }
}

/// Linear interpolation between order statistics at position `(n-1)τ`
/// (1-based `h = (n-1)τ + 1`). `sorted` must be ascending and non-empty.
pub(crate) fn quantile_sorted<S: Scalar>(sorted: &[S], tau: S) -> S {
    let n = sorted.len();
    let h = S::of_usize(n - 1) * tau;
    let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
    let frac = h - S::of_usize(lo);
    if lo + 1 >= n || frac == S::zero() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn check_tau<S: Scalar>(tau: S) -> Result<()> {
    if tau > S::zero() && tau < S::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "quantile level {tau} outside (0, 1)"
        )))
    }
}

/// Empirical quantile of a sample.
pub fn quantile<S: Scalar>(sample: &AnnualSample<S>, tau: S) -> Result<S> {
    check_tau(tau)?;
    if sample.n() == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    Ok(quantile_sorted(sample.values(), tau))
}

/// All characteristics of one year.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristics<S> {
    values: [S; 19],
}

impl<S: Scalar> Characteristics<S> {
    pub fn get(&self, id: CharacteristicId) -> S {
        self.values[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (CharacteristicId, S)> + '_ {
        CharacteristicId::ALL.iter().map(|c| (*c, self.get(*c)))
    }
}

pub fn characteristics<S: Scalar>(sample: &AnnualSample<S>) -> Result<Characteristics<S>> {
    let x = sample.values();
    let n = x.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let nf = S::of_usize(n);
    let mean = x.iter().copied().sum::<S>() / nf;
    let (mut m2, mut m3, mut m4) = (S::zero(), S::zero(), S::zero());
    for v in x {
        let d = *v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let ss = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let std = (ss / S::of_usize(n - 1)).sqrt();
    let scale = x[n - 1].abs().max(x[0].abs());
    let degenerate = m2.sqrt() <= noise_floor(scale);
    let (skw, kur) = if degenerate {
        (S::zero(), S::zero())
    } else {
        (m3 / m2.powf(S::of(1.5)), m4 / (m2 * m2) - S::of(3.0))
    };
    let q = |t: f64| quantile_sorted(x, S::of(t));
    let (min, max) = (x[0], x[n - 1]);
    let mut values = [S::zero(); 19];
    for id in CharacteristicId::ALL {
        values[id.index()] = match id {
            CharacteristicId::Mean => mean,
            CharacteristicId::Max => max,
            CharacteristicId::Min => min,
            CharacteristicId::Std => std,
            CharacteristicId::Iqr => q(0.75) - q(0.25),
            CharacteristicId::Rank => max - min,
            CharacteristicId::Kur => kur,
            CharacteristicId::Skw => skw,
            other => q(other.tau().expect("quantile")),
        };
    }
    Ok(Characteristics { values })
}

/// A scalar characteristic observed over years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSeries<S = f64> {
    name: String,
    years: Vec<i32>,
    values: Vec<S>,
}

impl<S: Scalar> CharacteristicSeries<S> {
    /// Years must be strictly increasing; gaps are allowed and kept in the
    /// time regressor.
    pub fn new(name: impl Into<String>, years: Vec<i32>, values: Vec<S>) -> Result<Self> {
        let name = name.into();
        if years.len() != values.len() {
            return Err(Error::Misaligned(format!(
                "{name}: {} years but {} values",
                years.len(),
                values.len()
            )));
        }
        if years.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{name}: years not strictly increasing"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name}: non-finite value")));
        }
        Ok(Self {
            name,
            years,
            values,
        })
    }

    /// Consecutive years starting at `first_year`.
    pub fn from_values(name: impl Into<String>, first_year: i32, values: Vec<S>) -> Self {
        let years = (0..values.len() as i32).map(|i| first_year + i).collect();
        Self::new(name, years, values).expect("consecutive years and finite values")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time regressor `t = year - first_year + 1`, i.e. `1..=T` without gaps.
    pub fn time_index(&self) -> Vec<S> {
        let first = self.years.first().copied().unwrap_or(0);
        self.years
            .iter()
            .map(|y| S::of((y - first + 1) as f64))
            .collect()
    }

    /// Sub-series with `start <= year <= end`.
    pub fn window(&self, start: i32, end: i32) -> Self {
        let (years, values) = self
            .years
            .iter()
            .zip(&self.values)
            .filter(|(y, _)| (start..=end).contains(*y))
            .map(|(y, v)| (*y, *v))
            .unzip();
        Self {
            name: self.name.clone(),
            years,
            values,
        }
    }

    pub fn check_aligned(&self, other: &Self) -> Result<()> {
        if self.years != other.years {
            return Err(Error::Misaligned(format!(
                "{} and {} cover different years",
                self.name, other.name
            )));
        }
        Ok(())
    }

    /// `self - other`, named `self-other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_aligned(other)?;
        Ok(Self {
            name: format!("{}-{}", self.name, other.name),
            years: self.years.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a - *b)
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            name: self.name.clone(),
            years: self.years.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Every characteristic on a shared year axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSet<S = f64> {
    years: Vec<i32>,
    series: Vec<CharacteristicSeries<S>>,
}

impl<S: Scalar> CharacteristicSet<S> {
    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn get(&self, id: CharacteristicId) -> &CharacteristicSeries<S> {
        &self.series[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (CharacteristicId, &CharacteristicSeries<S>)> {
        CharacteristicId::ALL
            .iter()
            .copied()
            .zip(self.series.iter())
    }

    /// Rows are years, columns the characteristics in table order.
    pub fn write_matrix<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["year".to_string()];
        header.extend(CharacteristicId::ALL.iter().map(|c| c.name().to_string()));
        w.write_record(&header)?;
        for (i, year) in self.years.iter().enumerate() {
            let mut row = vec![year.to_string()];
            row.extend(self.series.iter().map(|s| s.values[i].to_string()));
            w.write_record(&row)?;
        }
        w.flush()
    }
}

pub(crate) fn check_years<S: Scalar>(samples: &[AnnualSample<S>], min_years: usize) -> Result<()> {
    if samples.len() < min_years {
        return Err(Error::TooShort {
            needed: min_years,
            got: samples.len(),
        });
    }
    if samples.windows(2).any(|w| w[0].year() >= w[1].year()) {
        return Err(Error::InvalidArgument(
            "annual samples must be in strictly increasing year order".into(),
        ));
    }
    Ok(())
}

/// Minimum number of years for a characteristic series.
pub const MIN_YEARS: usize = 10;

/// Stacks per-year characteristics into one series per characteristic.
pub fn characteristic_series<S: Scalar>(
    samples: &[AnnualSample<S>],
) -> Result<CharacteristicSet<S>> {
    check_years(samples, MIN_YEARS)?;
    let per_year = samples
        .iter()
        .map(characteristics)
        .collect::<Result<Vec<_>>>()?;
    let years: Vec<i32> = samples.iter().map(|s| s.year()).collect();
    let series = CharacteristicId::ALL
        .iter()
        .map(|id| {
            CharacteristicSeries::new(
                id.name(),
                years.clone(),
                per_year.iter().map(|c| c.get(*id)).collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicSet { years, series })
}

/// Series of the `tau` quantile, for levels outside the fixed characteristic set.
pub fn quantile_series<S: Scalar>(
    samples: &[AnnualSample<S>],
    tau: f64,
) -> Result<CharacteristicSeries<S>> {
    check_tau(S::of(tau))?;
    check_years(samples, 1)?;
    CharacteristicSeries::new(
        quantile_label(tau),
        samples.iter().map(|s| s.year()).collect(),
        samples
            .iter()
            .map(|s| quantile_sorted(s.values(), S::of(tau)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(values: &[f64]) -> AnnualSample<f64> {
        AnnualSample::new(2000, values.to_vec()).unwrap()
    }

    #[test]
    fn median_of_odd_count() {
        assert_eq!(
            quantile(&sample(&[5.0, 3.0, 1.0, 2.0, 4.0]), 0.5).unwrap(),
            3.0
        );
    }

    #[test]
    fn interpolates_between_two_points() {
        // h = (2-1)*0.25 + 1 = 1.25 -> 0 + 0.25 * (10 - 0)
        assert_eq!(quantile(&sample(&[0.0, 10.0]), 0.25).unwrap(), 2.5);
    }

    #[test]
    fn rejects_levels_outside_unit_interval() {
        let s = sample(&[1.0, 2.0]);
        assert!(quantile(&s, 0.0).is_err());
        assert!(quantile(&s, 1.0).is_err());
        assert!(quantile(&s, f64::NAN).is_err());
    }

    #[test]
    fn constant_sample_has_no_spread() {
        let c = characteristics(&sample(&[7.5; 12])).unwrap();
        assert_eq!(c.get(CharacteristicId::Std), 0.0);
        assert_eq!(c.get(CharacteristicId::Iqr), 0.0);
        assert_eq!(c.get(CharacteristicId::Rank), 0.0);
        assert_eq!(c.get(CharacteristicId::Mean), 7.5);
        assert_eq!(c.get(CharacteristicId::Skw), 0.0);
        assert_eq!(c.get(CharacteristicId::Kur), 0.0);
    }

    #[test]
    fn moments_of_small_sample() {
        // 1,2,3,4: mean 2.5, m2 1.25, m3 0, m4 2.5625 -> kur 1.64 - 3
        let c = characteristics(&sample(&[4.0, 1.0, 3.0, 2.0])).unwrap();
        assert_eq!(c.get(CharacteristicId::Mean), 2.5);
        assert!((c.get(CharacteristicId::Std) - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(c.get(CharacteristicId::Skw).abs() < 1e-15);
        assert!((c.get(CharacteristicId::Kur) - (2.5625 / 1.5625 - 3.0)).abs() < 1e-14);
        assert_eq!(c.get(CharacteristicId::Iqr), 1.5);
        assert_eq!(c.get(CharacteristicId::Rank), 3.0);
    }

    #[test]
    fn too_few_values() {
        assert!(matches!(
            characteristics(&sample(&[1.0, 2.0, 3.0])),
            Err(Error::TooShort { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn labels_and_parsing() {
        assert_eq!(quantile_label(0.05), "q05");
        assert_eq!(quantile_label(0.5), "q50");
        assert_eq!(quantile_label(0.975), "q975");
        assert_eq!(
            "Q95".parse::<CharacteristicId>().unwrap(),
            CharacteristicId::Q95
        );
        assert!("q25".parse::<CharacteristicId>().is_err());
        assert_eq!(CharacteristicId::ALL.len(), 19);
    }

    #[test]
    fn series_rejects_bad_year_axis() {
        assert!(CharacteristicSeries::new("x", vec![2000, 2000], vec![1.0, 2.0]).is_err());
        assert!(CharacteristicSeries::new("x", vec![2000], vec![1.0, 2.0]).is_err());
        let gappy =
            CharacteristicSeries::new("x", vec![2000, 2001, 2004], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(gappy.time_index(), vec![1.0, 2.0, 5.0]);
    }

    #[test]
    fn matrix_export_has_year_and_all_columns() {
        let samples: Vec<_> = (0..10)
            .map(|i| AnnualSample::new(1950 + i, (0..8).map(|k| (k + i) as f64).collect()).unwrap())
            .collect();
        let set = characteristic_series(&samples).unwrap();
        let mut buf = Vec::new();
        set.write_matrix(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header: Vec<_> = lines.next().unwrap().split(',').collect();
        assert_eq!(header.len(), 20);
        assert_eq!(header[1], "mean");
        assert_eq!(header[19], "q95");
        assert_eq!(lines.count(), 10);
    }

    #[test]
    fn needs_ten_years() {
        let samples: Vec<_> = (0..9)
            .map(|i| AnnualSample::new(1950 + i, vec![1.0, 2.0, 3.0, 4.0]).unwrap())
            .collect();
        assert!(characteristic_series(&samples).is_err());
    }
}
