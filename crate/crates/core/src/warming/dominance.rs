use serde::{Deserialize, Serialize};

use crate::distributions::{quantile_label, quantile_series, CharacteristicSeries};
use crate::error::{Error, Result};
use crate::ingest::AnnualSample;
use crate::regression::{trend_test, TrendResult};
use crate::scalar::Scalar;

/// Quantile series of one region on a tau grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileSeries<S = f64> {
    taus: Vec<f64>,
    series: Vec<CharacteristicSeries<S>>,
}

impl<S: Scalar> QuantileSeries<S> {
    pub fn new(taus: Vec<f64>, series: Vec<CharacteristicSeries<S>>) -> Result<Self> {
        check_grid(&taus)?;
        if taus.len() != series.len() {
            return Err(Error::Misaligned(format!(
                "{} quantile levels but {} series",
                taus.len(),
                series.len()
            )));
        }
        for s in series.iter().skip(1) {
            series[0].check_aligned(s)?;
        }
        Ok(Self { taus, series })
    }

    pub fn from_samples(samples: &[AnnualSample<S>], taus: &[f64]) -> Result<Self> {
        check_grid(taus)?;
        let series = taus
            .iter()
            .map(|t| quantile_series(samples, *t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            taus: taus.to_vec(),
            series,
        })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn series(&self) -> &[CharacteristicSeries<S>] {
        &self.series
    }

    pub fn window(&self, start: i32, end: i32) -> Self {
        Self {
            taus: self.taus.clone(),
            series: self.series.iter().map(|s| s.window(start, end)).collect(),
        }
    }
}

pub(crate) fn check_grid(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::InvalidArgument("empty quantile grid".into()));
    }
    if taus.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::InvalidArgument(
            "quantile levels must lie in (0, 1)".into(),
        ));
    }
    if taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "quantile levels must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DominanceVerdict {
    /// No significantly negative slope and at least one significantly positive.
    ADominates,
    BDominates,
    /// Significant positives all above significant negatives: A dominates the
    /// upper tail, B the lower tail.
    PartialAUpper,
    /// Significant positives all below significant negatives: B dominates the
    /// upper tail, A the lower tail.
    PartialBUpper,
    /// No significant slope, or signs interleaved across the grid.
    None,
}

impl DominanceVerdict {
    pub fn swapped(self) -> Self {
        match self {
            Self::ADominates => Self::BDominates,
            Self::BDominates => Self::ADominates,
            Self::PartialAUpper => Self::PartialBUpper,
            Self::PartialBUpper => Self::PartialAUpper,
            Self::None => Self::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::ADominates => "A-dominates",
            Self::BDominates => "B-dominates",
            Self::PartialAUpper => "partial-A-upper",
            Self::PartialBUpper => "partial-B-upper",
            Self::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceRow<S = f64> {
    pub tau: f64,
    pub label: String,
    pub trend: TrendResult<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceResult<S = f64> {
    pub rows: Vec<DominanceRow<S>>,
    pub verdict: DominanceVerdict,
    pub level: S,
}

pub(crate) fn verdict_from_signs(signs: &[i8]) -> DominanceVerdict {
    let pos: Vec<usize> = (0..signs.len()).filter(|i| signs[*i] > 0).collect();
    let neg: Vec<usize> = (0..signs.len()).filter(|i| signs[*i] < 0).collect();
    match (pos.is_empty(), neg.is_empty()) {
        (true, true) => DominanceVerdict::None,
        (false, true) => DominanceVerdict::ADominates,
        (true, false) => DominanceVerdict::BDominates,
        (false, false) => {
            if neg.last() < pos.first() {
                DominanceVerdict::PartialAUpper
            } else if pos.last() < neg.first() {
                DominanceVerdict::PartialBUpper
            } else {
                DominanceVerdict::None
            }
        }
    }
}

/// Trend test on `q_τ(A) - q_τ(B)` for every τ of the shared grid.
///
/// A slope counts as positive or negative only when the two-sided test rejects
/// at `level`; insignificant slopes of either sign do not break dominance.
pub fn dominance_test<S: Scalar>(
    a: &QuantileSeries<S>,
    b: &QuantileSeries<S>,
    level: S,
    bandwidth: Option<usize>,
) -> Result<DominanceResult<S>> {
    if a.taus != b.taus {
        return Err(Error::Misaligned("quantile grids of A and B differ".into()));
    }
    let rows = a
        .series
        .iter()
        .zip(&b.series)
        .zip(&a.taus)
        .map(|((qa, qb), tau)| {
            let diff = qa.difference(qb)?;
            Ok(DominanceRow {
                tau: *tau,
                label: quantile_label(*tau),
                trend: trend_test(&diff, bandwidth)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let signs: Vec<i8> = rows
        .iter()
        .map(|r| r.trend.significant_sign(level))
        .collect();
    Ok(DominanceResult {
        verdict: verdict_from_signs(&signs),
        rows,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        use DominanceVerdict::*;
        assert_eq!(verdict_from_signs(&[0, 0, 0]), None);
        assert_eq!(verdict_from_signs(&[0, 1, 1]), ADominates);
        assert_eq!(verdict_from_signs(&[-1, 0, 0]), BDominates);
        assert_eq!(verdict_from_signs(&[-1, 0, 1, 1]), PartialAUpper);
        assert_eq!(verdict_from_signs(&[1, 1, -1]), PartialBUpper);
        assert_eq!(verdict_from_signs(&[1, -1, 1]), None);
        for signs in [[1i8, 0, -1], [-1, -1, 1], [0, 1, 0]] {
            let neg: Vec<i8> = signs.iter().map(|s| -s).collect();
            assert_eq!(
                verdict_from_signs(&neg),
                verdict_from_signs(&signs).swapped()
            );
        }
    }

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[0.1, 0.5, 0.9]).is_ok());
        assert!(check_grid(&[0.5, 0.1]).is_err());
        assert!(check_grid(&[0.0, 0.5]).is_err());
        assert!(check_grid(&[]).is_err());
    }

    #[test]
    fn identical_regions_have_no_dominance() {
        let samples: Vec<_> = (0..30)
            .map(|y| {
                AnnualSample::new(
                    1990 + y,
                    (0..50).map(|k| ((k * 37 + y * 11) % 23) as f64).collect(),
                )
                .unwrap()
            })
            .collect();
        let q = QuantileSeries::from_samples(&samples, &[0.1, 0.5, 0.9]).unwrap();
        let r = dominance_test(&q, &q, 0.10, None).unwrap();
        assert_eq!(r.verdict, DominanceVerdict::None);
        assert!(r.rows.iter().all(|row| row.trend.beta == 0.0));
    }

    #[test]
    fn mismatched_grids() {
        let samples: Vec<_> = (0..12)
            .map(|y| AnnualSample::new(1990 + y, vec![1.0, 2.0, 3.0, 4.0]).unwrap())
            .collect();
        let a = QuantileSeries::from_samples(&samples, &[0.1, 0.5]).unwrap();
        let b = QuantileSeries::from_samples(&samples, &[0.1, 0.6]).unwrap();
        assert!(matches!(
            dominance_test(&a, &b, 0.1, None),
            Err(Error::Misaligned(_))
        ));
    }
}
