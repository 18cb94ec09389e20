use serde::{Deserialize, Serialize};

use super::chi_square_sf;
use super::hac::{hac_sum_matrix, newey_west_bandwidth};
use super::ols::{SlopeFit, MIN_TREND_LEN};
use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldResult<S = f64> {
    pub statistic: S,
    pub df: usize,
    pub p_value: S,
    /// Human-readable null, e.g. `beta(q05) = beta(q10) = beta(q20)`.
    pub restriction: String,
    pub members: Vec<String>,
    pub slopes: Vec<S>,
    pub bandwidth: usize,
}

/// Wald test that the trend slopes of `series` are all equal.
///
/// Each series is regressed on the same time index, so system OLS reduces to
/// equation-by-equation OLS; the joint slope covariance is the HAC estimate
/// over the stacked slope scores. The restriction matrix has rows
/// `e_i - e_{i+1}`.
pub fn multi_trend_wald<S: Scalar>(
    series: &[&CharacteristicSeries<S>],
    bandwidth: Option<usize>,
) -> Result<WaldResult<S>> {
    let m = series.len();
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "co-trending needs at least two series, got {m}"
        )));
    }
    for s in &series[1..] {
        series[0].check_aligned(s)?;
    }
    let len = series[0].len();
    if len < MIN_TREND_LEN {
        return Err(Error::TooShort {
            needed: MIN_TREND_LEN,
            got: len,
        });
    }
    let time = series[0].time_index();
    let fits = series
        .iter()
        .map(|s| SlopeFit::new(&time, s.values()))
        .collect::<Result<Vec<_>>>()?;
    let bandwidth = bandwidth.unwrap_or_else(|| newey_west_bandwidth(len));
    let scores: Vec<Vec<S>> = fits.iter().map(SlopeFit::slope_scores).collect();
    let cov = hac_sum_matrix(&scores, bandwidth);

    let restrictions: Vec<Vec<S>> = (0..m - 1)
        .map(|i| {
            let mut row = vec![S::zero(); m];
            row[i] = S::one();
            row[i + 1] = -S::one();
            row
        })
        .collect();
    let slopes: Vec<S> = fits.iter().map(|f| f.beta).collect();
    let contrasts: Vec<S> = (0..m - 1).map(|i| slopes[i] - slopes[i + 1]).collect();
    let restricted_cov = cov.congruence(&restrictions);
    // A contrast along a direction with no sampling variance is rejected with
    // certainty; an indefinite covariance is a numerical failure.
    let scale = (0..m).map(|i| cov.get(i, i)).fold(S::zero(), S::max) * S::of(4.0);
    let statistic = Cholesky::factor_with_scale(&restricted_cov, scale)
        .ok_or(Error::Singular)?
        .quadratic_form_inverse(&contrasts)
        .unwrap_or(S::infinity())
        .max(S::zero());
    let df = m - 1;
    let members: Vec<String> = series.iter().map(|s| s.name().to_owned()).collect();
    let restriction = members
        .iter()
        .map(|n| format!("beta({n})"))
        .collect::<Vec<_>>()
        .join(" = ");
    Ok(WaldResult {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
        restriction,
        members,
        slopes,
        bandwidth,
    })
}
