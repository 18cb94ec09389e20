use serde::{Deserialize, Serialize};

use super::hac::{hac_sum_matrix, newey_west_bandwidth};
use super::ols::{SlopeFit, MIN_TREND_LEN};
use super::{normal_sf, normal_two_sided, Sidedness};
use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::scalar::{noise_floor, Scalar};

/// Slope estimate with its HAC t-test against `null_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendResult<S = f64> {
    pub alpha: S,
    pub beta: S,
    pub se_hac: S,
    /// `(beta - null_value) / se_hac`.
    pub t_stat: S,
    pub p_two_sided: S,
    /// One-sided p-value against `beta > null_value`.
    pub p_greater: S,
    pub null_value: S,
    /// Which of the two p-values `p_value()` reports.
    pub sidedness: Sidedness,
    pub n: usize,
    pub bandwidth: usize,
    /// The response was constant; the slope is zero and carries no information.
    pub degenerate: bool,
}

impl<S: Scalar> TrendResult<S> {
    pub fn p_value(&self) -> S {
        match self.sidedness {
            Sidedness::TwoSided => self.p_two_sided,
            Sidedness::Greater => self.p_greater,
        }
    }

    /// Rejects at `level` in the direction given by `sidedness`.
    pub fn rejects(&self, level: S) -> bool {
        self.p_value() < level
    }

    /// Two-sided rejection with a positive (`1`), negative (`-1`) or no (`0`) sign.
    pub fn significant_sign(&self, level: S) -> i8 {
        if self.p_two_sided >= level || self.degenerate {
            0
        } else if self.t_stat > S::zero() {
            1
        } else {
            -1
        }
    }

    pub fn with_sidedness(mut self, sidedness: Sidedness) -> Self {
        self.sidedness = sidedness;
        self
    }
}

/// `t = (estimate - null) / se` with the conventions for vanishing standard errors.
pub(crate) fn t_ratio<S: Scalar>(estimate: S, null: S, se: S, scale: S) -> S {
    let diff = estimate - null;
    if se > S::zero() {
        diff / se
    } else if diff.abs() <= noise_floor(scale) {
        S::zero()
    } else if diff > S::zero() {
        S::infinity()
    } else {
        S::neg_infinity()
    }
}

pub(crate) fn slope_inference<S: Scalar>(
    fit: &SlopeFit<S>,
    null_value: S,
    bandwidth: Option<usize>,
) -> TrendResult<S> {
    let n = fit.residuals.len();
    let bandwidth = bandwidth.unwrap_or_else(|| newey_west_bandwidth(n));
    let var = hac_sum_matrix(&[fit.slope_scores()], bandwidth).get(0, 0);
    let se_hac = var.max(S::zero()).sqrt();
    let degenerate = fit.constant_response;
    let t_stat = if degenerate && null_value == S::zero() {
        S::zero()
    } else {
        t_ratio(
            fit.beta,
            null_value,
            se_hac,
            fit.beta.abs().max(null_value.abs()),
        )
    };
    TrendResult {
        alpha: fit.alpha,
        beta: fit.beta,
        se_hac,
        t_stat,
        p_two_sided: normal_two_sided(t_stat),
        p_greater: normal_sf(t_stat),
        null_value,
        sidedness: Sidedness::TwoSided,
        n,
        bandwidth,
        degenerate,
    }
}

/// HAC t-test of `β = 0` in `C_t = α + β t + u_t`; `bandwidth` defaults to
/// the Newey-West rule for the series length.
pub fn trend_test<S: Scalar>(
    series: &CharacteristicSeries<S>,
    bandwidth: Option<usize>,
) -> Result<TrendResult<S>> {
    if series.len() < MIN_TREND_LEN {
        return Err(Error::TooShort {
            needed: MIN_TREND_LEN,
            got: series.len(),
        });
    }
    let fit = SlopeFit::new(&series.time_index(), series.values())?;
    Ok(slope_inference(&fit, S::zero(), bandwidth))
}

/// Regression of `y` on the covariate `x` with a HAC test of `slope = null_slope`.
pub fn covariate_regression<S: Scalar>(
    y: &CharacteristicSeries<S>,
    x: &CharacteristicSeries<S>,
    null_slope: S,
    bandwidth: Option<usize>,
) -> Result<TrendResult<S>> {
    y.check_aligned(x)?;
    if y.len() < MIN_TREND_LEN {
        return Err(Error::TooShort {
            needed: MIN_TREND_LEN,
            got: y.len(),
        });
    }
    let fit = SlopeFit::new(x.values(), y.values())?;
    Ok(slope_inference(&fit, null_slope, bandwidth))
}

/// Trend test on `series_i - series_j`.
pub fn spacing_test<S: Scalar>(
    series_i: &CharacteristicSeries<S>,
    series_j: &CharacteristicSeries<S>,
    bandwidth: Option<usize>,
) -> Result<TrendResult<S>> {
    trend_test(&series_i.difference(series_j)?, bandwidth)
}
