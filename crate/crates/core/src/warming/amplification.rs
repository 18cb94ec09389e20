use serde::{Deserialize, Serialize};

use crate::distributions::CharacteristicSeries;
use crate::error::Result;
use crate::regression::{covariate_regression, Sidedness};
use crate::scalar::Scalar;

/// Whether the mean comes from the same distribution as the characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplificationMode {
    Inner,
    Outer,
}

impl AmplificationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Inner => "inner",
            Self::Outer => "outer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplificationResult<S = f64> {
    pub characteristic: String,
    pub mode: AmplificationMode,
    pub slope_on_mean: S,
    pub se_hac: S,
    /// `(slope - 1) / se`.
    pub t_stat: S,
    /// p-value of `slope = 1` against `slope > 1`.
    pub p_one_sided: S,
    pub bandwidth: usize,
}

/// Regresses a characteristic on a mean-temperature series and tests for a
/// slope above one.
pub fn amplification_test<S: Scalar>(
    series: &CharacteristicSeries<S>,
    mean: &CharacteristicSeries<S>,
    mode: AmplificationMode,
    bandwidth: Option<usize>,
) -> Result<AmplificationResult<S>> {
    let r =
        covariate_regression(series, mean, S::one(), bandwidth)?.with_sidedness(Sidedness::Greater);
    Ok(AmplificationResult {
        characteristic: series.name().to_owned(),
        mode,
        slope_on_mean: r.beta,
        se_hac: r.se_hac,
        t_stat: r.t_stat,
        p_one_sided: r.p_value(),
        bandwidth: r.bandwidth,
    })
}
