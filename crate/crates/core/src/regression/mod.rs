//! Trend regressions with Newey-West (Bartlett kernel) standard errors, the
//! joint Wald test on trend slopes, and the ADF unit-root pre-test.

mod adf;
mod hac;
mod ols;
mod trend;
mod wald;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::scalar::Scalar;

pub use adf::{adf_test, default_adf_lags, AdfResult, CriticalValues, Deterministic};
pub use hac::{hac_covariance, hac_variance, newey_west_bandwidth};
pub use ols::{ols_trend, OlsFit};
pub use trend::{covariate_regression, spacing_test, trend_test, TrendResult};
pub use wald::{multi_trend_wald, WaldResult};

pub(crate) use hac::hac_sum_matrix;
pub(crate) use ols::SlopeFit;
pub(crate) use trend::t_ratio;

/// Alternative hypothesis of a slope test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    #[default]
    TwoSided,
    /// Slope greater than the null value.
    Greater,
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// `P(Z > z)` for a standard normal `Z`.
pub(crate) fn normal_sf<S: Scalar>(z: S) -> S {
    let z = z.as_f64();
    if z.is_nan() {
        return S::nan();
    }
    S::of(std_normal().sf(z))
}

pub(crate) fn normal_two_sided<S: Scalar>(z: S) -> S {
    (normal_sf(z.abs()) * S::of(2.0)).min(S::one())
}

pub(crate) fn chi_square_sf<S: Scalar>(x: S, df: usize) -> S {
    let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
    S::of(dist.sf(x.as_f64().max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_tails() {
        assert!((normal_two_sided(1.959963984540054f64) - 0.05).abs() < 1e-10);
        assert!((normal_sf(1.6448536269514722f64) - 0.05).abs() < 1e-10);
        assert_eq!(normal_two_sided(0.0f64), 1.0);
        assert_eq!(normal_sf(f64::INFINITY), 0.0);
        assert_eq!(normal_sf(f64::NEG_INFINITY), 1.0);
    }

    #[test]
    fn chi_square_tail() {
        // 95th percentile of chi2(10)
        assert!((chi_square_sf(18.307038053275146f64, 10) - 0.05).abs() < 1e-9);
        assert_eq!(chi_square_sf(0.0f64, 3), 1.0);
    }
}
