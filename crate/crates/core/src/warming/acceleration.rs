use serde::{Deserialize, Serialize};

use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::regression::{hac_sum_matrix, newey_west_bandwidth, normal_sf, t_ratio, SlopeFit};
use crate::scalar::Scalar;

/// Which sample the reference slope is estimated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AccelerationDesign {
    /// Reference slope over the whole sample, late slope over the suffix.
    #[default]
    FullVsSuffix,
    /// Reference slope over the years before the split only.
    PrefixVsSuffix,
}

impl AccelerationDesign {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FullVsSuffix => "full-vs-suffix",
            Self::PrefixVsSuffix => "prefix-vs-suffix",
        }
    }
}

/// Minimum number of years after the split.
pub const MIN_LATE_YEARS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccelerationResult<S = f64> {
    pub characteristic: String,
    /// First year of the late segment.
    pub split_year: i32,
    pub design: AccelerationDesign,
    /// Slope on the reference segment (whole sample by default).
    pub beta_full: S,
    pub beta_late: S,
    pub se_diff: S,
    /// `(beta_late - beta_full) / se_diff`.
    pub t_diff: S,
    /// p-value against `beta_late > beta_full`.
    pub p_one_sided: S,
    pub bandwidth: usize,
}

/// Tests whether the trend slope over the years from `split_year` on exceeds
/// the reference slope.
///
/// Both regressions share the time axis of the full sample. Because the
/// samples overlap, the variance of the slope difference is the HAC sum of the
/// difference of the two slope-score sequences, each zero outside its segment.
pub fn acceleration_test<S: Scalar>(
    series: &CharacteristicSeries<S>,
    split_year: i32,
    design: AccelerationDesign,
    bandwidth: Option<usize>,
) -> Result<AccelerationResult<S>> {
    let years = series.years();
    let (first, last) = match (years.first(), years.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => {
            return Err(Error::TooShort {
                needed: MIN_LATE_YEARS + 1,
                got: 0,
            })
        }
    };
    if split_year <= first || split_year > last {
        return Err(Error::InvalidArgument(format!(
            "split year {split_year} not strictly inside {first}-{last}"
        )));
    }
    let time = series.time_index();
    let late: Vec<bool> = years.iter().map(|y| *y >= split_year).collect();
    let n_late = late.iter().filter(|l| **l).count();
    if n_late < MIN_LATE_YEARS {
        return Err(Error::TooShort {
            needed: MIN_LATE_YEARS,
            got: n_late,
        });
    }
    let in_ref: Vec<bool> = match design {
        AccelerationDesign::FullVsSuffix => vec![true; years.len()],
        AccelerationDesign::PrefixVsSuffix => late.iter().map(|l| !l).collect(),
    };
    let n_ref = in_ref.iter().filter(|r| **r).count();
    if n_ref < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: n_ref,
        });
    }

    let pick = |mask: &[bool], v: &[S]| -> Vec<S> {
        v.iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(x, _)| *x)
            .collect()
    };
    let values = series.values();
    let ref_fit = SlopeFit::new(&pick(&in_ref, &time), &pick(&in_ref, values))?;
    let late_fit = SlopeFit::new(&pick(&late, &time), &pick(&late, values))?;

    // spread segment scores back onto the full axis
    let spread = |mask: &[bool], scores: Vec<S>| -> Vec<S> {
        let mut it = scores.into_iter();
        mask.iter()
            .map(|m| {
                if *m {
                    it.next().expect("one score per kept year")
                } else {
                    S::zero()
                }
            })
            .collect()
    };
    let a = spread(&in_ref, ref_fit.slope_scores());
    let b = spread(&late, late_fit.slope_scores());
    let diff_scores: Vec<S> = b.iter().zip(&a).map(|(x, y)| *x - *y).collect();
    let bandwidth = bandwidth.unwrap_or_else(|| newey_west_bandwidth(years.len()));
    let var = hac_sum_matrix(&[diff_scores], bandwidth).get(0, 0);
    let se_diff = var.max(S::zero()).sqrt();
    let scale = ref_fit.beta.abs().max(late_fit.beta.abs());
    let t_diff = t_ratio(late_fit.beta, ref_fit.beta, se_diff, scale);
    Ok(AccelerationResult {
        characteristic: series.name().to_owned(),
        split_year,
        design,
        beta_full: ref_fit.beta,
        beta_late: late_fit.beta,
        se_diff,
        t_diff,
        p_one_sided: normal_sf(t_diff),
        bandwidth,
    })
}
