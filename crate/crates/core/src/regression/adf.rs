use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::Scalar;

/// Deterministic terms of the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Deterministic {
    #[default]
    Constant,
    ConstantTrend,
}

/// Finite-sample Dickey-Fuller critical values (MacKinnon 2010 response surfaces).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub one_pct: f64,
    pub five_pct: f64,
    pub ten_pct: f64,
}

impl CriticalValues {
    pub fn for_sample(deterministic: Deterministic, nobs: usize) -> Self {
        // (tau_inf, b1, b2, b3) per level
        let table: [[f64; 4]; 3] = match deterministic {
            Deterministic::Constant => [
                [-3.43035, -6.5393, -16.786, -79.433],
                [-2.86154, -2.8903, -4.234, -40.040],
                [-2.56677, -1.5384, -2.809, 0.0],
            ],
            Deterministic::ConstantTrend => [
                [-3.95877, -9.0531, -28.428, -134.155],
                [-3.41049, -4.3904, -9.036, -45.374],
                [-3.12705, -2.5856, -3.925, -22.380],
            ],
        };
        let t = nobs as f64;
        let eval = |c: [f64; 4]| c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t);
        Self {
            one_pct: eval(table[0]),
            five_pct: eval(table[1]),
            ten_pct: eval(table[2]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult<S = f64> {
    /// t-ratio of the lagged level coefficient.
    pub statistic: S,
    /// Lag order chosen by SBIC.
    pub lags: usize,
    pub nobs: usize,
    pub deterministic: Deterministic,
    pub critical_values: CriticalValues,
    /// Unit root rejected at 5%.
    pub reject_5pct: bool,
}

/// `floor(12 (T/100)^(1/4))`.
pub fn default_adf_lags(len: usize) -> usize {
    (12.0 * (len as f64 / 100.0).powf(0.25)).floor() as usize
}

const MIN_ADF_LEN: usize = 20;

struct AdfFit<S> {
    statistic: S,
    rss: S,
    nobs: usize,
    k: usize,
}

/// `Δy_t` on deterministics, `y_{t-1}` and `lags` lagged differences, over
/// `t = first..T-1` (0-based positions in `y`).
fn fit<S: Scalar>(y: &[S], lags: usize, first: usize, det: Deterministic) -> Option<AdfFit<S>> {
    let dy: Vec<S> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut rows = Vec::new();
    let mut resp = Vec::new();
    for t in first..y.len() {
        let mut row = vec![S::one()];
        if det == Deterministic::ConstantTrend {
            row.push(S::of_usize(t));
        }
        row.push(y[t - 1]);
        row.extend((1..=lags).map(|j| dy[t - 1 - j]));
        rows.push(row);
        resp.push(dy[t - 1]);
    }
    let k = rows.first()?.len();
    let level = k - 1 - lags;
    let ls = least_squares(&rows, &resp)?;
    let nobs = resp.len();
    let rss: S = ls.residuals.iter().map(|r| *r * *r).sum();
    let s2 = rss / S::of_usize(nobs - k);
    let se = (s2 * ls.xtx_inv_diag[level]).sqrt();
    Some(AdfFit {
        statistic: ls.coefficients[level] / se,
        rss,
        nobs,
        k,
    })
}

/// Augmented Dickey-Fuller test with the lag order (0..=`max_lags`) minimizing
/// SBIC on a common estimation sample; the chosen model is then re-estimated on
/// all usable observations.
pub fn adf_test<S: Scalar>(
    y: &[S],
    max_lags: Option<usize>,
    deterministic: Deterministic,
) -> Result<AdfResult<S>> {
    if y.len() < MIN_ADF_LEN {
        return Err(Error::TooShort {
            needed: MIN_ADF_LEN,
            got: y.len(),
        });
    }
    let max_lags = max_lags.unwrap_or_else(|| default_adf_lags(y.len()));
    let det_terms = match deterministic {
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    let common_nobs = y.len() - 1 - max_lags.min(y.len() - 1);
    let needed = max_lags + det_terms + 1 + 10;
    if common_nobs < needed {
        return Err(Error::TooShort {
            needed: needed + max_lags + 1,
            got: y.len(),
        });
    }
    let mut best: Option<(S, usize)> = None;
    for p in 0..=max_lags {
        let Some(f) = fit(y, p, max_lags + 1, deterministic) else {
            continue;
        };
        let n = S::of_usize(f.nobs);
        let sbic = (f.rss / n).ln() + S::of_usize(f.k) * n.ln() / n;
        if best.is_none_or(|(b, _)| sbic < b) {
            best = Some((sbic, p));
        }
    }
    let lags = best.map(|(_, p)| p).ok_or(Error::Singular)?;
    let f = fit(y, lags, lags + 1, deterministic).ok_or(Error::Singular)?;
    let critical_values = CriticalValues::for_sample(deterministic, f.nobs);
    Ok(AdfResult {
        statistic: f.statistic,
        lags,
        nobs: f.nobs,
        deterministic,
        critical_values,
        reject_5pct: f.statistic.as_f64() < critical_values.five_pct,
    })
}
