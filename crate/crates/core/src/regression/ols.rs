use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::scalar::{noise_floor, Scalar};

/// Intercept, slope and residuals of a trend regression.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit<S> {
    pub alpha: S,
    pub beta: S,
    pub residuals: Vec<S>,
}

/// Simple regression of `y` on one regressor plus intercept.
#[derive(Debug, Clone)]
pub(crate) struct SlopeFit<S> {
    pub alpha: S,
    pub beta: S,
    pub residuals: Vec<S>,
    /// `x_t - x̄`.
    pub centered: Vec<S>,
    /// `Σ (x_t - x̄)²`.
    pub sxx: S,
    /// All `y` equal.
    pub constant_response: bool,
}

impl<S: Scalar> SlopeFit<S> {
    pub(crate) fn new(x: &[S], y: &[S]) -> Result<Self> {
        debug_assert_eq!(x.len(), y.len());
        let n = S::of_usize(x.len());
        let xbar = x.iter().copied().sum::<S>() / n;
        let ybar = y.iter().copied().sum::<S>() / n;
        let centered: Vec<S> = x.iter().map(|v| *v - xbar).collect();
        let sxx: S = centered.iter().map(|c| *c * *c).sum();
        let xscale = x.iter().fold(S::zero(), |m, v| m.max(v.abs()));
        if sxx <= noise_floor(xscale * xscale) {
            return Err(Error::ZeroVariance);
        }
        let sxy: S = centered.iter().zip(y).map(|(c, v)| *c * (*v - ybar)).sum();
        let beta = sxy / sxx;
        let alpha = ybar - beta * xbar;
        let yscale = y.iter().fold(S::zero(), |m, v| m.max(v.abs()));
        let floor = noise_floor(yscale);
        let mut residuals: Vec<S> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| *yi - alpha - beta * *xi)
            .collect();
        // exact fits leave only rounding noise
        if residuals.iter().all(|r| r.abs() <= floor) {
            residuals.iter_mut().for_each(|r| *r = S::zero());
        }
        let constant_response = y.iter().all(|v| *v == y[0]);
        Ok(Self {
            alpha,
            beta,
            residuals,
            centered,
            sxx,
            constant_response,
        })
    }

    /// Per-period contributions to `β̂ - β`, scaled so that their HAC sum is
    /// the slope variance: `(x_t - x̄) u_t / Sxx`.
    pub(crate) fn slope_scores(&self) -> Vec<S> {
        self.centered
            .iter()
            .zip(&self.residuals)
            .map(|(c, u)| *c * *u / self.sxx)
            .collect()
    }
}

pub(crate) const MIN_TREND_LEN: usize = 3;

/// OLS of a characteristic on `t = 1..T` (year offsets when the axis has gaps).
pub fn ols_trend<S: Scalar>(series: &CharacteristicSeries<S>) -> Result<OlsFit<S>> {
    if series.len() < MIN_TREND_LEN {
        return Err(Error::TooShort {
            needed: MIN_TREND_LEN,
            got: series.len(),
        });
    }
    let fit = SlopeFit::new(&series.time_index(), series.values())?;
    Ok(OlsFit {
        alpha: fit.alpha,
        beta: fit.beta,
        residuals: fit.residuals,
    })
}
