use std::fmt;

use serde::{Deserialize, Serialize};

use crate::regression::{TrendResult, WaldResult};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypologyLabel {
    /// No quantile trends.
    W0,
    /// Common trend across quantiles; dispersion without trend.
    W1,
    /// Lower quantiles trend faster; dispersion shrinking.
    W2,
    /// Upper quantiles trend faster; dispersion growing.
    W3,
}

impl fmt::Display for TypologyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::W0 => "W0",
            Self::W1 => "W1",
            Self::W2 => "W2",
            Self::W3 => "W3",
        })
    }
}

/// How the "no trend in any quantile" condition treats the family of tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileFamily {
    /// Any single quantile rejecting at the level rules out W0.
    #[default]
    PerTest,
    /// A quantile must reject at `level / m` to rule out W0.
    Bonferroni,
}

impl QuantileFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerTest => "per-test",
            Self::Bonferroni => "bonferroni",
        }
    }
}

/// Test results the classification is read from, all on one sample period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypologyEvidence<S = f64> {
    /// `(label, trend)` per quantile of the grid.
    pub quantile_trends: Vec<(String, TrendResult<S>)>,
    /// Equality of all quantile slopes.
    pub cotrend_all: WaldResult<S>,
    /// Trend in `q75 - q25`.
    pub iqr_spacing: TrendResult<S>,
    /// Trend in `q95 - q05`, when available.
    pub tail_spacing: Option<TrendResult<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypologyVerdict<S = f64> {
    pub label: TypologyLabel,
    /// The co-trending and spacing evidence disagree.
    pub low_confidence: bool,
    pub level: S,
    pub family: QuantileFamily,
    pub evidence: TypologyEvidence<S>,
}

/// Classifies the warming type:
///
/// * W0 when no quantile trend is significant;
/// * W1 when the equal-slopes Wald test and the iqr spacing test both fail to reject;
/// * otherwise W2/W3 by the sign of the significant iqr spacing trend, falling
///   back to `q95 - q05`.
///
/// If neither spacing trend is significant although the slopes differ, the
/// sign of the spacing with the larger |t| decides and the verdict is flagged
/// low-confidence.
pub fn classify_typology<S: Scalar>(
    evidence: TypologyEvidence<S>,
    level: S,
    family: QuantileFamily,
) -> TypologyVerdict<S> {
    let m = evidence.quantile_trends.len().max(1);
    let quantile_level = match family {
        QuantileFamily::PerTest => level,
        QuantileFamily::Bonferroni => level / S::of_usize(m),
    };
    let any_trend = evidence
        .quantile_trends
        .iter()
        .any(|(_, t)| t.significant_sign(quantile_level) != 0);

    let iqr_sign = evidence.iqr_spacing.significant_sign(level);
    let tail_sign = evidence
        .tail_spacing
        .as_ref()
        .map_or(0, |t| t.significant_sign(level));
    let by_sign = |s: i8| {
        if s < 0 {
            TypologyLabel::W2
        } else {
            TypologyLabel::W3
        }
    };

    let (label, low_confidence) = if !any_trend {
        (TypologyLabel::W0, false)
    } else if evidence.cotrend_all.p_value >= level && iqr_sign == 0 {
        (TypologyLabel::W1, false)
    } else if iqr_sign != 0 {
        (by_sign(iqr_sign), false)
    } else if tail_sign != 0 {
        (by_sign(tail_sign), false)
    } else {
        let dominant = std::iter::once(&evidence.iqr_spacing)
            .chain(evidence.tail_spacing.as_ref())
            .max_by(|a, b| {
                a.t_stat
                    .abs()
                    .partial_cmp(&b.t_stat.abs())
                    .expect("finite t")
            })
            .expect("iqr spacing present");
        if dominant.t_stat == S::zero() {
            (TypologyLabel::W1, true)
        } else {
            (
                by_sign(if dominant.t_stat < S::zero() { -1 } else { 1 }),
                true,
            )
        }
    };
    TypologyVerdict {
        label,
        low_confidence,
        level,
        family,
        evidence,
    }
}
