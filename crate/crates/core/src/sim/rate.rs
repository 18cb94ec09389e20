use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dgp::{generate_with, DgpKind, DgpSpec};
use crate::distributions::CharacteristicSeries;
use crate::error::{Error, Result};
use crate::regression::{newey_west_bandwidth, ols_trend, trend_test};

/// Tolerance on fitted log-log exponents.
pub const DEFAULT_TOLERANCE: f64 = 0.15;

const MIN_REPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateStatistic {
    /// Median `|β̂|`.
    Beta,
    /// Median `|t|` of the HAC trend test of `β = 0`.
    TStat,
}

impl fmt::Display for RateStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Beta => "beta",
            Self::TStat => "tstat",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCheckResult {
    pub statistic: RateStatistic,
    pub dgp: String,
    pub lengths: Vec<usize>,
    pub reps: usize,
    pub medians: Vec<f64>,
    /// Least-squares slope of `ln median` on `ln T`.
    pub exponent: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// HAC bandwidth used by the t-statistic checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthPolicy {
    /// Newey-West rule at the shortest length, held fixed for all lengths.
    #[default]
    FixedAtShortest,
    /// Newey-West rule at each length; the bandwidth growth `T^{2/9}` lowers
    /// the `|t|` exponent of persistent processes from `1/2` to about `7/18`.
    PerLength,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateCheck {
    pub lengths: Vec<usize>,
    pub reps: usize,
    pub tolerance: f64,
    /// Overrides the exponent implied by the process.
    pub target: Option<f64>,
    pub bandwidth: BandwidthPolicy,
}

impl RateCheck {
    pub fn new(lengths: Vec<usize>, reps: usize) -> Self {
        Self {
            lengths,
            reps,
            tolerance: DEFAULT_TOLERANCE,
            target: None,
            bandwidth: BandwidthPolicy::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lengths.len() < 3 || self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "rate checks need at least three strictly increasing lengths, got {:?}",
                self.lengths
            )));
        }
        if self.lengths[0] < 10 {
            return Err(Error::InvalidArgument(
                "rate check lengths must be at least 10".into(),
            ));
        }
        if self.reps < MIN_REPS {
            return Err(Error::InvalidArgument(format!(
                "rate checks need at least {MIN_REPS} replications, got {}",
                self.reps
            )));
        }
        Ok(())
    }

    pub fn beta(&self, spec: &DgpSpec) -> Result<RateCheckResult> {
        self.run(spec, RateStatistic::Beta)
    }

    pub fn tstat(&self, spec: &DgpSpec) -> Result<RateCheckResult> {
        self.run(spec, RateStatistic::TStat)
    }

    fn run(&self, spec: &DgpSpec, statistic: RateStatistic) -> Result<RateCheckResult> {
        self.validate()?;
        for &len in &self.lengths {
            spec.with_len(len).validate()?;
        }
        let target = match self.target {
            Some(t) => t,
            None => target_exponent(&spec.kind, statistic).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "no rate target for {statistic} under {}; pass one explicitly",
                    spec.kind
                ))
            })?,
        };
        let reps = self.reps;
        let bandwidth = match self.bandwidth {
            BandwidthPolicy::FixedAtShortest => Some(newey_west_bandwidth(self.lengths[0])),
            BandwidthPolicy::PerLength => None,
            BandwidthPolicy::Fixed(b) => Some(b),
        };
        let medians = self
            .lengths
            .iter()
            .enumerate()
            .map(|(i, &len)| {
                let spec = spec.with_len(len);
                let mut draws = (0..reps)
                    .into_par_iter()
                    .map(|r| {
                        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                        rng.set_stream((i * reps + r) as u64);
                        let y = CharacteristicSeries::from_values(
                            "sim",
                            1,
                            generate_with(&spec, &mut rng),
                        );
                        Ok(match statistic {
                            RateStatistic::Beta => ols_trend(&y)?.beta.abs(),
                            RateStatistic::TStat => trend_test(&y, bandwidth)?.t_stat.abs(),
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(median(&mut draws))
            })
            .collect::<Result<Vec<f64>>>()?;
        let exponent = log_log_slope(&self.lengths, &medians);
        Ok(RateCheckResult {
            statistic,
            dgp: spec.kind.to_string(),
            lengths: self.lengths.clone(),
            reps,
            medians,
            exponent,
            target,
            tolerance: self.tolerance,
            pass: (exponent - target).abs() <= self.tolerance,
        })
    }
}

/// Growth exponent of the statistic implied by the process, when known.
pub(crate) fn target_exponent(kind: &DgpKind, statistic: RateStatistic) -> Option<f64> {
    let degree = |c: &[f64]| c.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    match (statistic, kind) {
        (RateStatistic::Beta, DgpKind::Iid | DgpKind::Ar1 { .. }) => Some(-1.5),
        (
            RateStatistic::Beta,
            DgpKind::RandomWalk | DgpKind::NearUnitRoot { .. } | DgpKind::LocalLevel { .. },
        ) => Some(-0.5),
        (RateStatistic::Beta, DgpKind::Fractional { d }) => Some(d - 1.5),
        (RateStatistic::Beta, DgpKind::PolynomialTrend { coefficients }) => {
            match degree(coefficients) {
                0 => Some(-1.5),
                k => Some(k as f64 - 1.0),
            }
        }
        (RateStatistic::TStat, DgpKind::Iid | DgpKind::Ar1 { .. }) => Some(0.0),
        (
            RateStatistic::TStat,
            DgpKind::RandomWalk
            | DgpKind::NearUnitRoot { .. }
            | DgpKind::LocalLevel { .. }
            | DgpKind::Fractional { .. },
        ) => Some(0.5),
        (RateStatistic::TStat, DgpKind::PolynomialTrend { coefficients }) => {
            match degree(coefficients) {
                0 => Some(0.0),
                1 => Some(1.5),
                _ => None,
            }
        }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn log_log_slope(lengths: &[usize], medians: &[f64]) -> f64 {
    let x: Vec<f64> = lengths.iter().map(|t| (*t as f64).ln()).collect();
    let y: Vec<f64> = medians.iter().map(|m| m.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Median `|β̂|` growth over `lengths`.
pub fn rate_check_beta(spec: &DgpSpec, lengths: &[usize], reps: usize) -> Result<RateCheckResult> {
    RateCheck::new(lengths.to_vec(), reps).beta(spec)
}

/// Median `|t_{β=0}|` growth over `lengths`.
pub fn rate_check_tstat(spec: &DgpSpec, lengths: &[usize], reps: usize) -> Result<RateCheckResult> {
    RateCheck::new(lengths.to_vec(), reps).tstat(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteSelector {
    Beta,
    Tstat,
    All,
}

impl FromStr for SuiteSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Self::Beta),
            "tstat" => Ok(Self::Tstat),
            "all" => Ok(Self::All),
            _ => Err(Error::InvalidArgument(format!(
                "unknown simulation suite `{s}` (expected beta, tstat or all)"
            ))),
        }
    }
}

/// Lengths of the standard suite.
pub const STANDARD_LENGTHS: [usize; 3] = [100, 400, 1600];

/// Standard rate checks: `|β̂|` under iid and random-walk noise, `|t|` under
/// the four persistent processes, each run with the settings of `check`
/// (usually `RateCheck::new(STANDARD_LENGTHS.to_vec(), reps)`).
pub fn standard_suite(
    selector: SuiteSelector,
    seed: u64,
    check: &RateCheck,
) -> Result<Vec<RateCheckResult>> {
    let spec = |kind| DgpSpec::new(kind, 1.0, 100, seed);
    let mut out = Vec::new();
    if matches!(selector, SuiteSelector::Beta | SuiteSelector::All) {
        out.push(check.beta(&spec(DgpKind::Iid))?);
        out.push(check.beta(&spec(DgpKind::RandomWalk))?);
    }
    if matches!(selector, SuiteSelector::Tstat | SuiteSelector::All) {
        for kind in [
            DgpKind::RandomWalk,
            DgpKind::NearUnitRoot { c: 5.0 },
            DgpKind::LocalLevel { q: 1.0 },
            DgpKind::Fractional { d: 0.8 },
        ] {
            out.push(check.tstat(&spec(kind))?);
        }
    }
    Ok(out)
}

/// One row per (check, length):
/// `statistic,dgp,T,reps,median,exponent,target,tolerance,pass`.
pub fn write_rate_checks<W: Write>(results: &[RateCheckResult], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "statistic",
        "dgp",
        "T",
        "reps",
        "median",
        "exponent",
        "target",
        "tolerance",
        "pass",
    ])?;
    for r in results {
        for (len, med) in r.lengths.iter().zip(&r.medians) {
            w.write_record([
                r.statistic.to_string(),
                r.dgp.clone(),
                len.to_string(),
                r.reps.to_string(),
                med.to_string(),
                r.exponent.to_string(),
                r.target.to_string(),
                r.tolerance.to_string(),
                r.pass.to_string(),
            ])?;
        }
    }
    w.flush()
}
