//! Data-generating processes and Monte Carlo checks of the trend test's
//! convergence rates.

mod dgp;
mod rate;

pub use dgp::{generate, DgpKind, DgpSpec, Innovation};
pub use rate::{
    rate_check_beta, rate_check_tstat, standard_suite, write_rate_checks, BandwidthPolicy,
    RateCheck, RateCheckResult, RateStatistic, SuiteSelector, DEFAULT_TOLERANCE, STANDARD_LENGTHS,
};
