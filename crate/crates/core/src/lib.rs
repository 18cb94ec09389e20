//! Trend-based analysis of how whole temperature distributions evolve.
//!
//! Station files are turned into one temperature sample per year
//! ([`ingest`]), each sample is reduced to distributional characteristics
//! whose yearly values form time series ([`distributions`]), and those series
//! are tested for linear trends with HAC inference ([`regression`]). On top of
//! the trend test sit the warming procedures ([`warming`]): co-trending based
//! typology, acceleration, amplification and dominance. [`sim`] generates the
//! persistent processes used to check the trend test's asymptotics.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the common `f64` instantiation.

pub mod distributions;
pub mod error;
pub mod ingest;
mod linalg;
pub mod regression;
pub mod report;
pub mod scalar;
pub mod sim;
pub mod warming;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use distributions::{CharacteristicId, CharacteristicSeries, CharacteristicSet};
pub use ingest::{AnnualSample, PanelSpec, StationRecord};
pub use regression::{Sidedness, TrendResult, WaldResult};
pub use warming::{
    AccelerationResult, AmplificationResult, DominanceResult, DominanceVerdict, TypologyLabel,
    TypologyVerdict,
};

pub type AnnualSample64 = AnnualSample<f64>;
pub type AnnualSample32 = AnnualSample<f32>;
pub type Series64 = CharacteristicSeries<f64>;
pub type Series32 = CharacteristicSeries<f32>;
pub type TrendResult64 = TrendResult<f64>;
pub type TrendResult32 = TrendResult<f32>;
pub type WaldResult64 = WaldResult<f64>;
pub type AccelerationResult64 = AccelerationResult<f64>;
pub type AmplificationResult64 = AmplificationResult<f64>;
pub type DominanceResult64 = DominanceResult<f64>;
pub type TypologyVerdict64 = TypologyVerdict<f64>;
pub type Report64 = warming::Report<f64>;
