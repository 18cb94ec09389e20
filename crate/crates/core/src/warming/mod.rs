//! Warming procedures built on the trend test: acceleration, amplification,
//! dominance and the co-trending typology, plus the per-region pipeline that
//! runs them all.

mod acceleration;
mod amplification;
mod dominance;
mod pipeline;
mod typology;

pub use acceleration::{acceleration_test, AccelerationDesign, AccelerationResult, MIN_LATE_YEARS};
pub use amplification::{amplification_test, AmplificationMode, AmplificationResult};
pub use dominance::{
    dominance_test, DominanceResult, DominanceRow, DominanceVerdict, QuantileSeries,
};
pub use pipeline::{
    cotrend_groups, run_pipeline, typology_evidence, CotrendRow, NamedAdf, NamedTrend, Period,
    PeriodReport, PipelineConfig, Region, Report, DEFAULT_LEVEL, DEFAULT_TAUS, SPACINGS,
};
pub use typology::{
    classify_typology, QuantileFamily, TypologyEvidence, TypologyLabel, TypologyVerdict,
};
