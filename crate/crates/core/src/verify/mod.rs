//! Verification suites. Each returns a [`SuiteReport`] of named checks
//! with their measured value, tolerance and the seed needed to replay a
//! failure.

mod density;
mod good_trend;
mod invariance;
mod lekrit;
mod report;
mod transform_suite;

pub use density::{check_density_identity, DensityConfig, Statistic};
pub use good_trend::{check_good_trend, good_fraction_trend, GoodTrendConfig, TrendPoint};
pub use invariance::{check_invariance_statistical, InvarianceConfig, NEGATIVE_CONTROL_TILT};
pub use lekrit::{check_lekrit_toy, lekrit_enumerate, LekritOutcome};
pub use report::{Check, SuiteReport, REPORT_SCHEMA_VERSION};
pub use transform_suite::{check_transform_suite, sample_instances, TransformSuiteConfig};
