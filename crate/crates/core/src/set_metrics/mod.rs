//! Set-to-set evaluation metrics for point-cloud generators.

mod jsd;
mod matching;
mod protocol;

pub use jsd::{jsd, jsd_of_sets};
pub use matching::{coverage, distance_matrix, mmd, DistanceMatrix};
pub use protocol::{
    evaluate_generator, EvalProtocolConfig, MetricsReport, RepetitionMetrics, ReportConfig,
    REPORT_SCHEMA_VERSION,
};
