//! File formats, dataset plumbing, baselines, fixtures and model selection.

mod baseline;
mod crop;
mod fixture;
pub mod formats;
mod report;
mod selection;
mod split;
pub mod synthetic;

pub use baseline::memorization_baseline;
pub use crop::crop_halfspace;
pub use fixture::{densest_point, hedging_fixture};
pub use report::{read_report, report_csv_row, report_json, write_report, CSV_HEADER};
pub use selection::{
    criterion_value, select_from_sets, select_model, CheckpointSeries, SelectionCriterion, SelectionResult,
};
pub use split::{split_dataset, DatasetSplit};
