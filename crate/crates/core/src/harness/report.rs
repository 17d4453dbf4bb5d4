use std::path::Path;

use crate::error::{Error, Result};
use crate::set_metrics::MetricsReport;

/// Pretty JSON with a trailing newline. Identical reports serialize to
/// identical bytes.
pub fn report_json(report: &MetricsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is always serializable");
    s.push('\n');
    s
}

pub fn write_report(path: &Path, report: &MetricsReport) -> Result<()> {
    std::fs::write(path, report_json(report)).map_err(|e| Error::io(path, e))
}

pub fn read_report(path: &Path) -> Result<MetricsReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format("report", e.to_string()))
}

pub const CSV_HEADER: &str =
    "schema_version,jsd,mmd_cd,mmd_emd,cov_cd,cov_emd,sample_size,reference_size,repetitions,resolution,emd_method,seed,synthetic";

/// One flat CSV row matching [`CSV_HEADER`].
pub fn report_csv_row(r: &MetricsReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{:?},{},{}",
        r.schema_version,
        r.jsd,
        r.mmd_cd,
        r.mmd_emd,
        r.cov_cd,
        r.cov_emd,
        r.sample_size,
        r.reference_size,
        r.repetitions,
        r.config.grid.resolution,
        r.config.emd_method,
        r.config.seed,
        r.config.synthetic,
    )
}
