use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::formats;
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::set_metrics::{distance_matrix, jsd_of_sets, EvalProtocolConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionCriterion {
    #[serde(rename = "JSD")]
    Jsd,
    #[serde(rename = "MMD-CD")]
    MmdCd,
}

impl fmt::Display for SelectionCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Jsd => "JSD",
            Self::MmdCd => "MMD-CD",
        })
    }
}

impl FromStr for SelectionCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsd" => Ok(Self::Jsd),
            "mmd-cd" | "mmd_cd" | "mmdcd" => Ok(Self::MmdCd),
            _ => Err(Error::InvalidArgument(format!("unknown selection criterion {s:?}"))),
        }
    }
}

/// Generator sample sets saved at successive training checkpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckpointSeries {
    entries: Vec<(u64, PathBuf)>,
}

fn check_labels(labels: impl Iterator<Item = u64>) -> Result<()> {
    let mut prev: Option<u64> = None;
    let mut any = false;
    for l in labels {
        if prev.is_some_and(|p| l <= p) {
            return Err(Error::InvalidArgument(format!("checkpoint labels must increase, {l} follows {}", prev.unwrap())));
        }
        prev = Some(l);
        any = true;
    }
    if !any {
        return Err(Error::EmptyInput("checkpoint series is empty".into()));
    }
    Ok(())
}

impl CheckpointSeries {
    pub fn new(entries: Vec<(u64, PathBuf)>) -> Result<Self> {
        check_labels(entries.iter().map(|e| e.0))?;
        Ok(Self { entries })
    }

    /// Reads a manifest with one `label path` pair per line. Blank lines and
    /// lines starting with `#` are skipped; relative paths are resolved
    /// against the manifest's directory.
    pub fn from_manifest(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut entries = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, file) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::format("manifest", format!("line {}: expected `label path`", no + 1)))?;
            let label = label
                .parse()
                .map_err(|_| Error::format("manifest", format!("line {}: bad label {label:?}", no + 1)))?;
            entries.push((label, base.join(file.trim())));
        }
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(u64, PathBuf)] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub chosen: u64,
    pub criterion: SelectionCriterion,
    /// (label, criterion value) for every checkpoint, in series order.
    pub trace: Vec<(u64, f64)>,
}

/// Criterion value of one sample set against the validation set.
pub fn criterion_value(
    samples: &[PointCloud],
    validation: &[PointCloud],
    criterion: SelectionCriterion,
    cfg: &EvalProtocolConfig,
) -> Result<f64> {
    match criterion {
        SelectionCriterion::Jsd => jsd_of_sets(samples, validation, &cfg.grid),
        SelectionCriterion::MmdCd => distance_matrix(samples, validation, &cfg.chamfer())?.mmd(),
    }
}

fn choose(trace: Vec<(u64, f64)>, criterion: SelectionCriterion) -> SelectionResult {
    let mut best = trace[0];
    for &(l, v) in &trace[1..] {
        if v < best.1 {
            best = (l, v);
        }
    }
    SelectionResult {
        chosen: best.0,
        criterion,
        trace,
    }
}

/// Scores every checkpoint against `validation` and picks the minimizer,
/// the earliest label on ties. A checkpoint that fails to load is reported
/// with its label.
pub fn select_model(
    series: &CheckpointSeries,
    validation: &[PointCloud],
    criterion: SelectionCriterion,
    cfg: &EvalProtocolConfig,
) -> Result<SelectionResult> {
    cfg.validate()?;
    let mut trace = Vec::with_capacity(series.entries.len());
    for (label, path) in &series.entries {
        let samples = formats::load_clouds(path).map_err(|e| Error::Checkpoint {
            label: *label,
            source: Box::new(e),
        })?;
        trace.push((*label, criterion_value(&samples, validation, criterion, cfg)?));
    }
    Ok(choose(trace, criterion))
}

/// [`select_model`] over sample sets already in memory.
pub fn select_from_sets(
    checkpoints: &[(u64, Vec<PointCloud>)],
    validation: &[PointCloud],
    criterion: SelectionCriterion,
    cfg: &EvalProtocolConfig,
) -> Result<SelectionResult> {
    cfg.validate()?;
    check_labels(checkpoints.iter().map(|c| c.0))?;
    let trace = checkpoints
        .iter()
        .map(|(l, s)| Ok((*l, criterion_value(s, validation, criterion, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(choose(trace, criterion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::synthetic::chair_clouds;

    fn cfg() -> EvalProtocolConfig {
        EvalProtocolConfig::default()
    }

    fn shrink(set: &[PointCloud], s: f64) -> Vec<PointCloud> {
        set.iter()
            .map(|c| PointCloud::new(c.points().iter().map(|p| p.map(|v| v * s)).collect()).unwrap())
            .collect()
    }

    #[test]
    fn perfect_checkpoint_wins() {
        let val = chair_clouds(4, 128, 1).unwrap();
        let cps = vec![
            (100, shrink(&val, 0.5)),
            (200, val.iter().cycle().take(8).cloned().collect()),
            (300, shrink(&val, 0.8)),
        ];
        for c in [SelectionCriterion::Jsd, SelectionCriterion::MmdCd] {
            let r = select_from_sets(&cps, &val, c, &cfg()).unwrap();
            assert_eq!(r.chosen, 200);
            assert_eq!(r.trace[1].1, 0.0);
            let min = r.trace.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            assert_eq!(r.trace.iter().find(|t| t.0 == r.chosen).unwrap().1, min);
        }
    }

    #[test]
    fn ties_and_single_checkpoint() {
        let val = chair_clouds(2, 64, 2).unwrap();
        let cps = vec![(5, val.clone()), (9, val.clone())];
        assert_eq!(select_from_sets(&cps, &val, SelectionCriterion::Jsd, &cfg()).unwrap().chosen, 5);
        assert_eq!(select_from_sets(&cps[1..], &val, SelectionCriterion::MmdCd, &cfg()).unwrap().chosen, 9);
        let bad = vec![(9, val.clone()), (5, val.clone())];
        assert!(select_from_sets(&bad, &val, SelectionCriterion::Jsd, &cfg()).is_err());
        assert!(select_from_sets(&[], &val, SelectionCriterion::Jsd, &cfg()).is_err());
    }

    #[test]
    fn missing_checkpoint_names_its_label() {
        let dir = tempfile::tempdir().unwrap();
        let val = chair_clouds(2, 64, 3).unwrap();
        let good = dir.path().join("a.pcset");
        formats::save_clouds(&good, &val).unwrap();
        std::fs::write(dir.path().join("series.txt"), "# epoch path\n100 a.pcset\n200 missing.pcset\n").unwrap();
        let series = CheckpointSeries::from_manifest(&dir.path().join("series.txt")).unwrap();
        let err = select_model(&series, &val, SelectionCriterion::Jsd, &cfg()).unwrap_err();
        assert!(matches!(err, Error::Checkpoint { label: 200, .. }));
        assert!(err.is_io());
        assert!(err.to_string().contains("200"));
    }

    #[test]
    fn criterion_names() {
        assert_eq!("jsd".parse::<SelectionCriterion>().unwrap(), SelectionCriterion::Jsd);
        assert_eq!("MMD-CD".parse::<SelectionCriterion>().unwrap(), SelectionCriterion::MmdCd);
        assert!("emd".parse::<SelectionCriterion>().is_err());
    }
}
