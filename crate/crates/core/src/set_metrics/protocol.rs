use serde::{Deserialize, Serialize};

use super::jsd::jsd;
use super::matching::distance_matrix;
use crate::distances::{EmdConfig, EmdMethod, PairDistance};
use crate::error::{Error, Result};
use crate::geometry::{voxelize, GridSpec, PointCloud};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Settings of the oversample-and-repeat evaluation protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalProtocolConfig {
    /// Each repetition holds this many samples per reference cloud.
    pub oversample_factor: usize,
    pub repetitions: usize,
    pub grid: GridSpec,
    pub emd: EmdConfig,
    pub chamfer_normalize: bool,
    pub seed: u64,
}

impl Default for EvalProtocolConfig {
    fn default() -> Self {
        Self {
            oversample_factor: 3,
            repetitions: 3,
            grid: GridSpec::default(),
            emd: EmdConfig::default(),
            chamfer_normalize: true,
            seed: 0,
        }
    }
}

impl EvalProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.oversample_factor == 0 || self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "oversample factor and repetitions must be at least 1".into(),
            ));
        }
        self.grid.validate()?;
        self.emd.validate()
    }

    pub fn chamfer(&self) -> PairDistance {
        PairDistance::Chamfer {
            normalize: self.chamfer_normalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionMetrics {
    pub jsd: f64,
    pub mmd_cd: f64,
    pub mmd_emd: f64,
    pub cov_cd: f64,
    pub cov_emd: f64,
    /// Sample points that fell outside the voxel grid.
    pub clamped_points: u64,
}

/// Everything needed to reproduce a report, embedded in the report itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub grid: GridSpec,
    pub emd: EmdConfig,
    pub emd_method: EmdMethod,
    pub chamfer_normalize: bool,
    pub oversample_factor: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub jsd_log_base: String,
    /// Set when the samples came from the built-in toy decoder or another
    /// synthetic source rather than a real generator.
    pub synthetic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub jsd: f64,
    pub mmd_cd: f64,
    pub mmd_emd: f64,
    pub cov_cd: f64,
    pub cov_emd: f64,
    /// Sample clouds per repetition.
    pub sample_size: usize,
    pub reference_size: usize,
    pub repetitions: usize,
    pub per_repetition: Vec<RepetitionMetrics>,
    pub config: ReportConfig,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Scores repeated sample groups against a reference set and averages the
/// per-repetition JSD, MMD-CD, MMD-EMD, COV-CD and COV-EMD.
///
/// Every group must hold exactly `oversample_factor * |reference_set|` clouds.
pub fn evaluate_generator(
    generator_samples: &[Vec<PointCloud>],
    reference_set: &[PointCloud],
    cfg: &EvalProtocolConfig,
) -> Result<MetricsReport> {
    cfg.validate()?;
    if reference_set.is_empty() {
        return Err(Error::EmptyInput("reference set is empty".into()));
    }
    if generator_samples.len() != cfg.repetitions {
        return Err(Error::ProtocolViolation(format!(
            "expected {} repetition groups, got {}",
            cfg.repetitions,
            generator_samples.len()
        )));
    }
    let group_size = cfg.oversample_factor * reference_set.len();
    if let Some((i, g)) = generator_samples
        .iter()
        .enumerate()
        .find(|(_, g)| g.len() != group_size)
    {
        return Err(Error::ProtocolViolation(format!(
            "repetition {i} has {} samples, expected {group_size} ({} x {} references)",
            g.len(),
            cfg.oversample_factor,
            reference_set.len()
        )));
    }

    let reference_hist = voxelize(reference_set, &cfg.grid)?;
    let chamfer = cfg.chamfer();
    let emd = PairDistance::Emd(cfg.emd);
    let mut per_repetition = Vec::with_capacity(cfg.repetitions);
    for group in generator_samples {
        let hist = voxelize(group, &cfg.grid)?;
        let cd = distance_matrix(group, reference_set, &chamfer)?;
        let em = distance_matrix(group, reference_set, &emd)?;
        per_repetition.push(RepetitionMetrics {
            jsd: jsd(&hist, &reference_hist)?,
            mmd_cd: cd.mmd()?,
            mmd_emd: em.mmd()?,
            cov_cd: cd.coverage()?,
            cov_emd: em.coverage()?,
            clamped_points: hist.clamped(),
        });
    }

    let avg = |f: fn(&RepetitionMetrics) -> f64| mean(per_repetition.iter().map(f));
    Ok(MetricsReport {
        schema_version: REPORT_SCHEMA_VERSION,
        jsd: avg(|r| r.jsd),
        mmd_cd: avg(|r| r.mmd_cd),
        mmd_emd: avg(|r| r.mmd_emd),
        cov_cd: avg(|r| r.cov_cd),
        cov_emd: avg(|r| r.cov_emd),
        sample_size: group_size,
        reference_size: reference_set.len(),
        repetitions: cfg.repetitions,
        config: ReportConfig {
            grid: cfg.grid,
            emd: cfg.emd,
            emd_method: cfg.emd.method_for(reference_set[0].len()),
            chamfer_normalize: cfg.chamfer_normalize,
            oversample_factor: cfg.oversample_factor,
            repetitions: cfg.repetitions,
            seed: cfg.seed,
            jsd_log_base: "e".into(),
            synthetic: false,
        },
        per_repetition,
    })
}
