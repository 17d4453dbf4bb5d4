//! Turning latent codes into point clouds.

use std::path::Path;
use std::process::Command;
use std::sync::Mutex;

use super::LatentCodeSet;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointCloud};
use crate::harness::formats;

pub trait Decoder {
    /// One cloud per code row, in row order.
    fn decode(&self, codes: &LatentCodeSet) -> Result<Vec<PointCloud>>;

    /// True for decoders that are not a trained model.
    fn is_synthetic(&self) -> bool {
        false
    }
}

/// Toy linear decoder: `cloud = template + reshape(W z)`, where W has
/// `3 * template_len` rows (x, y, z of each point, in point order) and one
/// column per latent dimension. Exists so the evaluation pipeline can run
/// without any neural network.
#[derive(Debug, Clone)]
pub struct LinearDecoder {
    template: PointCloud,
    weights: LatentCodeSet,
}

impl LinearDecoder {
    pub fn new(template: PointCloud, weights: LatentCodeSet) -> Result<Self> {
        if weights.rows() != 3 * template.len() {
            return Err(Error::DimensionMismatch {
                expected: 3 * template.len(),
                found: weights.rows(),
            });
        }
        Ok(Self { template, weights })
    }

    /// Template from a single-cloud PCSET file, weights from a LATC file
    /// with `3 * N` rows.
    pub fn from_files(template: &Path, weights: &Path) -> Result<Self> {
        let mut clouds = formats::load_clouds(template)?;
        if clouds.len() != 1 {
            return Err(Error::InvalidArgument(format!(
                "template file holds {} clouds, expected 1",
                clouds.len()
            )));
        }
        Self::new(clouds.remove(0), formats::load_codes(weights)?)
    }

    pub fn latent_dims(&self) -> usize {
        self.weights.dims()
    }

    pub fn template(&self) -> &PointCloud {
        &self.template
    }

    /// `W z`, flattened as (x, y, z) per template point.
    pub fn offsets(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.weights.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.dims(),
                found: z.len(),
            });
        }
        Ok(self
            .weights
            .iter_rows()
            .map(|w| w.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect())
    }
}

impl Decoder for LinearDecoder {
    fn decode(&self, codes: &LatentCodeSet) -> Result<Vec<PointCloud>> {
        codes
            .iter_rows()
            .map(|z| {
                let off = self.offsets(z)?;
                let points: Vec<Point> = self
                    .template
                    .points()
                    .iter()
                    .zip(off.chunks_exact(3))
                    .map(|(p, o)| [p[0] + o[0], p[1] + o[1], p[2] + o[2]])
                    .collect();
                PointCloud::new(points)
            })
            .collect()
    }

    fn is_synthetic(&self) -> bool {
        true
    }
}

/// Runs an external program as `program [args..] <input.latc> <output.pcset>`
/// and reads its output. Calls through one instance are serialized.
#[derive(Debug)]
pub struct ExternalDecoder {
    program: String,
    args: Vec<String>,
    lock: Mutex<()>,
}

impl ExternalDecoder {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Self {
            program: program.into(),
            args,
            lock: Mutex::new(()),
        }
    }

    /// Splits a whitespace-separated command line into program and arguments.
    pub fn from_command_line(command: &str) -> Result<Self> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty decoder command".into()))?;
        Ok(Self::new(program, parts.collect()))
    }
}

impl Decoder for ExternalDecoder {
    fn decode(&self, codes: &LatentCodeSet) -> Result<Vec<PointCloud>> {
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());
        let dir = tempfile::tempdir()?;
        let input = dir.path().join("codes.latc");
        let output = dir.path().join("clouds.pcset");
        formats::save_codes(&input, codes)?;

        let out = Command::new(&self.program)
            .args(&self.args)
            .arg(&input)
            .arg(&output)
            .output()
            .map_err(|e| Error::DecoderFailure(format!("cannot run {:?}: {e}", self.program)))?;
        if !out.status.success() {
            return Err(Error::DecoderFailure(format!(
                "{:?} exited with {}: {}",
                self.program,
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let clouds = formats::load_clouds(&output)
            .map_err(|e| Error::DecoderFailure(format!("unreadable decoder output: {e}")))?;
        if clouds.len() != codes.rows() {
            return Err(Error::DecoderFailure(format!(
                "decoder produced {} clouds for {} codes",
                clouds.len(),
                codes.rows()
            )));
        }
        Ok(clouds)
    }
}

/// Decodes every row of `codes` with `adapter`.
pub fn decode(codes: &LatentCodeSet, adapter: &dyn Decoder) -> Result<Vec<PointCloud>> {
    adapter.decode(codes)
}
