use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::LatentCodeSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceType {
    Full,
    Diagonal,
}

impl std::str::FromStr for CovarianceType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "diag" | "diagonal" => Ok(Self::Diagonal),
            other => Err(Error::InvalidArgument(format!("unknown covariance type {other:?}"))),
        }
    }
}

/// Per-component covariances. Full matrices are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "snake_case")]
pub enum Covariances {
    Full(Vec<Vec<f64>>),
    Diagonal(Vec<Vec<f64>>),
}

impl Covariances {
    pub fn kind(&self) -> CovarianceType {
        match self {
            Covariances::Full(_) => CovarianceType::Full,
            Covariances::Diagonal(_) => CovarianceType::Diagonal,
        }
    }

    fn len(&self) -> usize {
        match self {
            Covariances::Full(c) | Covariances::Diagonal(c) => c.len(),
        }
    }
}

/// Lower Cholesky factor (row-major, dense) and log-determinant of one
/// component covariance. Diagonal covariances keep only the square roots.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Factor {
    Full { lower: Vec<f64>, log_det: f64 },
    Diagonal { sqrt: Vec<f64>, log_det: f64 },
}

impl Factor {
    pub(crate) fn full(cov: &[f64], dims: usize) -> Option<Self> {
        let m = DMatrix::from_row_slice(dims, dims, cov);
        let chol = m.cholesky()?;
        let l = chol.l();
        let mut lower = vec![0.0; dims * dims];
        let mut log_det = 0.0;
        for i in 0..dims {
            for j in 0..=i {
                lower[i * dims + j] = l[(i, j)];
            }
            let d = l[(i, i)];
            if !(d > 0.0 && d.is_finite()) {
                return None;
            }
            log_det += 2.0 * d.ln();
        }
        Some(Factor::Full { lower, log_det })
    }

    pub(crate) fn diagonal(var: &[f64]) -> Option<Self> {
        if var.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return None;
        }
        Some(Factor::Diagonal {
            sqrt: var.iter().map(|v| v.sqrt()).collect(),
            log_det: var.iter().map(|v| v.ln()).sum(),
        })
    }

    fn log_det(&self) -> f64 {
        match self {
            Factor::Full { log_det, .. } | Factor::Diagonal { log_det, .. } => *log_det,
        }
    }

    /// Squared Mahalanobis norm of `diff`, using `scratch` for the solve.
    fn mahalanobis(&self, diff: &[f64], scratch: &mut [f64]) -> f64 {
        match self {
            Factor::Diagonal { sqrt, .. } => diff
                .iter()
                .zip(sqrt)
                .map(|(d, s)| {
                    let z = d / s;
                    z * z
                })
                .sum(),
            Factor::Full { lower, .. } => {
                let k = diff.len();
                let mut total = 0.0;
                for i in 0..k {
                    let row = &lower[i * k..i * k + i];
                    let dot: f64 = row.iter().zip(&scratch[..i]).map(|(l, z)| l * z).sum();
                    let z = (diff[i] - dot) / lower[i * k + i];
                    scratch[i] = z;
                    total += z * z;
                }
                total
            }
        }
    }

    /// `mean + L * z` for a standard normal draw `z`.
    fn transform(&self, z: &[f64], mean: &[f64]) -> Vec<f64> {
        match self {
            Factor::Diagonal { sqrt, .. } => mean
                .iter()
                .zip(sqrt.iter().zip(z))
                .map(|(m, (s, z))| m + s * z)
                .collect(),
            Factor::Full { lower, .. } => {
                let k = z.len();
                (0..k)
                    .map(|i| {
                        mean[i]
                            + lower[i * k..=i * k + i]
                                .iter()
                                .zip(z)
                                .map(|(l, z)| l * z)
                                .sum::<f64>()
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GmmModelData {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covariances: Covariances,
}

/// Gaussian mixture over a `dims`-dimensional latent space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GmmModelData", into = "GmmModelData")]
pub struct GmmModel {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covariances: Covariances,
    factors: Vec<Factor>,
}

impl TryFrom<GmmModelData> for GmmModel {
    type Error = Error;

    fn try_from(d: GmmModelData) -> Result<Self> {
        GmmModel::new(d.weights, d.means, d.covariances)
    }
}

impl From<GmmModel> for GmmModelData {
    fn from(m: GmmModel) -> Self {
        Self {
            weights: m.weights,
            means: m.means,
            covariances: m.covariances,
        }
    }
}

impl GmmModel {
    /// Validates shapes and factorizes every covariance. Weights must sum to
    /// one within 1e-9 and are renormalized exactly.
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, covariances: Covariances) -> Result<Self> {
        let c = weights.len();
        if c == 0 {
            return Err(Error::EmptyInput("mixture has no components".into()));
        }
        if means.len() != c || covariances.len() != c {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: if means.len() != c { means.len() } else { covariances.len() },
            });
        }
        let dims = means[0].len();
        if dims == 0 {
            return Err(Error::EmptyInput("mixture has zero dimensions".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        let expected = match covariances {
            Covariances::Full(_) => dims * dims,
            Covariances::Diagonal(_) => dims,
        };
        let mut factors = Vec::with_capacity(c);
        for comp in 0..c {
            if means[comp].len() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    found: means[comp].len(),
                });
            }
            if means[comp].iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("mixture means".into()));
            }
            let factor = match &covariances {
                Covariances::Full(m) | Covariances::Diagonal(m) if m[comp].len() != expected => {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: m[comp].len(),
                    })
                }
                Covariances::Full(m) => Factor::full(&m[comp], dims),
                Covariances::Diagonal(m) => Factor::diagonal(&m[comp]),
            };
            factors.push(factor.ok_or(Error::DegenerateFit { component: comp })?);
        }
        Ok(Self {
            weights,
            means,
            covariances,
            factors,
        })
    }

    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dims(&self) -> usize {
        self.means[0].len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn covariances(&self) -> &Covariances {
        &self.covariances
    }

    pub fn covariance_type(&self) -> CovarianceType {
        self.covariances.kind()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model is always serializable")
    }

    /// Parses and re-validates a model written by [`GmmModel::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format("model", e.to_string()))
    }

    /// Log of weight times density, per component, for one point.
    pub(crate) fn component_log_densities(&self, x: &[f64], diff: &mut [f64], scratch: &mut [f64], out: &mut [f64]) {
        let k = x.len() as f64;
        let norm = k * (2.0 * PI).ln();
        for (c, slot) in out.iter_mut().enumerate() {
            for ((d, xi), mi) in diff.iter_mut().zip(x).zip(&self.means[c]) {
                *d = xi - mi;
            }
            let maha = self.factors[c].mahalanobis(diff, scratch);
            let log_pdf = -0.5 * (norm + self.factors[c].log_det() + maha);
            *slot = self.weights[c].ln() + log_pdf;
        }
    }

    /// Log density of the mixture at `x`.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: x.len(),
            });
        }
        let k = self.dims();
        let mut diff = vec![0.0; k];
        let mut scratch = vec![0.0; k];
        let mut comp = vec![0.0; self.n_components()];
        self.component_log_densities(x, &mut diff, &mut scratch, &mut comp);
        Ok(log_sum_exp(&comp))
    }
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Mean per-row log density of `data` under `model`.
pub fn log_likelihood(model: &GmmModel, data: &LatentCodeSet) -> Result<f64> {
    if data.dims() != model.dims() {
        return Err(Error::DimensionMismatch {
            expected: model.dims(),
            found: data.dims(),
        });
    }
    let mut total = 0.0;
    for row in data.iter_rows() {
        total += model.log_density(row)?;
    }
    Ok(total / data.rows() as f64)
}

/// Draws `n` codes: a component by weight, then a Gaussian through that
/// component's Cholesky factor.
pub fn gmm_sample<R: Rng + ?Sized>(model: &GmmModel, n: usize, rng: &mut R) -> Result<LatentCodeSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let picker = WeightedIndex::new(&model.weights)
        .map_err(|e| Error::InvalidArgument(format!("mixture weights: {e}")))?;
    let k = model.dims();
    let mut values = Vec::with_capacity(n * k);
    let mut z = vec![0.0; k];
    for _ in 0..n {
        let c = picker.sample(rng);
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        values.extend(model.factors[c].transform(&z, &model.means[c]));
    }
    LatentCodeSet::new(n, k, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn standard(k: usize) -> GmmModel {
        let mut eye = vec![0.0; k * k];
        for i in 0..k {
            eye[i * k + i] = 1.0;
        }
        GmmModel::new(vec![1.0], vec![vec![0.0; k]], Covariances::Full(vec![eye])).unwrap()
    }

    #[test]
    fn standard_normal_peak() {
        let m = standard(1);
        let data = LatentCodeSet::new(1, 1, vec![0.0]).unwrap();
        let ll = log_likelihood(&m, &data).unwrap();
        assert!((ll - (-0.5 * (2.0 * PI).ln())).abs() < 1e-12);
        assert!((ll + 0.918939).abs() < 1e-6);
    }

    #[test]
    fn duplicate_row_keeps_mean_log_likelihood() {
        let m = standard(2);
        let a = LatentCodeSet::from_rows(&[vec![0.3, -1.0], vec![0.3, -1.0]]).unwrap();
        let b = LatentCodeSet::from_rows(&[vec![0.3, -1.0]]).unwrap();
        assert!((log_likelihood(&m, &a).unwrap() - log_likelihood(&m, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn wider_covariance_lowers_peak() {
        let narrow = standard(3);
        let wide = GmmModel::new(
            vec![1.0],
            vec![vec![0.0; 3]],
            Covariances::Diagonal(vec![vec![2.0; 3]]),
        )
        .unwrap();
        let at_mean = LatentCodeSet::new(1, 3, vec![0.0; 3]).unwrap();
        assert!(log_likelihood(&wide, &at_mean).unwrap() < log_likelihood(&narrow, &at_mean).unwrap());
    }

    #[test]
    fn full_and_diagonal_agree_on_diagonal_covariance() {
        let var = vec![0.5, 2.0, 1.5];
        let mut full = vec![0.0; 9];
        for i in 0..3 {
            full[i * 3 + i] = var[i];
        }
        let mean = vec![vec![0.1, -0.2, 0.3]];
        let f = GmmModel::new(vec![1.0], mean.clone(), Covariances::Full(vec![full])).unwrap();
        let d = GmmModel::new(vec![1.0], mean, Covariances::Diagonal(vec![var])).unwrap();
        let x = [0.7, 0.2, -1.1];
        assert!((f.log_density(&x).unwrap() - d.log_density(&x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn correlated_density_matches_closed_form() {
        // 2-d with correlation: cov [[2, 1], [1, 2]], det 3, inverse [[2,-1],[-1,2]]/3
        let m = GmmModel::new(
            vec![1.0],
            vec![vec![0.0, 0.0]],
            Covariances::Full(vec![vec![2.0, 1.0, 1.0, 2.0]]),
        )
        .unwrap();
        let x = [1.0, -0.5];
        let maha = (2.0 * 1.0 - 2.0 * 1.0 * -0.5 + 2.0 * 0.25) / 3.0;
        let expected = -0.5 * (2.0 * (2.0 * PI).ln() + 3.0f64.ln() + maha);
        assert!((m.log_density(&x).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(GmmModel::new(vec![0.5], vec![vec![0.0]], Covariances::Diagonal(vec![vec![1.0]])).is_err());
        assert!(matches!(
            GmmModel::new(vec![1.0], vec![vec![0.0, 0.0]], Covariances::Full(vec![vec![1.0, 2.0, 2.0, 1.0]])),
            Err(Error::DegenerateFit { component: 0 })
        ));
        let m = standard(2);
        assert!(m.log_density(&[0.0]).is_err());
    }

    #[test]
    fn degenerate_weights_sample_one_component() {
        let m = GmmModel::new(
            vec![1.0, 0.0],
            vec![vec![10.0, 10.0], vec![-10.0, -10.0]],
            Covariances::Diagonal(vec![vec![1e-6; 2], vec![1e-6; 2]]),
        )
        .unwrap();
        let s = gmm_sample(&m, 200, &mut seeded(3)).unwrap();
        assert!(s.iter_rows().all(|r| r[0] > 9.9 && r[1] > 9.9));
    }

    #[test]
    fn near_zero_covariance_samples_hug_the_mean() {
        // regularization-only covariance 1e-6: sigma 1e-3, so 0.01 is 10 sigma
        let k = 4;
        let mut cov = vec![0.0; k * k];
        for i in 0..k {
            cov[i * k + i] = 1e-6;
        }
        let mean = vec![0.5, -1.0, 2.0, 0.0];
        let m = GmmModel::new(vec![1.0], vec![mean.clone()], Covariances::Full(vec![cov])).unwrap();
        let s = gmm_sample(&m, 100, &mut seeded(4)).unwrap();
        for row in s.iter_rows() {
            for (v, mu) in row.iter().zip(&mean) {
                assert!((v - mu).abs() < 0.01);
            }
        }
    }

    #[test]
    fn sample_mean_matches_mixture_mean() {
        let m = GmmModel::new(
            vec![0.3, 0.7],
            vec![vec![-2.0, 1.0], vec![1.0, 0.5]],
            Covariances::Full(vec![vec![1.0, 0.3, 0.3, 0.5], vec![0.4, 0.0, 0.0, 0.9]]),
        )
        .unwrap();
        let n = 100_000;
        let s = gmm_sample(&m, n, &mut seeded(5)).unwrap();
        let mean = s.mean();
        // mixture mean and per-axis variance (law of total variance)
        let mu: [f64; 2] = [0.3 * -2.0 + 0.7 * 1.0, 0.3 * 1.0 + 0.7 * 0.5];
        let var = [
            0.3 * 1.0 + 0.7 * 0.4 + 0.3 * (-2.0 - mu[0]).powi(2) + 0.7 * (1.0 - mu[0]).powi(2),
            0.3 * 0.5 + 0.7 * 0.9 + 0.3 * (1.0 - mu[1]).powi(2) + 0.7 * (0.5 - mu[1]).powi(2),
        ];
        for a in 0..2 {
            let bound = 3.0 * (var[a] / n as f64).sqrt();
            assert!((mean[a] - mu[a]).abs() < bound, "axis {a}: {} vs {}", mean[a], mu[a]);
        }
    }

    #[test]
    fn serde_round_trip_refactorizes() {
        let m = GmmModel::new(
            vec![0.25, 0.75],
            vec![vec![0.0, 1.0], vec![2.0, 3.0]],
            Covariances::Full(vec![vec![1.0, 0.2, 0.2, 1.0], vec![0.5, 0.0, 0.0, 0.5]]),
        )
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: GmmModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
