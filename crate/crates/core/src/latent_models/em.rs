//! Expectation-maximization for Gaussian mixtures, seeded by k-means++.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gmm::{log_sum_exp, CovarianceType, Covariances, GmmModel};
use super::LatentCodeSet;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub n_components: usize,
    pub covariance_type: CovarianceType,
    pub max_iters: usize,
    /// Stop once the mean log-likelihood improves by less than this.
    pub tolerance: f64,
    /// Added to every covariance diagonal after each M-step.
    pub regularization: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self {
            n_components: 32,
            covariance_type: CovarianceType::Full,
            max_iters: 200,
            tolerance: 1e-6,
            regularization: 1e-6,
            restarts: 3,
            seed: 0,
        }
    }
}

impl EmConfig {
    pub fn new(n_components: usize, covariance_type: CovarianceType, seed: u64) -> Self {
        Self {
            n_components,
            covariance_type,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_components == 0 {
            return Err(Error::InvalidArgument("n_components must be at least 1".into()));
        }
        if !(self.regularization > 0.0) {
            return Err(Error::InvalidArgument("regularization must be positive".into()));
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument("max_iters and restarts must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub log_likelihood: f64,
    pub iterations: usize,
    pub restart: usize,
    pub converged: bool,
    /// Mean log-likelihood after every E-step of the chosen restart.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct GmmFit {
    pub model: GmmModel,
    pub diagnostics: FitDiagnostics,
}

/// Fits a mixture by EM, keeping the restart with the best final
/// log-likelihood.
///
/// Rows are put in a canonical (lexicographic) order first, so the result
/// depends on the data values and the seed but not on row order.
pub fn fit_em(data: &LatentCodeSet, cfg: &EmConfig) -> Result<GmmFit> {
    cfg.validate()?;
    if cfg.n_components > data.rows() {
        return Err(Error::InsufficientData {
            components: cfg.n_components,
            rows: data.rows(),
        });
    }
    let canonical = canonical_rows(data);
    let fits: Vec<Result<GmmFit>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| fit_once(&canonical, data.dims(), cfg, r))
        .collect();

    let mut best: Option<GmmFit> = None;
    let mut first_err = None;
    for fit in fits {
        match fit {
            Ok(f) => {
                if best
                    .as_ref()
                    .is_none_or(|b| f.diagnostics.log_likelihood > b.diagnostics.log_likelihood)
                {
                    best = Some(f);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one restart ran"))
}

fn canonical_rows(data: &LatentCodeSet) -> Vec<f64> {
    let mut rows: Vec<&[f64]> = data.iter_rows().collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    rows.concat()
}

fn fit_once(data: &[f64], dims: usize, cfg: &EmConfig, restart: usize) -> Result<GmmFit> {
    let rows = data.len() / dims;
    let mut rng = rng::derive(cfg.seed, restart as u64);
    let centers = kmeans_plus_plus(data, dims, cfg.n_components, &mut rng);
    let mut model = initial_model(data, dims, centers, cfg)?;

    let mut resp = vec![0.0; rows * cfg.n_components];
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let ll = e_step(&model, data, dims, &mut resp);
        if let Some(&prev) = trace.last() {
            if ll - prev < cfg.tolerance {
                trace.push(ll);
                converged = true;
                break;
            }
        }
        trace.push(ll);
        model = m_step(data, dims, &resp, cfg)?;
    }
    if !converged {
        trace.push(e_step(&model, data, dims, &mut resp));
    }
    Ok(GmmFit {
        model,
        diagnostics: FitDiagnostics {
            log_likelihood: *trace.last().unwrap(),
            iterations: trace.len() - 1,
            restart,
            converged,
            trace,
        },
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, then proportional to squared
/// distance from the nearest chosen center.
fn kmeans_plus_plus(data: &[f64], dims: usize, k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let rows = data.len() / dims;
    let row = |i: usize| &data[i * dims..(i + 1) * dims];
    let mut centers = vec![row(rng.random_range(0..rows)).to_vec()];
    let mut nearest: Vec<f64> = (0..rows).map(|i| sq_dist(row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = rows - 1;
            for (i, d) in nearest.iter().enumerate() {
                acc += d;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..rows)
        };
        let c = row(pick).to_vec();
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(row(i), &c));
        }
        centers.push(c);
    }
    centers
}

/// Means at the seeds, uniform weights, and the pooled data covariance for
/// every component.
fn initial_model(data: &[f64], dims: usize, centers: Vec<Vec<f64>>, cfg: &EmConfig) -> Result<GmmModel> {
    let rows = data.len() / dims;
    let ones = vec![1.0; rows];
    let (_, _, cov) = weighted_moments(data, dims, &ones, 0, 1, cfg.covariance_type);
    let cov = regularize(cov, dims, cfg.covariance_type, cfg.regularization);
    let c = centers.len();
    let covariances = match cfg.covariance_type {
        CovarianceType::Full => Covariances::Full(vec![cov; c]),
        CovarianceType::Diagonal => Covariances::Diagonal(vec![cov; c]),
    };
    GmmModel::new(vec![1.0 / c as f64; c], centers, covariances)
}

/// Fills `resp` (rows x components) with posterior responsibilities and
/// returns the mean log-likelihood.
fn e_step(model: &GmmModel, data: &[f64], dims: usize, resp: &mut [f64]) -> f64 {
    let c = model.n_components();
    let lls: Vec<f64> = data
        .par_chunks_exact(dims)
        .zip(resp.par_chunks_exact_mut(c))
        .map_init(
            || (vec![0.0; dims], vec![0.0; dims]),
            |(diff, scratch), (x, r)| {
                model.component_log_densities(x, diff, scratch, r);
                let lse = log_sum_exp(r);
                for v in r.iter_mut() {
                    *v = (*v - lse).exp();
                }
                lse
            },
        )
        .collect();
    lls.iter().sum::<f64>() / lls.len() as f64
}

/// Responsibility mass, weighted mean and biased covariance of component `comp`.
/// The covariance is row-major k x k for full, length k for diagonal.
fn weighted_moments(
    data: &[f64],
    dims: usize,
    resp: &[f64],
    comp: usize,
    stride: usize,
    kind: CovarianceType,
) -> (f64, Vec<f64>, Vec<f64>) {
    let mut weight = 0.0;
    let mut mean = vec![0.0; dims];
    for (x, r) in data.chunks_exact(dims).zip(resp.chunks_exact(stride)) {
        let w = r[comp];
        weight += w;
        for (m, v) in mean.iter_mut().zip(x) {
            *m += w * v;
        }
    }
    for m in &mut mean {
        *m /= weight;
    }
    let mut cov = match kind {
        CovarianceType::Full => vec![0.0; dims * dims],
        CovarianceType::Diagonal => vec![0.0; dims],
    };
    let mut diff = vec![0.0; dims];
    for (x, r) in data.chunks_exact(dims).zip(resp.chunks_exact(stride)) {
        let w = r[comp];
        if w == 0.0 {
            continue;
        }
        for ((d, v), m) in diff.iter_mut().zip(x).zip(&mean) {
            *d = v - m;
        }
        match kind {
            CovarianceType::Full => {
                for i in 0..dims {
                    let wi = w * diff[i];
                    for j in 0..=i {
                        cov[i * dims + j] += wi * diff[j];
                    }
                }
            }
            CovarianceType::Diagonal => {
                for (c, d) in cov.iter_mut().zip(&diff) {
                    *c += w * d * d;
                }
            }
        }
    }
    match kind {
        CovarianceType::Full => {
            for i in 0..dims {
                for j in 0..=i {
                    let v = cov[i * dims + j] / weight;
                    cov[i * dims + j] = v;
                    cov[j * dims + i] = v;
                }
            }
        }
        CovarianceType::Diagonal => {
            for c in &mut cov {
                *c /= weight;
            }
        }
    }
    (weight, mean, cov)
}

fn regularize(mut cov: Vec<f64>, dims: usize, kind: CovarianceType, reg: f64) -> Vec<f64> {
    match kind {
        CovarianceType::Full => {
            for i in 0..dims {
                cov[i * dims + i] += reg;
            }
        }
        CovarianceType::Diagonal => {
            for c in &mut cov {
                *c += reg;
            }
        }
    }
    cov
}

fn m_step(data: &[f64], dims: usize, resp: &[f64], cfg: &EmConfig) -> Result<GmmModel> {
    let rows = data.len() / dims;
    let c = cfg.n_components;
    let mut weights = Vec::with_capacity(c);
    let mut means = Vec::with_capacity(c);
    let mut covs = Vec::with_capacity(c);
    for comp in 0..c {
        let (mass, mean, cov) = weighted_moments(data, dims, resp, comp, c, cfg.covariance_type);
        if !(mass > 10.0 * f64::EPSILON * rows as f64) {
            return Err(Error::DegenerateFit { component: comp });
        }
        weights.push(mass / rows as f64);
        means.push(mean);
        covs.push(regularize(cov, dims, cfg.covariance_type, cfg.regularization));
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let covariances = match cfg.covariance_type {
        CovarianceType::Full => Covariances::Full(covs),
        CovarianceType::Diagonal => Covariances::Diagonal(covs),
    };
    GmmModel::new(weights, means, covariances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent_models::{gmm_sample, log_likelihood};
    use crate::rng::seeded;
    use rand_distr::{Distribution, StandardNormal};

    fn two_clusters(n: usize, seed: u64) -> LatentCodeSet {
        let mut rng = seeded(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = if i % 2 == 0 { 5.0 } else { -5.0 };
                let mut r: Vec<f64> = (0..3).map(|_| 0.1 * Distribution::<f64>::sample(&StandardNormal, &mut rng)).collect();
                r[0] += c;
                r
            })
            .collect();
        LatentCodeSet::from_rows(&rows).unwrap()
    }

    #[test]
    fn single_component_is_the_sample_moments() {
        let data = two_clusters(200, 1);
        let fit = fit_em(&data, &EmConfig::new(1, CovarianceType::Full, 0)).unwrap();
        let mean = data.mean();
        let n = data.rows() as f64;
        for (a, b) in fit.model.means()[0].iter().zip(&mean) {
            assert!((a - b).abs() < 1e-9);
        }
        let Covariances::Full(covs) = fit.model.covariances() else { panic!() };
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = data.iter_rows().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / n;
                let expect = s + if i == j { 1e-6 } else { 0.0 };
                assert!((covs[0][i * 3 + j] - expect).abs() < 1e-9);
            }
        }
        assert_eq!(fit.model.weights(), &[1.0]);
    }

    #[test]
    fn recovers_two_separated_clusters() {
        let data = two_clusters(2000, 2);
        for kind in [CovarianceType::Full, CovarianceType::Diagonal] {
            let fit = fit_em(&data, &EmConfig::new(4, kind, 7)).unwrap();
            let mut near = [0.0f64; 2];
            for (w, m) in fit.model.weights().iter().zip(fit.model.means()) {
                near[if m[0] > 0.0 { 0 } else { 1 }] += w;
                assert!((m[0].abs() - 5.0).abs() < 0.2, "{m:?}");
            }
            assert!((near[0] - 0.5).abs() < 0.02 && (near[1] - 0.5).abs() < 0.02, "{near:?}");
        }
    }

    #[test]
    fn too_few_rows() {
        let data = LatentCodeSet::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            fit_em(&data, &EmConfig::new(3, CovarianceType::Full, 0)),
            Err(Error::InsufficientData { components: 3, rows: 2 })
        ));
    }

    #[test]
    fn likelihood_never_decreases() {
        let data = two_clusters(600, 3);
        for kind in [CovarianceType::Full, CovarianceType::Diagonal] {
            let mut cfg = EmConfig::new(5, kind, 11);
            cfg.tolerance = 0.0;
            cfg.max_iters = 60;
            let fit = fit_em(&data, &cfg).unwrap();
            for w in fit.diagnostics.trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-8, "{} -> {}", w[0], w[1]);
            }
            let ll = log_likelihood(&fit.model, &data).unwrap();
            assert!((ll - fit.diagnostics.log_likelihood).abs() < 1e-9);
        }
    }

    #[test]
    fn row_order_does_not_matter() {
        let data = two_clusters(300, 4);
        let mut rows: Vec<Vec<f64>> = data.iter_rows().map(<[f64]>::to_vec).collect();
        rows.reverse();
        rows.swap(3, 100);
        let shuffled = LatentCodeSet::from_rows(&rows).unwrap();
        let cfg = EmConfig::new(3, CovarianceType::Full, 9);
        let a = fit_em(&data, &cfg).unwrap();
        let b = fit_em(&shuffled, &cfg).unwrap();
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn refit_of_samples_is_close() {
        let data = two_clusters(1000, 5);
        let fit = fit_em(&data, &EmConfig::new(2, CovarianceType::Diagonal, 1)).unwrap();
        let resampled = gmm_sample(&fit.model, 4000, &mut seeded(3)).unwrap();
        let ll = log_likelihood(&fit.model, &resampled).unwrap();
        assert!((ll - fit.diagnostics.log_likelihood).abs() < 0.1);
    }
}
