//! Python bindings.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use pceval_core::aux_metrics;
use pceval_core::distances::{self, EmdConfig, PairDistance};
use pceval_core::geometry::{self, normalize_unit_sphere, rotate_z};
use pceval_core::harness::{formats, report_json};
use pceval_core::latent_models::{self, CovarianceType, EmConfig, LatentCodeSet};
use pceval_core::rng::seeded;
use pceval_core::set_metrics::{self, EvalProtocolConfig};
use pceval_core::{Error, GridSpec, Point};

fn err(e: Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

#[pyclass(name = "PointCloud", module = "pceval", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyPointCloud {
    inner: geometry::PointCloud,
}

#[pymethods]
impl PyPointCloud {
    #[new]
    fn new(points: Vec<Point>) -> PyResult<Self> {
        Ok(Self {
            inner: geometry::PointCloud::new(points).map_err(err)?,
        })
    }

    fn points(&self) -> Vec<Point> {
        self.inner.points().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn centroid(&self) -> Point {
        self.inner.centroid()
    }

    /// Centered copy scaled so the farthest point is at distance 1.
    fn normalized(&self) -> Self {
        Self {
            inner: normalize_unit_sphere(&self.inner),
        }
    }

    fn rotated_z(&self, angle: f64) -> Self {
        Self {
            inner: rotate_z(&self.inner, angle),
        }
    }

    fn __repr__(&self) -> String {
        format!("PointCloud(<{} points>)", self.inner.len())
    }
}

fn unwrap_clouds(clouds: &[PyPointCloud]) -> Vec<geometry::PointCloud> {
    clouds.iter().map(|c| c.inner.clone()).collect()
}

fn emd_config(exact_threshold: usize, epsilon: f64, normalize: bool) -> EmdConfig {
    EmdConfig {
        exact_threshold,
        epsilon,
        normalize,
    }
}

fn pair_distance(metric: &str) -> PyResult<PairDistance> {
    match metric.to_ascii_lowercase().as_str() {
        "cd" | "chamfer" => Ok(PairDistance::chamfer()),
        "emd" => Ok(PairDistance::emd()),
        _ => Err(PyValueError::new_err(format!("unknown metric {metric:?}, expected 'cd' or 'emd'"))),
    }
}

#[pyfunction]
#[pyo3(signature = (vertices, faces, n, seed))]
fn sample_mesh(vertices: Vec<Point>, faces: Vec<[usize; 3]>, n: usize, seed: u64) -> PyResult<PyPointCloud> {
    let mesh = geometry::TriangleMesh::new(vertices, faces).map_err(err)?;
    let inner = geometry::sample_mesh(&mesh, n, &mut seeded(seed)).map_err(err)?;
    Ok(PyPointCloud { inner })
}

#[pyfunction]
#[pyo3(signature = (a, b, normalize = true))]
fn chamfer(py: Python<'_>, a: &PyPointCloud, b: &PyPointCloud, normalize: bool) -> f64 {
    py.detach(|| distances::chamfer(&a.inner, &b.inner, normalize))
}

#[pyfunction]
#[pyo3(signature = (a, b, exact_threshold = 512, epsilon = 1e-3, normalize = true))]
fn emd(py: Python<'_>, a: &PyPointCloud, b: &PyPointCloud, exact_threshold: usize, epsilon: f64, normalize: bool) -> PyResult<f64> {
    let cfg = emd_config(exact_threshold, epsilon, normalize);
    py.detach(|| distances::emd(&a.inner, &b.inner, &cfg)).map_err(err)
}

/// Occupancy counts of a set of clouds on a cube grid centered at the origin.
#[pyfunction]
#[pyo3(signature = (clouds, resolution = 28, half_width = 1.0))]
fn voxelize(clouds: Vec<PyPointCloud>, resolution: usize, half_width: f64) -> PyResult<Vec<u64>> {
    let spec = GridSpec::new(resolution, [0.0; 3], half_width).map_err(err)?;
    Ok(geometry::voxelize(&unwrap_clouds(&clouds), &spec).map_err(err)?.counts().to_vec())
}

#[pyfunction]
#[pyo3(signature = (set_a, set_b, resolution = 28))]
fn jsd(py: Python<'_>, set_a: Vec<PyPointCloud>, set_b: Vec<PyPointCloud>, resolution: usize) -> PyResult<f64> {
    let spec = GridSpec::with_resolution(resolution).map_err(err)?;
    let (a, b) = (unwrap_clouds(&set_a), unwrap_clouds(&set_b));
    py.detach(|| set_metrics::jsd_of_sets(&a, &b, &spec)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (samples, references, metric = "cd"))]
fn coverage(py: Python<'_>, samples: Vec<PyPointCloud>, references: Vec<PyPointCloud>, metric: &str) -> PyResult<f64> {
    let d = pair_distance(metric)?;
    let (s, r) = (unwrap_clouds(&samples), unwrap_clouds(&references));
    py.detach(|| set_metrics::coverage(&s, &r, &d)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (samples, references, metric = "cd"))]
fn mmd(py: Python<'_>, samples: Vec<PyPointCloud>, references: Vec<PyPointCloud>, metric: &str) -> PyResult<f64> {
    let d = pair_distance(metric)?;
    let (s, r) = (unwrap_clouds(&samples), unwrap_clouds(&references));
    py.detach(|| set_metrics::mmd(&s, &r, &d)).map_err(err)
}

/// Full protocol; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (groups, references, oversample_factor = 3, resolution = 28, seed = 0))]
fn evaluate_generator<'py>(
    py: Python<'py>,
    groups: Vec<Vec<PyPointCloud>>,
    references: Vec<PyPointCloud>,
    oversample_factor: usize,
    resolution: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = EvalProtocolConfig {
        oversample_factor,
        repetitions: groups.len(),
        grid: GridSpec::with_resolution(resolution).map_err(err)?,
        seed,
        ..EvalProtocolConfig::default()
    };
    let groups: Vec<_> = groups.iter().map(|g| unwrap_clouds(g)).collect();
    let refs = unwrap_clouds(&references);
    let report = py.detach(|| set_metrics::evaluate_generator(&groups, &refs, &cfg)).map_err(err)?;
    py.import("json")?.call_method1("loads", (report_json(&report),))
}

#[pyfunction]
#[pyo3(signature = (predicted, ground_truth, rho = 0.02))]
fn completion_score(predicted: &PyPointCloud, ground_truth: &PyPointCloud, rho: f64) -> PyResult<(f64, f64)> {
    let s = aux_metrics::completion_score(&predicted.inner, &ground_truth.inner, rho).map_err(err)?;
    Ok((s.accuracy, s.coverage))
}

#[pyfunction]
fn voxel_iou(resolution: usize, a: Vec<bool>, b: Vec<bool>) -> PyResult<f64> {
    let spec = GridSpec::with_resolution(resolution).map_err(err)?;
    let a = aux_metrics::BinaryVoxelGrid::new(spec, a).map_err(err)?;
    let b = aux_metrics::BinaryVoxelGrid::new(spec, b).map_err(err)?;
    aux_metrics::voxel_iou(&a, &b).map_err(err)
}

#[pyclass(name = "GaussianMixture", module = "pceval", frozen)]
pub struct PyGaussianMixture {
    inner: latent_models::GmmModel,
    #[pyo3(get)]
    log_likelihood: Option<f64>,
    #[pyo3(get)]
    iterations: Option<usize>,
}

fn codes(rows: &[Vec<f64>]) -> PyResult<LatentCodeSet> {
    LatentCodeSet::from_rows(rows).map_err(err)
}

#[pymethods]
impl PyGaussianMixture {
    /// Fits a mixture to the rows of `data` by EM.
    #[staticmethod]
    #[pyo3(signature = (data, n_components, covariance = "full", seed = 0, max_iters = 200, tolerance = 1e-6, regularization = 1e-6, restarts = 3))]
    #[allow(clippy::too_many_arguments)]
    fn fit(
        py: Python<'_>,
        data: Vec<Vec<f64>>,
        n_components: usize,
        covariance: &str,
        seed: u64,
        max_iters: usize,
        tolerance: f64,
        regularization: f64,
        restarts: usize,
    ) -> PyResult<Self> {
        let cfg = EmConfig {
            n_components,
            covariance_type: covariance.parse::<CovarianceType>().map_err(err)?,
            max_iters,
            tolerance,
            regularization,
            restarts,
            seed,
        };
        let data = codes(&data)?;
        let fit = py.detach(|| latent_models::fit_em(&data, &cfg)).map_err(err)?;
        Ok(Self {
            inner: fit.model,
            log_likelihood: Some(fit.diagnostics.log_likelihood),
            iterations: Some(fit.diagnostics.iterations),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = latent_models::GmmModel::from_json(text).map_err(err)?;
        Ok(Self {
            inner,
            log_likelihood: None,
            iterations: None,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn means(&self) -> Vec<Vec<f64>> {
        self.inner.means().to_vec()
    }

    /// Mean log-density of the rows of `data`.
    fn score(&self, data: Vec<Vec<f64>>) -> PyResult<f64> {
        latent_models::log_likelihood(&self.inner, &codes(&data)?).map_err(err)
    }

    fn sample(&self, n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        let s = latent_models::gmm_sample(&self.inner, n, &mut seeded(seed)).map_err(err)?;
        Ok(s.iter_rows().map(<[f64]>::to_vec).collect())
    }
}

#[pyfunction]
fn read_pcset(path: std::path::PathBuf) -> PyResult<Vec<PyPointCloud>> {
    Ok(formats::load_clouds(&path)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyPointCloud { inner })
        .collect())
}

#[pyfunction]
fn write_pcset(path: std::path::PathBuf, clouds: Vec<PyPointCloud>) -> PyResult<()> {
    formats::save_clouds(&path, &unwrap_clouds(&clouds)).map_err(err)
}

#[pymodule]
fn pceval(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPointCloud>()?;
    m.add_class::<PyGaussianMixture>()?;
    m.add_function(wrap_pyfunction!(sample_mesh, m)?)?;
    m.add_function(wrap_pyfunction!(chamfer, m)?)?;
    m.add_function(wrap_pyfunction!(emd, m)?)?;
    m.add_function(wrap_pyfunction!(voxelize, m)?)?;
    m.add_function(wrap_pyfunction!(jsd, m)?)?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(mmd, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_generator, m)?)?;
    m.add_function(wrap_pyfunction!(completion_score, m)?)?;
    m.add_function(wrap_pyfunction!(voxel_iou, m)?)?;
    m.add_function(wrap_pyfunction!(read_pcset, m)?)?;
    m.add_function(wrap_pyfunction!(write_pcset, m)?)?;
    Ok(())
}
