//! Python bindings. Build with `maturin develop` from this directory.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use syncrank::certificate::{verify_certificate as verify, CertificateTolerances};
use syncrank::harness::{self, NoiseLevel, TrialOptions};
use syncrank::model::{self, Observation, RawComparisons};
use syncrank::pipeline::{self, PipelineOptions};
use syncrank::{metrics, quotient, rng_from_seed, CMatrix, CVector, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } | Error::DegenerateSpectrum { .. } | Error::Io(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn trial_options(certify: bool, max_iter: Option<usize>, step_tol: Option<f64>) -> TrialOptions {
    TrialOptions {
        max_iter,
        step_tol,
        certify,
        ..Default::default()
    }
}

/// Hermitian comparison matrix `C`.
#[pyclass(frozen, skip_from_py_object, module = "syncrank")]
#[derive(Clone)]
struct ComparisonMatrix(model::ComparisonMatrix);

#[pymethods]
impl ComparisonMatrix {
    /// From a square nested list of complex numbers.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        model::ComparisonMatrix::new(m).map(Self).map_err(to_py)
    }

    /// Angular embedding of `(i, j, value)` observations, `value ≈ r_i − r_j`.
    #[staticmethod]
    fn from_comparisons(n: usize, observations: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let raw = raw_comparisons(n, observations)?;
        model::embed_raw(&raw).map(Self).map_err(to_py)
    }

    /// Synthetic instance `C = zz* + σW`; returns `(C, true_ranks)`.
    #[staticmethod]
    #[pyo3(signature = (n, sigma, seed=0))]
    fn synthesize(n: usize, sigma: f64, seed: u64) -> PyResult<(Self, Vec<usize>)> {
        let mut rng = rng_from_seed(seed);
        let truth = model::generate_ground_truth(n, &mut rng, true).map_err(to_py)?;
        let c = model::synthesize(&truth, sigma, &mut rng).map_err(to_py)?;
        Ok((Self(c), truth.ranks))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Complex64> {
        if i >= self.0.n() || j >= self.0.n() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.0.get(i, j))
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.as_matrix();
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    }

    fn __repr__(&self) -> String {
        format!("ComparisonMatrix(n={})", self.0.n())
    }
}

fn raw_comparisons(n: usize, observations: Vec<(usize, usize, f64)>) -> PyResult<RawComparisons> {
    let obs = observations.into_iter().map(|(i, j, value)| Observation { i, j, value }).collect();
    RawComparisons::new(n, obs).map_err(to_py)
}

#[pyclass(frozen, get_all, module = "syncrank")]
struct Certificate {
    certified: bool,
    psd_ok: bool,
    rank_ok: bool,
    null_ok: bool,
    lambda_min: f64,
    lambda_2: f64,
    null_residual: f64,
    mu: Vec<f64>,
}

impl From<syncrank::certificate::CertificateReport> for Certificate {
    fn from(r: syncrank::certificate::CertificateReport) -> Self {
        Self {
            certified: r.certified,
            psd_ok: r.psd_ok,
            rank_ok: r.rank_ok,
            null_ok: r.null_ok,
            lambda_min: r.lambda_min,
            lambda_2: r.lambda_2,
            null_residual: r.null_residual,
            mu: r.mu,
        }
    }
}

#[pymethods]
impl Certificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate(certified={}, lambda_min={:.3e}, lambda_2={:.4})",
            self.certified, self.lambda_min, self.lambda_2
        )
    }
}

/// Result of synchronizing a comparison matrix.
#[pyclass(frozen, get_all, module = "syncrank")]
struct Recovery {
    ranks: Vec<usize>,
    angles: Vec<f64>,
    /// Phases of the synchronized vector.
    phases: Vec<f64>,
    converged: bool,
    iterations: usize,
    fixed_point_residual: f64,
}

#[pymethods]
impl Recovery {
    fn __repr__(&self) -> String {
        format!(
            "Recovery(n={}, converged={}, iterations={})",
            self.ranks.len(),
            self.converged,
            self.iterations
        )
    }
}

/// Spectral start, projected power iterations, rank extraction and orientation.
#[pyfunction]
#[pyo3(signature = (matrix, seed=0, max_iter=None, step_tol=None))]
fn recover(matrix: &ComparisonMatrix, seed: u64, max_iter: Option<usize>, step_tol: Option<f64>) -> PyResult<Recovery> {
    let n = matrix.0.n();
    let mut cfg = syncrank::gpm::GpmConfig::for_size(n);
    cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
    cfg.step_tol = step_tol.unwrap_or(cfg.step_tol);
    let opts = PipelineOptions {
        gpm: Some(cfg),
        record_trace: false,
    };
    let r = pipeline::recover(&matrix.0, &opts, None, &mut rng_from_seed(seed)).map_err(to_py)?;
    Ok(Recovery {
        converged: r.converged(),
        iterations: r.trace.iterations_used,
        fixed_point_residual: r.fixed_point.residual,
        phases: r.estimate.phases(),
        ranks: r.ranking.ranks,
        angles: r.ranking.angles,
    })
}

/// Dual-certificate check of a unit-modulus candidate given by its phases.
#[pyfunction]
fn verify_certificate(matrix: &ComparisonMatrix, phases: Vec<f64>) -> PyResult<Certificate> {
    let x = model::RankingVector::from_angles(&phases).map_err(to_py)?;
    let tol = CertificateTolerances::for_size(matrix.0.n());
    verify(&matrix.0, &x, &tol).map(Into::into).map_err(to_py)
}

/// Ranks `(i, j, value)` comparisons; returns `(ranks, certificate or None)`.
#[pyfunction]
#[pyo3(signature = (n, observations, seed=0, certify=false))]
fn rank_comparisons(
    n: usize,
    observations: Vec<(usize, usize, f64)>,
    seed: u64,
    certify: bool,
) -> PyResult<(Vec<usize>, Option<Certificate>)> {
    let raw = raw_comparisons(n, observations)?;
    let rep = harness::rank_comparisons(&raw, &trial_options(certify, None, None), seed).map_err(to_py)?;
    Ok((rep.ranks, rep.certificate.map(Into::into)))
}

/// `(tau, max_disp, converged, certified)`.
type TrialSummary = (Option<f64>, Option<usize>, bool, Option<bool>);

/// One synthetic trial; give exactly one of `sigma`, `snr_db`, `c0`.
/// Returns `(tau, max_disp, converged, certified)`.
#[pyfunction]
#[pyo3(signature = (n, *, sigma=None, snr_db=None, c0=None, seed=0, certify=false))]
fn run_trial(
    n: usize,
    sigma: Option<f64>,
    snr_db: Option<f64>,
    c0: Option<f64>,
    seed: u64,
    certify: bool,
) -> PyResult<TrialSummary> {
    let noise = match (sigma, snr_db, c0) {
        (Some(s), None, None) => NoiseLevel::Sigma(s),
        (None, Some(d), None) => NoiseLevel::SnrDb(d),
        (None, None, Some(c)) => NoiseLevel::C0(c),
        _ => return Err(PyValueError::new_err("give exactly one of sigma, snr_db, c0")),
    };
    let r = harness::run_trial(n, noise, 0, seed, &trial_options(certify, None, None))
        .map_err(to_py)?
        .record;
    Ok((r.tau, r.max_disp, r.converged, r.certified))
}

/// Normalized Kendall τ in [0, 1]; 1 means identical orderings.
#[pyfunction]
fn kendall_tau(predicted: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    metrics::kendall_tau_normalized(&predicted, &truth).map_err(to_py)
}

/// Distance between two vectors modulo a global phase.
#[pyfunction]
fn quotient_distance(x: Vec<Complex64>, y: Vec<Complex64>) -> PyResult<f64> {
    let (x, y) = (CVector::from_vec(x), CVector::from_vec(y));
    quotient::quotient_distance(&x, &y).map(|d| d.value()).map_err(to_py)
}

#[pyfunction]
fn sigma_from_snr_db(snr_db: f64) -> f64 {
    model::sigma_from_snr_db(snr_db)
}

#[pyfunction]
fn sigma_from_c0(c0: f64, n: usize) -> PyResult<f64> {
    model::sigma_from_c0(c0, n).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "syncrank")]
pub fn syncrank_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ComparisonMatrix>()?;
    m.add_class::<Recovery>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(rank_comparisons, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(kendall_tau, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_distance, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_from_snr_db, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_from_c0, m)?)?;
    Ok(())
}
