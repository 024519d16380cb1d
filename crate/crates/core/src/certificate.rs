//! Dual certificate for the semidefinite relaxation
//! `max Tr(C X)` s.t. `diag(X) = 1, X ⪰ 0`.
//!
//! With `μ_k = Re((C x̂)_k conj(x̂_k))` and `S = diag(μ) − C`, the rank-one
//! point `X̂ = x̂ x̂*` is the unique optimum whenever `S ⪰ 0`,
//! `rank(S) = n − 1` and `S x̂ = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{ComparisonMatrix, RankingVector};
use crate::spectral::{self, smallest_eigenvalues};
use crate::{rng_from_seed, CMatrix, Error, Result};

/// Seed for the eigensolver start vectors used during verification.
const VERIFY_SEED: u64 = 0x5eed_ce27;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateTolerances {
    pub psd_tol: f64,
    pub rank_tol: f64,
    pub null_tol: f64,
}

impl CertificateTolerances {
    /// `psd_tol = 1e-8 n`, `rank_tol = 1e-6 n`, `null_tol = 1e-6 √n`.
    pub fn for_size(n: usize) -> Self {
        let n = n as f64;
        Self {
            psd_tol: 1e-8 * n,
            rank_tol: 1e-6 * n,
            null_tol: 1e-6 * n.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub mu: Vec<f64>,
    /// `S = diag(μ) − C`.
    pub s: CMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub mu: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_2: f64,
    /// `‖S x̂‖₂`.
    pub null_residual: f64,
    pub psd_ok: bool,
    pub rank_ok: bool,
    pub null_ok: bool,
    pub certified: bool,
    pub tolerances: CertificateTolerances,
}

fn check_dims(c: &ComparisonMatrix, x: &RankingVector) -> Result<()> {
    if c.n() != x.len() {
        return Err(Error::Dimension {
            expected: c.n(),
            actual: x.len(),
        });
    }
    Ok(())
}

pub fn build_certificate(c: &ComparisonMatrix, x: &RankingVector) -> Result<DualCertificate> {
    check_dims(c, x)?;
    let xv = x.as_vector();
    let cx = c.apply(xv);
    let mu: Vec<f64> = cx.iter().zip(xv.iter()).map(|(a, b)| (a * b.conj()).re).collect();
    let mut s = -c.as_matrix().clone();
    for (k, m) in mu.iter().enumerate() {
        s[(k, k)] += Complex64::new(*m, 0.0);
        // Keep S exactly Hermitian.
        s[(k, k)].im = 0.0;
    }
    Ok(DualCertificate { mu, s })
}

/// Checks the three certificate conditions with the given tolerances.
///
/// Eigensolver failures surface as [`Error::Certificate`].
pub fn verify_certificate(
    c: &ComparisonMatrix,
    x: &RankingVector,
    tolerances: &CertificateTolerances,
) -> Result<CertificateReport> {
    let cert = build_certificate(c, x)?;
    let n = c.n();
    let null_residual = (&cert.s * x.as_vector()).norm();
    let mut rng = rng_from_seed(VERIFY_SEED);
    let eig = smallest_eigenvalues(
        &cert.s,
        2.min(n),
        spectral::default_tol(n),
        spectral::DEFAULT_MAX_ITER,
        &mut rng,
    )
    .map_err(|e| Error::Certificate(Box::new(e)))?;
    let lambda_min = eig[0].value;
    let lambda_2 = eig.get(1).map_or(f64::INFINITY, |e| e.value);

    let psd_ok = lambda_min >= -tolerances.psd_tol;
    let rank_ok = lambda_2 >= tolerances.rank_tol;
    let null_ok = null_residual <= tolerances.null_tol;
    Ok(CertificateReport {
        mu: cert.mu,
        lambda_min,
        lambda_2,
        null_residual,
        psd_ok,
        rank_ok,
        null_ok,
        certified: psd_ok && rank_ok && null_ok,
        tolerances: *tolerances,
    })
}

/// `Re(x* C x)`, the relaxation objective at `X = x x*`.
pub fn sdp_objective(c: &ComparisonMatrix, x: &RankingVector) -> Result<f64> {
    check_dims(c, x)?;
    let xv = x.as_vector();
    Ok(xv.dotc(&c.apply(xv)).re)
}

/// `⟨S, x x*⟩ = Σ μ_k − Re(x* C x)`; zero for every unit-modulus `x`.
pub fn slackness(c: &ComparisonMatrix, x: &RankingVector) -> Result<f64> {
    let cert = build_certificate(c, x)?;
    Ok(cert.mu.iter().sum::<f64>() - sdp_objective(c, x)?)
}
