//! Domain types for the complex ranking model and synthetic data generation.
//!
//! Item `k` with rank `r_k` sits at angle `θ_k = π r_k / (n − 1)` on the upper
//! half circle. Observations are the Hermitian matrix `C = z z* + σ W`, where
//! `W` has iid `CN(0, 1)` entries above the diagonal, conjugate-mirrored
//! entries below it, and real `N(0, 1)` entries on the diagonal.

use std::collections::HashSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result};

/// Maximum deviation from unit modulus accepted by [`RankingVector::new`].
pub const UNIT_MODULUS_TOL: f64 = 1e-12;
/// Maximum `|C_ij − conj(C_ji)|` accepted by [`ComparisonMatrix::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Unit-modulus complex vector whose phases encode a ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingVector(CVector);

impl RankingVector {
    /// Validates `n ≥ 2` and `|entry| = 1` for every entry.
    pub fn new(entries: CVector) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidSize(format!(
                "ranking vector needs at least 2 entries, got {}",
                entries.len()
            )));
        }
        if let Some((k, z)) = entries
            .iter()
            .enumerate()
            .find(|(_, z)| (z.norm() - 1.0).abs() > UNIT_MODULUS_TOL)
        {
            return Err(Error::InvalidParameter(format!(
                "entry {k} has modulus {} (expected 1)",
                z.norm()
            )));
        }
        Ok(Self(entries))
    }

    /// Builds a vector of phases `exp(i θ_k)`.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(
            angles.len(),
            angles.iter().map(|&t| Complex64::cis(t)),
        ))
    }

    /// Caller guarantees unit modulus.
    pub(crate) fn from_unit_unchecked(entries: CVector) -> Self {
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    /// Phases `arg(x_k)` in `(−π, π]`.
    pub fn phases(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.arg()).collect()
    }

    /// Multiplies every entry by `exp(i φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        Self(&self.0 * Complex64::cis(phi))
    }
}

/// Hermitian matrix of pairwise measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix(CMatrix);

impl ComparisonMatrix {
    /// Validates squareness, Hermitian symmetry and a real diagonal.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix is not Hermitian (max deviation {dev:e})"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_hermitian_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// `C x`.
    pub fn apply(&self, x: &CVector) -> CVector {
        &self.0 * x
    }
}

/// `max_ij |M_ij − conj(M_ji)|`; diagonal imaginary parts count as deviation.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Planted ranking: ranks, angles and the phase vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub ranks: Vec<usize>,
    pub angles: Vec<f64>,
    pub vector: RankingVector,
}

impl GroundTruth {
    /// Builds the truth from a rank permutation, with `θ_k = π r_k / (n − 1)`.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        if n < 2 {
            return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
        }
        crate::metrics::validate_permutation(&ranks)?;
        let angles: Vec<f64> = ranks.iter().map(|&r| rank_angle(r, n)).collect();
        let vector = RankingVector::from_angles(&angles)?;
        Ok(Self {
            ranks,
            angles,
            vector,
        })
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }
}

/// Angle assigned to rank `r` among `n` items.
pub fn rank_angle(r: usize, n: usize) -> f64 {
    PI * r as f64 / (n - 1) as f64
}

/// Identity ranks, or a uniform random permutation when `shuffle` is set.
pub fn generate_ground_truth<R: rand::Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    shuffle: bool,
) -> Result<GroundTruth> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
    }
    let mut ranks: Vec<usize> = (0..n).collect();
    if shuffle {
        ranks.shuffle(rng);
    }
    GroundTruth::from_ranks(ranks)
}

/// Hermitian Gaussian noise.
///
/// Draw order is row-major over the upper triangle including the diagonal:
/// `W_ii ~ N(0, 1)` real, then `W_ij ~ CN(0, 1)` for `j > i` with real and
/// imaginary parts `N(0, 1/2)`; `W_ji = conj(W_ij)`.
pub fn generate_noise<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComparisonMatrix> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = CMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        w[(i, i)] = Complex64::new(d, 0.0);
        for j in (i + 1)..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let a = Complex64::new(re * half, im * half);
            w[(i, j)] = a;
            w[(j, i)] = a.conj();
        }
    }
    Ok(ComparisonMatrix::from_hermitian_unchecked(w))
}

/// `C = z z* + σ W` for a given noise realization.
pub fn compose(truth: &GroundTruth, sigma: f64, noise: &ComparisonMatrix) -> Result<ComparisonMatrix> {
    check_sigma(sigma)?;
    let z = truth.vector.as_vector();
    if noise.n() != z.len() {
        return Err(Error::Dimension {
            expected: z.len(),
            actual: noise.n(),
        });
    }
    let mut c = z * z.adjoint();
    if sigma > 0.0 {
        c += noise.as_matrix() * Complex64::new(sigma, 0.0);
    }
    // z z* has an exactly real diagonal only up to rounding of |z_k|^2.
    for k in 0..c.nrows() {
        c[(k, k)].im = 0.0;
    }
    Ok(ComparisonMatrix::from_hermitian_unchecked(c))
}

/// Draws `W` with [`generate_noise`] and returns `C = z z* + σ W`.
///
/// Noise is drawn even when `σ = 0` so the random stream does not depend on
/// the noise level.
pub fn synthesize<R: rand::Rng + ?Sized>(
    truth: &GroundTruth,
    sigma: f64,
    rng: &mut R,
) -> Result<ComparisonMatrix> {
    check_sigma(sigma)?;
    let w = generate_noise(truth.n(), rng)?;
    compose(truth, sigma, &w)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and nonnegative, got {sigma}"
        )));
    }
    Ok(())
}

/// `σ = 10^(−SNR/10)`, i.e. `SNR = 1/σ` on a decibel scale: 10 dB is
/// `σ = 0.1`, −20 dB is `σ = 100`.
pub fn sigma_from_snr_db(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Inverse of [`sigma_from_snr_db`].
pub fn snr_db_from_sigma(sigma: f64) -> f64 {
    -10.0 * sigma.log10()
}

/// `σ = c₀ √(n / ln n)`.
pub fn sigma_from_c0(c0: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "threshold scaling needs n >= 3, got {n}"
        )));
    }
    if !c0.is_finite() || c0 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "c0 must be positive, got {c0}"
        )));
    }
    let n = n as f64;
    Ok(c0 * (n / n.ln()).sqrt())
}

/// One cardinal comparison: item `i` scored `value` above item `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Raw cardinal comparisons between `n` items.
#[derive(Debug, Clone, PartialEq)]
pub struct RawComparisons {
    n: usize,
    observations: Vec<Observation>,
}

impl RawComparisons {
    /// Validates indices and rejects self-comparisons and duplicate
    /// unordered pairs.
    pub fn new(n: usize, observations: Vec<Observation>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("need n >= 2, got {n}")));
        }
        let mut seen = HashSet::with_capacity(observations.len());
        for o in &observations {
            if o.i >= n || o.j >= n {
                return Err(Error::Validation(format!(
                    "pair ({}, {}) has an index outside 0..{n}",
                    o.i, o.j
                )));
            }
            if o.i == o.j {
                return Err(Error::Validation(format!("self-comparison of item {}", o.i)));
            }
            if !o.value.is_finite() {
                return Err(Error::Validation(format!(
                    "pair ({}, {}) has non-finite value",
                    o.i, o.j
                )));
            }
            if !seen.insert((o.i.min(o.j), o.i.max(o.j))) {
                return Err(Error::DuplicatePair { i: o.i, j: o.j });
            }
        }
        Ok(Self { n, observations })
    }

    /// Complete tournament with `value = r_i − r_j` for every `i < j`.
    pub fn complete_from_ranks(ranks: &[usize]) -> Result<Self> {
        let n = ranks.len();
        let mut obs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                obs.push(Observation {
                    i,
                    j,
                    value: ranks[i] as f64 - ranks[j] as f64,
                });
            }
        }
        Self::new(n, obs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// True when the observed pairs connect all `n` items.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = self.n;
        for o in &self.observations {
            let (a, b) = (find(&mut parent, o.i), find(&mut parent, o.j));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }
}

/// Angular embedding `C_ij = exp(i π v / (n − 1))`, `C_ji = conj(C_ij)`,
/// unit diagonal and zeros for unobserved pairs.
pub fn embed_raw(raw: &RawComparisons) -> Result<ComparisonMatrix> {
    let n = raw.n();
    let max = (n - 1) as f64;
    let mut c = CMatrix::zeros(n, n);
    for k in 0..n {
        c[(k, k)] = Complex64::new(1.0, 0.0);
    }
    for o in raw.observations() {
        if o.value.abs() > max {
            return Err(Error::OutOfRange {
                i: o.i,
                j: o.j,
                value: o.value,
                max,
            });
        }
        let e = Complex64::cis(PI * o.value / max);
        c[(o.i, o.j)] = e;
        c[(o.j, o.i)] = e.conj();
    }
    Ok(ComparisonMatrix::from_hermitian_unchecked(c))
}
