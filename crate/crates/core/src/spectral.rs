//! Hermitian eigensolvers.
//!
//! Extremal eigenpairs come from restarted Lanczos with full
//! reorthogonalization and locking; further pairs are found by deflating
//! against the locked vectors. The spectral norm uses plain power iteration
//! on `A* A`. All solvers only need matrix-vector products.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::StandardNormal;

use crate::{CMatrix, CVector, Error, Result};

/// Krylov subspace size per restart cycle.
const KRYLOV_DIM: usize = 60;

/// Default iteration budget (matrix-vector products) for the Lanczos solvers.
pub const DEFAULT_MAX_ITER: usize = 20_000;

/// Default residual tolerance `1e-10 · n`, matching `‖C‖₂ ≈ n`.
pub fn default_tol(n: usize) -> f64 {
    1e-10 * n as f64
}

/// Something that can be multiplied against a vector. Must be Hermitian for
/// the Lanczos solvers.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &CVector) -> CVector;
}

impl LinearOperator for CMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &CVector) -> CVector {
        self * x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: CVector,
    /// `‖A v − λ v‖₂`, computed with a fresh product.
    pub residual: f64,
    /// Matrix-vector products spent.
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Which {
    Largest,
    Smallest,
}

fn random_unit<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

fn orthogonalize(w: &mut CVector, basis: &[CVector]) {
    for v in basis {
        let h = v.dotc(w);
        w.axpy(-h, v, Complex64::new(1.0, 0.0));
    }
}

fn normalize(v: &mut CVector) -> f64 {
    let norm = v.norm();
    if norm > 0.0 {
        v.unscale_mut(norm);
    }
    norm
}

/// One extremal eigenpair of `op` restricted to the complement of `locked`.
fn lanczos_extreme<Op, R>(
    op: &Op,
    which: Which,
    locked: &[CVector],
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<EigenResult>
where
    Op: LinearOperator + ?Sized,
    R: rand::Rng + ?Sized,
{
    let n = op.dim();
    let free = n.saturating_sub(locked.len());
    if free == 0 {
        return Err(Error::InvalidSize(format!(
            "no directions left: dimension {n}, {} locked",
            locked.len()
        )));
    }
    let m_max = free.min(KRYLOV_DIM);

    let mut start = random_unit(n, rng);
    orthogonalize(&mut start, locked);
    orthogonalize(&mut start, locked);
    normalize(&mut start);

    let mut used = 0usize;
    let mut best: Option<EigenResult> = None;
    loop {
        let mut basis: Vec<CVector> = Vec::with_capacity(m_max);
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        basis.push(start.clone());
        let mut scale = 0.0f64;
        let mut broke_down = false;
        loop {
            let k = basis.len() - 1;
            let mut w = op.apply(&basis[k]);
            used += 1;
            let a = basis[k].dotc(&w).re;
            alpha.push(a);
            w.axpy(Complex64::new(-a, 0.0), &basis[k], Complex64::new(1.0, 0.0));
            if k > 0 {
                w.axpy(
                    Complex64::new(-beta[k - 1], 0.0),
                    &basis[k - 1],
                    Complex64::new(1.0, 0.0),
                );
            }
            for _ in 0..2 {
                orthogonalize(&mut w, locked);
                orthogonalize(&mut w, &basis);
            }
            let b = w.norm();
            scale = scale.max(a.abs()).max(b);
            if b <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                broke_down = true;
                break;
            }
            if basis.len() == m_max || used >= max_iter {
                break;
            }
            beta.push(b);
            w.unscale_mut(b);
            basis.push(w);
        }

        let m = alpha.len();
        let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let pick = (0..m)
            .reduce(|p, q| {
                let better = match which {
                    Which::Largest => eig.eigenvalues[q] > eig.eigenvalues[p],
                    Which::Smallest => eig.eigenvalues[q] < eig.eigenvalues[p],
                };
                if better {
                    q
                } else {
                    p
                }
            })
            .expect("nonempty Krylov basis");
        let coeffs = eig.eigenvectors.column(pick);
        let mut y = CVector::zeros(n);
        for (i, q) in basis.iter().enumerate() {
            y.axpy(Complex64::new(coeffs[i], 0.0), q, Complex64::new(1.0, 0.0));
        }
        orthogonalize(&mut y, locked);
        normalize(&mut y);

        let ay = op.apply(&y);
        used += 1;
        let theta = y.dotc(&ay).re;
        let residual = (&ay - &y * Complex64::new(theta, 0.0)).norm();
        let candidate = EigenResult {
            value: theta,
            vector: y,
            residual,
            iterations: used,
        };
        if residual <= tol {
            return Ok(candidate);
        }
        let improved = best.as_ref().is_none_or(|b| residual < b.residual);
        start = candidate.vector.clone();
        if improved {
            best = Some(candidate);
        }
        if used >= max_iter {
            let best = best.expect("at least one cycle ran");
            return Err(Error::NotConverged {
                iterations: used,
                residual: best.residual,
                best: Some(Box::new(best)),
            });
        }
        if broke_down {
            // Invariant subspace without the target: inject a fresh direction.
            let kick = random_unit(n, rng);
            start.axpy(Complex64::new(1e-3, 0.0), &kick, Complex64::new(1.0, 0.0));
        }
        orthogonalize(&mut start, locked);
        normalize(&mut start);
    }
}

/// Eigenpair of the algebraically largest eigenvalue.
///
/// The second eigenvalue is also computed (by deflation); a gap below `tol`
/// is reported as [`Error::DegenerateSpectrum`] carrying the first pair.
pub fn leading_eigenpair<Op, R>(a: &Op, tol: f64, max_iter: usize, rng: &mut R) -> Result<EigenResult>
where
    Op: LinearOperator + ?Sized,
    R: rand::Rng + ?Sized,
{
    check_tol(tol)?;
    let first = lanczos_extreme(a, Which::Largest, &[], tol, max_iter, rng)?;
    if a.dim() < 2 {
        return Ok(first);
    }
    // Without a converged second pair the gap cannot be judged.
    if let Ok(second) = lanczos_extreme(
        a,
        Which::Largest,
        std::slice::from_ref(&first.vector),
        tol,
        max_iter,
        rng,
    ) {
        let gap = first.value - second.value;
        if gap < tol {
            return Err(Error::DegenerateSpectrum {
                gap,
                tol,
                best: Some(Box::new(first)),
            });
        }
    }
    Ok(first)
}

/// The `k` algebraically smallest eigenpairs, ascending.
pub fn smallest_eigenvalues<Op, R>(
    a: &Op,
    k: usize,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<Vec<EigenResult>>
where
    Op: LinearOperator + ?Sized,
    R: rand::Rng + ?Sized,
{
    check_tol(tol)?;
    if k > a.dim() {
        return Err(Error::InvalidSize(format!(
            "requested {k} eigenvalues of a {}-dimensional operator",
            a.dim()
        )));
    }
    let mut found: Vec<EigenResult> = Vec::with_capacity(k);
    let mut locked: Vec<CVector> = Vec::with_capacity(k);
    for _ in 0..k {
        let pair = lanczos_extreme(a, Which::Smallest, &locked, tol, max_iter, rng)?;
        locked.push(pair.vector.clone());
        found.push(pair);
    }
    found.sort_by(|p, q| p.value.total_cmp(&q.value));
    Ok(found)
}

/// Largest singular value by power iteration on `A* A`.
///
/// Stops once the Rayleigh residual `‖A*A x − ‖Ax‖² x‖` is at most `tol`
/// relative to `‖Ax‖²`, which bounds the relative error of the estimate by
/// `tol / 2`.
pub fn spectral_norm<R>(a: &CMatrix, tol: f64, max_iter: usize, rng: &mut R) -> Result<f64>
where
    R: rand::Rng + ?Sized,
{
    check_tol(tol)?;
    if a.ncols() == 0 || a.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(0.0);
    }
    let mut x = random_unit(a.ncols(), rng);
    let mut residual = f64::NAN;
    for _ in 0..max_iter {
        let y = a * &x;
        let est = y.norm();
        let mut z = a.ad_mul(&y);
        let rq = est * est;
        residual = (&z - &x * Complex64::new(rq, 0.0)).norm();
        if residual <= tol * rq || normalize(&mut z) == 0.0 {
            return Ok(est);
        }
        x = z;
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        residual,
        best: None,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}
