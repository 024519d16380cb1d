//! Geometry of phase vectors modulo a global rotation.
//!
//! `d(x, y) = min_θ ‖x − e^{iθ} y‖₂`, attained when `e^{iθ}` cancels the
//! phase of `⟨y, x⟩`, so `d² = ‖x‖² + ‖y‖² − 2|⟨x, y⟩|`.

use num_complex::Complex64;

use crate::model::RankingVector;
use crate::{CVector, Error, Result};

/// Below this inner-product modulus the optimal rotation is undefined.
pub const ALIGNMENT_EPS: f64 = 1e-14;

/// Distance between two vectors modulo a global phase.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuotientDistance(f64);

impl QuotientDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<QuotientDistance> for f64 {
    fn from(d: QuotientDistance) -> f64 {
        d.0
    }
}

fn check_len(x: &CVector, y: &CVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// `⟨x, y⟩ = Σ conj(x_k) y_k`.
pub fn inner(x: &CVector, y: &CVector) -> Complex64 {
    x.dotc(y)
}

/// Quotient distance `min_θ ‖x − e^{iθ} y‖₂`.
///
/// Evaluated as the norm of the difference after optimal alignment, which is
/// the closed form without the cancellation in `‖x‖² + ‖y‖² − 2|⟨x, y⟩|` when
/// `x ≈ y`.
pub fn quotient_distance(x: &CVector, y: &CVector) -> Result<QuotientDistance> {
    check_len(x, y)?;
    let ip = inner(y, x);
    let rot = if ip.norm() > 0.0 {
        ip / ip.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let d = x
        .iter()
        .zip(y.iter())
        .map(|(a, b)| (a - rot * b).norm_sqr())
        .sum::<f64>()
        .max(0.0)
        .sqrt();
    Ok(QuotientDistance(d))
}

/// Phase projection together with diagnostics from the pre-projection vector.
#[derive(Debug, Clone)]
pub struct PhaseProjection {
    pub vector: RankingVector,
    /// Entries that were exactly zero and mapped to 1.
    pub zero_entries: usize,
    /// `min_k |v_k|` before projection.
    pub min_modulus: f64,
}

/// Entrywise `v_k / |v_k|`, with zero entries mapped to 1.
pub fn phase_project(v: &CVector) -> RankingVector {
    phase_project_counted(v).vector
}

/// [`phase_project`] that also reports zero entries and the smallest modulus.
pub fn phase_project_counted(v: &CVector) -> PhaseProjection {
    let mut zero_entries = 0;
    let mut min_modulus = f64::INFINITY;
    let out = v.map(|z| {
        let r = z.norm();
        min_modulus = min_modulus.min(r);
        if r == 0.0 {
            zero_entries += 1;
            Complex64::new(1.0, 0.0)
        } else {
            z / r
        }
    });
    PhaseProjection {
        vector: RankingVector::from_unit_unchecked(out),
        zero_entries,
        min_modulus: if v.is_empty() { 0.0 } else { min_modulus },
    }
}

/// Rotates `x` by `e^{−iφ}`, `φ = arg⟨reference, x⟩`, so that
/// `‖aligned − reference‖₂ = d(x, reference)`.
pub fn align_phase(x: &CVector, reference: &CVector) -> Result<CVector> {
    check_len(x, reference)?;
    let ip = inner(reference, x);
    if ip.norm() < ALIGNMENT_EPS {
        return Err(Error::AlignmentUndefined(ip.norm()));
    }
    Ok(x * (ip.conj() / ip.norm()))
}
