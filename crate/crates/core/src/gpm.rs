//! Generalized power method `x_{t+1} = P(C x_t)` from a spectral start.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{ComparisonMatrix, GroundTruth, RankingVector};
use crate::quotient::{phase_project, phase_project_counted, quotient_distance};
use crate::spectral::{self, EigenResult};
use crate::{CVector, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpmConfig {
    pub max_iter: usize,
    /// Stop once `d(x_t, x_{t−1})` falls to this value.
    pub step_tol: f64,
    pub record_trace: bool,
}

impl GpmConfig {
    /// `max_iter = 10 ⌈log₂ n⌉ + 100`, `step_tol = 1e-9 √n`.
    pub fn for_size(n: usize) -> Self {
        let log2 = (n.max(2) as f64).log2().ceil() as usize;
        Self {
            max_iter: 10 * log2 + 100,
            step_tol: 1e-9 * (n as f64).sqrt(),
            record_trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.step_tol.is_nan() || self.step_tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "step_tol must be positive, got {}",
                self.step_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub step: f64,
    pub dist_to_truth: Option<f64>,
    /// `min_k |(C x_{t−1})_k|` before projection.
    pub min_modulus: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GpmTrace {
    /// Empty unless `record_trace` was set.
    pub steps: Vec<StepRecord>,
    /// Distance of the starting point to the truth, when known.
    pub initial_dist_to_truth: Option<f64>,
    pub converged: bool,
    pub iterations_used: usize,
    pub final_step: f64,
    /// Projections that hit an exactly zero entry.
    pub zero_entries: usize,
}

impl GpmTrace {
    /// CSV with header `t,step,dist_to_truth,min_modulus`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "step", "dist_to_truth", "min_modulus"])?;
        for s in &self.steps {
            w.write_record([
                s.t.to_string(),
                s.step.to_string(),
                s.dist_to_truth.map(|d| d.to_string()).unwrap_or_default(),
                s.min_modulus.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed-point structure `C x = diag(μ) x`, `μ_k = |(C x)_k|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub mu: Vec<f64>,
    /// `‖C x − diag(μ) x‖₂`.
    pub residual: f64,
}

pub fn fixed_point_report(c: &ComparisonMatrix, x: &RankingVector) -> FixedPointReport {
    let cx = c.apply(x.as_vector());
    let mu: Vec<f64> = cx.iter().map(|v| v.norm()).collect();
    let residual = cx
        .iter()
        .zip(x.as_vector().iter())
        .zip(&mu)
        .map(|((v, xk), m)| (v - xk * m).norm_sqr())
        .sum::<f64>()
        .sqrt();
    FixedPointReport { mu, residual }
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub next: RankingVector,
    pub min_modulus: f64,
    pub zero_entries: usize,
}

/// One GPM map `P(C x)`.
pub fn gpm_step(c: &ComparisonMatrix, x: &RankingVector) -> Result<StepOutput> {
    if c.n() != x.len() {
        return Err(Error::Dimension {
            expected: c.n(),
            actual: x.len(),
        });
    }
    let p = phase_project_counted(&c.apply(x.as_vector()));
    Ok(StepOutput {
        next: p.vector,
        min_modulus: p.min_modulus,
        zero_entries: p.zero_entries,
    })
}

#[derive(Debug, Clone)]
pub struct GpmOutcome {
    pub estimate: RankingVector,
    pub trace: GpmTrace,
    pub fixed_point: FixedPointReport,
}

/// Iterates [`gpm_step`] until the step drops to `step_tol` or `max_iter`
/// is reached. Not converging is reported in the trace, not as an error.
pub fn run_gpm(
    c: &ComparisonMatrix,
    x0: &RankingVector,
    config: &GpmConfig,
    truth: Option<&GroundTruth>,
) -> Result<GpmOutcome> {
    config.validate()?;
    if c.n() != x0.len() {
        return Err(Error::Dimension {
            expected: c.n(),
            actual: x0.len(),
        });
    }
    if let Some(t) = truth {
        if t.n() != c.n() {
            return Err(Error::Dimension {
                expected: c.n(),
                actual: t.n(),
            });
        }
    }
    let dist = |x: &RankingVector| -> Result<Option<f64>> {
        truth
            .map(|t| quotient_distance(x.as_vector(), t.vector.as_vector()).map(f64::from))
            .transpose()
    };

    let mut trace = GpmTrace {
        initial_dist_to_truth: dist(x0)?,
        ..Default::default()
    };
    let mut x = x0.clone();
    for t in 1..=config.max_iter {
        let out = gpm_step(c, &x)?;
        let step = quotient_distance(out.next.as_vector(), x.as_vector())?.value();
        trace.zero_entries += out.zero_entries;
        x = out.next;
        trace.iterations_used = t;
        trace.final_step = step;
        if config.record_trace {
            trace.steps.push(StepRecord {
                t,
                step,
                dist_to_truth: dist(&x)?,
                min_modulus: out.min_modulus,
            });
        }
        if step <= config.step_tol {
            trace.converged = true;
            break;
        }
    }
    let fixed_point = fixed_point_report(c, &x);
    Ok(GpmOutcome {
        estimate: x,
        trace,
        fixed_point,
    })
}

/// Spectral start: leading eigenvector scaled to `√n` and phase-projected.
pub fn initialize<R: rand::Rng + ?Sized>(c: &ComparisonMatrix, rng: &mut R) -> Result<RankingVector> {
    let n = c.n();
    let eig = spectral::leading_eigenpair(
        c.as_matrix(),
        spectral::default_tol(n),
        spectral::DEFAULT_MAX_ITER,
        rng,
    )?;
    Ok(project_eigenvector(&eig, n))
}

/// `P(√n · v)` for an eigenpair; also used on best-effort pairs after a
/// solver failure.
pub fn project_eigenvector(eig: &EigenResult, n: usize) -> RankingVector {
    let scaled: CVector = &eig.vector * Complex64::new((n as f64).sqrt(), 0.0);
    phase_project(&scaled)
}
