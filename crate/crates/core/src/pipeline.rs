//! End-to-end recovery: spectral start, GPM, rank extraction and
//! orientation.

use crate::gpm::{self, FixedPointReport, GpmConfig, GpmTrace};
use crate::metrics::{extract_ranking, orientation_resolve, ExtractedRanking};
use crate::model::{ComparisonMatrix, GroundTruth, RankingVector};
use crate::Result;

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    /// `None` uses [`GpmConfig::for_size`].
    pub gpm: Option<GpmConfig>,
    pub record_trace: bool,
}

impl PipelineOptions {
    pub fn gpm_config(&self, n: usize) -> GpmConfig {
        let mut cfg = self.gpm.unwrap_or_else(|| GpmConfig::for_size(n));
        cfg.record_trace |= self.record_trace;
        cfg
    }
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub start: RankingVector,
    pub estimate: RankingVector,
    pub ranking: ExtractedRanking,
    pub trace: GpmTrace,
    pub fixed_point: FixedPointReport,
    /// Set when the eigensolver failed and GPM started from its best iterate.
    pub init_failure: Option<String>,
}

impl Recovery {
    /// GPM converged from a properly converged spectral start.
    pub fn converged(&self) -> bool {
        self.trace.converged && self.init_failure.is_none()
    }
}

pub fn recover<R: rand::Rng + ?Sized>(
    c: &ComparisonMatrix,
    options: &PipelineOptions,
    truth: Option<&GroundTruth>,
    rng: &mut R,
) -> Result<Recovery> {
    let n = c.n();
    let (start, init_failure) = match gpm::initialize(c, rng) {
        Ok(x0) => (x0, None),
        Err(e) => match e.best_eigenpair() {
            Some(best) => (gpm::project_eigenvector(best, n), Some(e.to_string())),
            None => return Err(e),
        },
    };
    let out = gpm::run_gpm(c, &start, &options.gpm_config(n), truth)?;
    let ranking = orientation_resolve(&extract_ranking(&out.estimate), c);
    Ok(Recovery {
        start,
        estimate: out.estimate,
        ranking,
        trace: out.trace,
        fixed_point: out.fixed_point,
        init_failure,
    })
}
