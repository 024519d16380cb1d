//! Seeded Monte Carlo experiments: single trials, SNR heatmaps, fixed-`c₀`
//! sweeps, instance deep-dives and ranking of user-supplied comparisons.
//!
//! Seeds: trial `t` of cell `c` runs on
//! `splitmix64(base_seed + splitmix64((c << 32) | t))`. Both steps are
//! bijections, so distinct `(cell, trial)` pairs below `2³²` never share a
//! seed. Each trial draws, in order: the rank permutation, the noise matrix,
//! then the eigensolver start vectors.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::{verify_certificate, CertificateReport, CertificateTolerances};
use crate::gpm::{GpmConfig, GpmTrace};
use crate::metrics::{angle_error, kendall_tau_normalized, max_displacement};
use crate::model::{
    embed_raw, generate_ground_truth, sigma_from_c0, sigma_from_snr_db, synthesize, GroundTruth,
    RawComparisons,
};
use crate::pipeline::{recover, PipelineOptions, Recovery};
use crate::{rng_from_seed, Error, Result};

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell `cell`.
pub fn derive_seed(base_seed: u64, cell: usize, trial: usize) -> u64 {
    let stream = ((cell as u64) << 32) | (trial as u64 & 0xffff_ffff);
    splitmix64(base_seed.wrapping_add(splitmix64(stream)))
}

/// How the noise level of a trial is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    SnrDb(f64),
    C0(f64),
    Sigma(f64),
}

impl NoiseLevel {
    pub fn sigma(&self, n: usize) -> Result<f64> {
        match *self {
            NoiseLevel::SnrDb(db) => Ok(sigma_from_snr_db(db)),
            NoiseLevel::C0(c0) => sigma_from_c0(c0, n),
            NoiseLevel::Sigma(s) if s >= 0.0 && s.is_finite() => Ok(s),
            NoiseLevel::Sigma(s) => Err(Error::InvalidParameter(format!(
                "noise level must be finite and nonnegative, got {s}"
            ))),
        }
    }

    fn snr_db(&self) -> Option<f64> {
        match *self {
            NoiseLevel::SnrDb(db) => Some(db),
            _ => None,
        }
    }

    fn c0(&self) -> Option<f64> {
        match *self {
            NoiseLevel::C0(c0) => Some(c0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseAxis {
    SnrDb(Vec<f64>),
    C0(Vec<f64>),
}

impl NoiseAxis {
    fn levels(&self) -> Vec<NoiseLevel> {
        match self {
            NoiseAxis::SnrDb(v) => v.iter().map(|&d| NoiseLevel::SnrDb(d)).collect(),
            NoiseAxis::C0(v) => v.iter().map(|&c| NoiseLevel::C0(c)).collect(),
        }
    }

    fn len(&self) -> usize {
        match self {
            NoiseAxis::SnrDb(v) | NoiseAxis::C0(v) => v.len(),
        }
    }
}

fn default_trials() -> usize {
    5
}

/// Monte Carlo sweep specification; also the JSON config file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    pub n_values: Vec<usize>,
    pub noise_axis: NoiseAxis,
    #[serde(default = "default_trials")]
    pub trials_per_cell: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub step_tol: Option<f64>,
    #[serde(default)]
    pub certify: bool,
    /// Wall-clock timings make output files differ between runs, so they
    /// are opt-in.
    #[serde(default)]
    pub record_timing: bool,
    /// Worker threads; `None` uses all cores. Does not affect results.
    #[serde(default)]
    pub workers: Option<usize>,
}

/// One `(n, noise)` combination of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub n: usize,
    pub noise: NoiseLevel,
}

/// 50 evenly spaced values from −35 dB to 5 dB, rounded to 0.01 dB.
pub fn default_snr_axis() -> Vec<f64> {
    (0..50)
        .map(|k| (100.0 * (-35.0 + 40.0 * k as f64 / 49.0)).round() / 100.0)
        .collect()
}

pub const DEFAULT_C0_AXIS: [f64; 5] = [0.1, 0.3, 0.9, 2.7, 8.1];

impl ExperimentGrid {
    fn with_axis(n_values: Vec<usize>, noise_axis: NoiseAxis) -> Self {
        Self {
            n_values,
            noise_axis,
            trials_per_cell: default_trials(),
            base_seed: 0,
            max_iter: None,
            step_tol: None,
            certify: false,
            record_timing: false,
            workers: None,
        }
    }

    /// 9 sizes `n = 100, 150, …, 500` × 50 SNR values: 450 cells.
    pub fn default_heatmap() -> Self {
        Self::with_axis((100..=500).step_by(50).collect(), NoiseAxis::SnrDb(default_snr_axis()))
    }

    pub fn default_c0() -> Self {
        Self::with_axis(vec![50, 100, 200, 300, 400, 500], NoiseAxis::C0(DEFAULT_C0_AXIS.to_vec()))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.noise_axis.len() == 0 {
            return Err(Error::InvalidParameter("grid axes must be nonempty".into()));
        }
        if self.trials_per_cell < 1 {
            return Err(Error::InvalidParameter("trials_per_cell must be at least 1".into()));
        }
        for cell in self.cells() {
            if cell.n < 2 {
                return Err(Error::InvalidSize(format!("need n >= 2, got {}", cell.n)));
            }
            cell.noise.sigma(cell.n)?;
        }
        if let Some(w) = self.workers {
            if w == 0 {
                return Err(Error::InvalidParameter("workers must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Cells ordered by size, then by noise level.
    pub fn cells(&self) -> Vec<Cell> {
        let levels = self.noise_axis.levels();
        self.n_values
            .iter()
            .flat_map(|&n| levels.iter().map(move |&noise| (n, noise)))
            .enumerate()
            .map(|(index, (n, noise))| Cell { index, n, noise })
            .collect()
    }

    pub fn trial_options(&self) -> TrialOptions {
        TrialOptions {
            max_iter: self.max_iter,
            step_tol: self.step_tol,
            certify: self.certify,
            record_trace: false,
            record_timing: self.record_timing,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TrialOptions {
    pub max_iter: Option<usize>,
    pub step_tol: Option<f64>,
    pub certify: bool,
    pub record_trace: bool,
    pub record_timing: bool,
}

impl TrialOptions {
    pub fn pipeline(&self, n: usize) -> PipelineOptions {
        let mut gpm = GpmConfig::for_size(n);
        if let Some(m) = self.max_iter {
            gpm.max_iter = m;
        }
        if let Some(t) = self.step_tol {
            gpm.step_tol = t;
        }
        PipelineOptions {
            gpm: Some(gpm),
            record_trace: self.record_trace,
        }
    }
}

/// One row of `trials.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub sigma: f64,
    pub snr_db: Option<f64>,
    pub c0: Option<f64>,
    pub trial: usize,
    pub seed: u64,
    pub tau: Option<f64>,
    pub max_disp: Option<usize>,
    pub converged: bool,
    pub iterations: usize,
    pub certified: Option<bool>,
    pub wall_time_ms: Option<u64>,
}

/// Everything a single trial produced.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub truth: GroundTruth,
    pub recovery: Option<Recovery>,
    pub certificate: Option<CertificateReport>,
}

/// Generate, recover and score one instance, fully determined by its
/// parameters and `seed`.
pub fn run_trial(
    n: usize,
    noise: NoiseLevel,
    trial: usize,
    seed: u64,
    options: &TrialOptions,
) -> Result<TrialOutcome> {
    let started = Instant::now();
    let sigma = noise.sigma(n)?;
    let mut rng = rng_from_seed(seed);
    let truth = generate_ground_truth(n, &mut rng, true)?;
    let c = synthesize(&truth, sigma, &mut rng)?;
    let recovery = recover(&c, &options.pipeline(n), Some(&truth), &mut rng).ok();

    let (tau, max_disp) = match &recovery {
        Some(r) => (
            Some(kendall_tau_normalized(&r.ranking.ranks, &truth.ranks)?),
            Some(max_displacement(&r.ranking.ranks, &truth.ranks)?),
        ),
        None => (None, None),
    };
    let certificate = match (&recovery, options.certify) {
        (Some(r), true) => verify_certificate(&c, &r.estimate, &CertificateTolerances::for_size(n)).ok(),
        _ => None,
    };
    let certified = options
        .certify
        .then(|| certificate.as_ref().is_some_and(|c| c.certified));
    let record = TrialRecord {
        n,
        sigma,
        snr_db: noise.snr_db(),
        c0: noise.c0(),
        trial,
        seed,
        tau,
        max_disp,
        converged: recovery.as_ref().is_some_and(Recovery::converged),
        iterations: recovery.as_ref().map_or(0, |r| r.trace.iterations_used),
        certified,
        wall_time_ms: options
            .record_timing
            .then(|| started.elapsed().as_millis() as u64),
    };
    Ok(TrialOutcome {
        record,
        truth,
        recovery,
        certificate,
    })
}

/// Runs every `(cell, trial)` of the grid on a bounded worker pool. Output
/// is ordered by cell, then trial, regardless of completion order.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<TrialRecord>> {
    grid.validate()?;
    let options = grid.trial_options();
    let jobs: Vec<(Cell, usize)> = grid
        .cells()
        .into_iter()
        .flat_map(|cell| (0..grid.trials_per_cell).map(move |t| (cell, t)))
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|&(cell, t)| {
                let seed = derive_seed(grid.base_seed, cell.index, t);
                run_trial(cell.n, cell.noise, t, seed, &options).map(|o| o.record)
            })
            .collect::<Result<Vec<_>>>()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = grid.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(work)
}

/// SNR heatmap sweep.
pub fn heatmap_sweep(grid: &ExperimentGrid) -> Result<Vec<TrialRecord>> {
    if !matches!(grid.noise_axis, NoiseAxis::SnrDb(_)) {
        return Err(Error::InvalidParameter("heatmap needs an snr_db axis".into()));
    }
    run_grid(grid)
}

/// Fixed-`c₀` sweep with `σ = c₀ √(n / ln n)`.
pub fn c0_sweep(grid: &ExperimentGrid) -> Result<Vec<TrialRecord>> {
    if !matches!(grid.noise_axis, NoiseAxis::C0(_)) {
        return Err(Error::InvalidParameter("c0 sweep needs a c0 axis".into()));
    }
    run_grid(grid)
}

/// One row of `cells.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub n: usize,
    pub sigma: f64,
    pub snr_db: Option<f64>,
    pub c0: Option<f64>,
    pub trials: usize,
    pub mean_tau: Option<f64>,
    /// Sample standard deviation; 0 for a single trial.
    pub std_tau: Option<f64>,
    pub mean_max_disp: Option<f64>,
    pub converged_frac: f64,
    pub certified_frac: Option<f64>,
}

pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Some((mean, std))
}

/// Groups records by `(n, σ, snr_db, c₀)` in first-seen order.
pub fn aggregate(records: &[TrialRecord]) -> Vec<CellAggregate> {
    type Key = (usize, u64, Option<u64>, Option<u64>);
    let key = |r: &TrialRecord| -> Key {
        (
            r.n,
            r.sigma.to_bits(),
            r.snr_db.map(f64::to_bits),
            r.c0.map(f64::to_bits),
        )
    };
    let mut order: Vec<Key> = Vec::new();
    let mut groups: HashMap<Key, Vec<&TrialRecord>> = HashMap::new();
    for r in records {
        let k = key(r);
        groups
            .entry(k)
            .or_insert_with(|| {
                order.push(k);
                Vec::new()
            })
            .push(r);
    }
    order
        .iter()
        .map(|k| {
            let rs = &groups[k];
            let taus: Vec<f64> = rs.iter().filter_map(|r| r.tau).collect();
            let disps: Vec<f64> = rs.iter().filter_map(|r| r.max_disp.map(|d| d as f64)).collect();
            let certs: Vec<bool> = rs.iter().filter_map(|r| r.certified).collect();
            let ms = mean_std(&taus);
            CellAggregate {
                n: rs[0].n,
                sigma: rs[0].sigma,
                snr_db: rs[0].snr_db,
                c0: rs[0].c0,
                trials: rs.len(),
                mean_tau: ms.map(|m| m.0),
                std_tau: ms.map(|m| m.1),
                mean_max_disp: mean_std(&disps).map(|m| m.0),
                converged_frac: rs.iter().filter(|r| r.converged).count() as f64 / rs.len() as f64,
                certified_frac: (!certs.is_empty())
                    .then(|| certs.iter().filter(|&&c| c).count() as f64 / certs.len() as f64),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn write_csv<T: Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `trials.{csv,json}` and `cells.{csv,json}` into `dir`.
pub fn write_sweep_outputs(dir: &Path, records: &[TrialRecord], format: OutputFormat) -> Result<()> {
    fs::create_dir_all(dir)?;
    let cells = aggregate(records);
    match format {
        OutputFormat::Csv => {
            write_csv(records, fs::File::create(dir.join("trials.csv"))?)?;
            write_csv(&cells, fs::File::create(dir.join("cells.csv"))?)?;
        }
        OutputFormat::Json => {
            fs::write(dir.join("trials.json"), serde_json::to_string_pretty(records)?)?;
            fs::write(dir.join("cells.json"), serde_json::to_string_pretty(&cells)?)?;
        }
    }
    Ok(())
}

/// Detailed single-instance output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceReport {
    pub n: usize,
    pub snr_db: f64,
    pub sigma: f64,
    pub seed: u64,
    pub true_ranks: Vec<usize>,
    pub predicted_ranks: Vec<usize>,
    /// Angles of the recovered ranking, measured from the cut.
    pub estimated_angles: Vec<f64>,
    pub true_angles: Vec<f64>,
    pub tau: Option<f64>,
    pub max_disp: Option<usize>,
    pub angle_error: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub certificate: Option<CertificateReport>,
    pub trace: Option<GpmTrace>,
}

impl InstanceReport {
    /// Estimated angles listed by true rank.
    pub fn angles_by_true_rank(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (item, &r) in self.true_ranks.iter().enumerate() {
            if let Some(&a) = self.estimated_angles.get(item) {
                out[r] = a;
            }
        }
        out
    }
}

/// Single run with trace recording and certificate verification.
pub fn instance_report(n: usize, snr_db: f64, seed: u64) -> Result<InstanceReport> {
    let options = TrialOptions {
        certify: true,
        record_trace: true,
        ..Default::default()
    };
    let out = run_trial(n, NoiseLevel::SnrDb(snr_db), 0, seed, &options)?;
    let rec = out.record;
    let (predicted_ranks, estimated_angles, angle_err, trace) = match &out.recovery {
        Some(r) => (
            r.ranking.ranks.clone(),
            r.ranking.angles.clone(),
            angle_error(&r.estimate, &out.truth).ok(),
            Some(r.trace.clone()),
        ),
        None => (Vec::new(), Vec::new(), None, None),
    };
    Ok(InstanceReport {
        n,
        snr_db,
        sigma: rec.sigma,
        seed,
        true_ranks: out.truth.ranks.clone(),
        predicted_ranks,
        estimated_angles,
        true_angles: out.truth.angles.clone(),
        tau: rec.tau,
        max_disp: rec.max_disp,
        angle_error: angle_err,
        converged: rec.converged,
        iterations: rec.iterations,
        certificate: out.certificate,
        trace,
    })
}

/// Output of ranking user-supplied comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankReport {
    pub n: usize,
    pub ranks: Vec<usize>,
    pub angles: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub certificate: Option<CertificateReport>,
    pub trace: Option<GpmTrace>,
}

/// Embeds, synchronizes and ranks observed comparisons.
pub fn rank_comparisons(raw: &RawComparisons, options: &TrialOptions, seed: u64) -> Result<RankReport> {
    let c = embed_raw(raw)?;
    if !raw.is_connected() {
        return Err(Error::Validation(format!(
            "comparison graph over {} items is disconnected ({} observations)",
            raw.n(),
            raw.observations().len()
        )));
    }
    let n = raw.n();
    let mut rng = rng_from_seed(seed);
    let r = recover(&c, &options.pipeline(n), None, &mut rng)?;
    let certificate = if options.certify {
        Some(verify_certificate(&c, &r.estimate, &CertificateTolerances::for_size(n))?)
    } else {
        None
    };
    Ok(RankReport {
        n,
        converged: r.converged(),
        iterations: r.trace.iterations_used,
        ranks: r.ranking.ranks,
        angles: r.ranking.angles,
        certificate,
        trace: options.record_trace.then_some(r.trace),
    })
}

/// [`rank_comparisons`] on an `i,j,value` CSV file.
pub fn rank_csv(path: &Path, n: Option<usize>, options: &TrialOptions, seed: u64) -> Result<RankReport> {
    let raw = crate::io::read_raw_comparisons_file(path, n)?;
    rank_comparisons(&raw, options, seed)
}
