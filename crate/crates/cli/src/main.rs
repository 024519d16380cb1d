use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use syncrank::certificate::CertificateReport;
use syncrank::harness::{
    c0_sweep, heatmap_sweep, instance_report, rank_csv, run_grid, run_trial, write_sweep_outputs,
    ExperimentGrid, NoiseAxis, NoiseLevel, OutputFormat, TrialOptions, TrialRecord,
};

#[derive(Parser)]
#[command(name = "syncrank", version, about = "Ranking from noisy pairwise comparisons by phase synchronization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one synthetic trial.
    Simulate(SimulateArgs),
    /// Monte Carlo sweep over sizes and SNR values.
    Heatmap(SweepArgs),
    /// Monte Carlo sweep over sizes at fixed c0 = σ·sqrt(ln n / n).
    C0Sweep(SweepArgs),
    /// Rank items from an `i,j,value` comparison CSV.
    Rank(RankArgs),
    /// Detailed single-instance report with trace and certificate.
    Instance(InstanceArgs),
    /// Certificate campaign: repeated certified trials at one noise level.
    Certify(CertifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct GpmArgs {
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    step_tol: Option<f64>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct NoiseArgs {
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
}

impl NoiseArgs {
    fn level(&self) -> NoiseLevel {
        match (self.snr_db, self.sigma, self.c0) {
            (Some(d), _, _) => NoiseLevel::SnrDb(d),
            (_, Some(s), _) => NoiseLevel::Sigma(s),
            (_, _, Some(c)) => NoiseLevel::C0(c),
            _ => unreachable!("clap requires one noise flag"),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    certify: bool,
    /// Also write trace.csv (requires --out).
    #[arg(long, requires = "out")]
    trace: bool,
    #[command(flatten)]
    gpm: GpmArgs,
    /// Directory for report.json; prints to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON grid file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    c0: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    certify: bool,
    #[command(flatten)]
    gpm: GpmArgs,
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-trial wall time (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    input: PathBuf,
    /// Item count; inferred from the largest index when absent.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    certify: bool,
    #[arg(long, requires = "out")]
    trace: bool,
    #[command(flatten)]
    gpm: GpmArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "c0")]
    snr_db: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gpm: GpmArgs,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> AnyResult<()> {
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Heatmap(a) => sweep(a, false),
        Command::C0Sweep(a) => sweep(a, true),
        Command::Rank(a) => rank(a),
        Command::Instance(a) => instance(a),
        Command::Certify(a) => certify(a),
    }
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> AnyResult<()> {
    let json = serde_json::to_string_pretty(value)?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.json"), json + "\n")?;
        }
        // A closed pipe (e.g. `| head`) is not an error.
        None => match writeln!(std::io::stdout(), "{json}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
            _ => {}
        },
    }
    Ok(())
}

fn write_trace(trace: &syncrank::gpm::GpmTrace, dir: &Path) -> AnyResult<()> {
    trace.write_csv(fs::File::create(dir.join("trace.csv"))?)?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    #[serde(flatten)]
    record: TrialRecord,
    certificate: Option<CertificateReport>,
}

fn simulate(a: SimulateArgs) -> AnyResult<()> {
    let opts = TrialOptions {
        max_iter: a.gpm.max_iter,
        step_tol: a.gpm.step_tol,
        certify: a.certify,
        record_trace: a.trace,
        record_timing: false,
    };
    let out = run_trial(a.n, a.noise.level(), 0, a.seed, &opts)?;
    emit(
        &SimulateReport {
            record: out.record,
            certificate: out.certificate,
        },
        a.out.as_deref(),
    )?;
    if let (true, Some(dir), Some(rec)) = (a.trace, &a.out, &out.recovery) {
        write_trace(&rec.trace, dir)?;
    }
    Ok(())
}

fn sweep(a: SweepArgs, c0: bool) -> AnyResult<()> {
    let mut grid = match &a.config {
        Some(p) => ExperimentGrid::from_json_file(p)?,
        None if c0 => ExperimentGrid::default_c0(),
        None => ExperimentGrid::default_heatmap(),
    };
    if let Some(n) = a.n {
        grid.n_values = n;
    }
    match (a.snr_db, a.c0) {
        (Some(_), Some(_)) => return Err("give either --snr-db or --c0, not both".into()),
        (Some(v), None) => grid.noise_axis = NoiseAxis::SnrDb(v),
        (None, Some(v)) => grid.noise_axis = NoiseAxis::C0(v),
        (None, None) => {}
    }
    match (&grid.noise_axis, c0) {
        (NoiseAxis::SnrDb(_), true) => return Err("c0-sweep needs a c0 axis".into()),
        (NoiseAxis::C0(_), false) => return Err("heatmap needs an snr_db axis".into()),
        _ => {}
    }
    if let Some(t) = a.trials {
        grid.trials_per_cell = t;
    }
    if let Some(s) = a.seed {
        grid.base_seed = s;
    }
    grid.certify |= a.certify;
    grid.record_timing |= a.timing;
    grid.max_iter = a.gpm.max_iter.or(grid.max_iter);
    grid.step_tol = a.gpm.step_tol.or(grid.step_tol);
    grid.workers = a.workers.or(grid.workers);

    let records = if c0 { c0_sweep(&grid)? } else { heatmap_sweep(&grid)? };
    write_sweep_outputs(&a.out, &records, a.format.into())?;
    eprintln!("{} trials over {} cells written to {}", records.len(), grid.cells().len(), a.out.display());
    Ok(())
}

fn rank(a: RankArgs) -> AnyResult<()> {
    let opts = TrialOptions {
        max_iter: a.gpm.max_iter,
        step_tol: a.gpm.step_tol,
        certify: a.certify,
        record_trace: a.trace,
        record_timing: false,
    };
    let mut report = rank_csv(&a.input, a.n, &opts, a.seed)?;
    let trace = report.trace.take();
    emit(&report, a.out.as_deref())?;
    if let (Some(dir), Some(t)) = (&a.out, &trace) {
        write_trace(t, dir)?;
    }
    Ok(())
}

fn instance(a: InstanceArgs) -> AnyResult<()> {
    let report = instance_report(a.n, a.snr_db, a.seed)?;
    emit(&report, a.out.as_deref())?;
    if let (Some(dir), Some(t)) = (&a.out, &report.trace) {
        write_trace(t, dir)?;
    }
    Ok(())
}

fn certify(a: CertifyArgs) -> AnyResult<()> {
    let axis = match (a.snr_db, a.c0) {
        (Some(d), None) => NoiseAxis::SnrDb(vec![d]),
        (None, Some(c)) => NoiseAxis::C0(vec![c]),
        _ => NoiseAxis::C0(vec![0.25]),
    };
    let grid = ExperimentGrid {
        n_values: vec![a.n],
        noise_axis: axis,
        trials_per_cell: a.trials,
        base_seed: a.seed,
        max_iter: a.gpm.max_iter,
        step_tol: a.gpm.step_tol,
        certify: true,
        record_timing: false,
        workers: a.workers,
    };
    let records = run_grid(&grid)?;
    let certified = records.iter().filter(|r| r.certified == Some(true)).count();
    write_sweep_outputs(&a.out, &records, a.format.into())?;
    println!("certified {certified}/{} trials", records.len());
    Ok(())
}
