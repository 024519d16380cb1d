use std::collections::{HashMap, HashSet};
use std::fs;

use syncrank::harness::{
    aggregate, c0_sweep, default_snr_axis, derive_seed, heatmap_sweep, instance_report, mean_std,
    rank_csv, run_trial, write_sweep_outputs, ExperimentGrid, NoiseAxis, NoiseLevel, OutputFormat,
    TrialOptions, TrialRecord,
};
use syncrank::model::{generate_ground_truth, RawComparisons};
use syncrank::{io::write_raw_comparisons, rng_from_seed, Error};

fn grid(n_values: Vec<usize>, axis: NoiseAxis, trials: usize) -> ExperimentGrid {
    ExperimentGrid {
        n_values,
        noise_axis: axis,
        trials_per_cell: trials,
        base_seed: 2024,
        ..ExperimentGrid::default_heatmap()
    }
}

fn mean_tau_by<K: std::hash::Hash + Eq>(records: &[TrialRecord], key: impl Fn(&TrialRecord) -> K) -> HashMap<K, f64> {
    let mut acc: HashMap<K, (f64, usize)> = HashMap::new();
    for r in records {
        let e = acc.entry(key(r)).or_default();
        e.0 += r.tau.unwrap();
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

#[test]
fn derived_seeds_are_distinct_over_full_grid() {
    let g = ExperimentGrid::default_heatmap();
    let mut seen = HashSet::new();
    for cell in g.cells() {
        for t in 0..g.trials_per_cell {
            assert!(seen.insert(derive_seed(g.base_seed, cell.index, t)));
        }
    }
    assert_eq!(seen.len(), 450 * 5);
}

#[test]
fn run_trial_examples() {
    let opts = TrialOptions::default();
    for seed in 0..5 {
        let r = run_trial(30, NoiseLevel::SnrDb(10.0), 0, seed, &opts).unwrap().record;
        assert_eq!(r.tau, Some(1.0), "seed {seed}");
    }
    let hi = run_trial(300, NoiseLevel::SnrDb(0.0), 0, 1, &opts).unwrap().record;
    assert!(hi.tau.unwrap() > 0.9);
    let lo = run_trial(300, NoiseLevel::SnrDb(-30.0), 0, 1, &opts).unwrap().record;
    assert!((lo.tau.unwrap() - 0.5).abs() <= 0.1);
}

#[test]
fn run_trial_is_determined_by_seed() {
    let opts = TrialOptions {
        certify: true,
        ..Default::default()
    };
    let a = run_trial(60, NoiseLevel::Sigma(4.0), 3, 77, &opts).unwrap().record;
    let b = run_trial(60, NoiseLevel::Sigma(4.0), 3, 77, &opts).unwrap().record;
    assert_eq!(a, b);
    assert!(a.wall_time_ms.is_none());
}

#[test]
fn heatmap_high_snr_rows_recover() {
    let axis: Vec<f64> = default_snr_axis().into_iter().filter(|&s| s >= 0.0).collect();
    assert!(!axis.is_empty());
    let records = heatmap_sweep(&grid(vec![100, 300, 500], NoiseAxis::SnrDb(axis), 5)).unwrap();
    for cell in aggregate(&records) {
        assert!(cell.mean_tau.unwrap() >= 0.9, "{cell:?}");
    }
}

#[test]
fn heatmap_rows_are_flat_across_sizes_above_minus_ten_db() {
    let axis: Vec<f64> = default_snr_axis().into_iter().filter(|&s| s >= -10.0).collect();
    let g = grid((100..=500).step_by(50).collect(), NoiseAxis::SnrDb(axis.clone()), 5);
    let by_cell = mean_tau_by(&heatmap_sweep(&g).unwrap(), |r| (r.snr_db.unwrap().to_bits(), r.n));
    let mut failures = Vec::new();
    for snr in axis {
        let taus: Vec<f64> = g.n_values.iter().map(|&n| by_cell[&(snr.to_bits(), n)]).collect();
        let spread = taus.iter().cloned().fold(f64::MIN, f64::max) - taus.iter().cloned().fold(f64::MAX, f64::min);
        if spread > 0.05 {
            failures.push(format!("{snr} dB: spread {spread:.3}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn c0_point_three_stays_high() {
    let records = c0_sweep(&grid(vec![50, 100, 200, 400], NoiseAxis::C0(vec![0.3]), 5)).unwrap();
    for cell in aggregate(&records) {
        assert!(cell.mean_tau.unwrap() > 0.85, "{cell:?}");
    }
}

#[test]
fn c0_point_nine_solvable_small_chance_large() {
    let records = c0_sweep(&grid(vec![50, 400], NoiseAxis::C0(vec![0.9]), 5)).unwrap();
    let by_n = mean_tau_by(&records, |r| r.n);
    assert!((by_n[&50] - 0.7).abs() <= 0.1, "n=50: {}", by_n[&50]);
    assert!((by_n[&400] - 0.5).abs() <= 0.1, "n=400: {}", by_n[&400]);
}

#[test]
fn aggregates_match_recomputation_from_trials_csv() {
    let g = ExperimentGrid {
        certify: true,
        ..grid(vec![20, 40], NoiseAxis::SnrDb(vec![-20.0, 0.0]), 4)
    };
    let records = heatmap_sweep(&g).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_sweep_outputs(dir.path(), &records, OutputFormat::Csv).unwrap();

    let mut trials: Vec<TrialRecord> = csv::Reader::from_path(dir.path().join("trials.csv"))
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(trials.len(), 16);
    let mut cells = csv::Reader::from_path(dir.path().join("cells.csv")).unwrap();
    let headers = cells.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = cells.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 4);

    for (k, row) in rows.iter().enumerate() {
        let chunk: Vec<TrialRecord> = trials.drain(..4).collect();
        assert!(chunk.iter().all(|r| r.trial < 4));
        let taus: Vec<f64> = chunk.iter().map(|r| r.tau.unwrap()).collect();
        let (mean, std) = mean_std(&taus).unwrap();
        let emitted_mean: f64 = row[col("mean_tau")].parse().unwrap();
        let emitted_std: f64 = row[col("std_tau")].parse().unwrap();
        assert!((mean - emitted_mean).abs() <= 1e-12, "cell {k}");
        assert!((std - emitted_std).abs() <= 1e-12, "cell {k}");
        // Oracle for the sample standard deviation.
        let m = taus.iter().sum::<f64>() / 4.0;
        let s = (taus.iter().map(|t| (t - m).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert!((s - std).abs() <= 1e-12);
    }
}

#[test]
fn json_outputs_round_trip() {
    let records = heatmap_sweep(&grid(vec![20], NoiseAxis::SnrDb(vec![0.0]), 3)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_sweep_outputs(dir.path(), &records, OutputFormat::Json).unwrap();
    let back: Vec<TrialRecord> =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trials.json")).unwrap()).unwrap();
    assert_eq!(back, records);
    assert!(dir.path().join("cells.json").exists());
}

#[test]
fn invalid_grids_are_rejected() {
    let mut g = grid(vec![], NoiseAxis::SnrDb(vec![0.0]), 1);
    assert!(heatmap_sweep(&g).is_err());
    g.n_values = vec![10];
    g.trials_per_cell = 0;
    assert!(heatmap_sweep(&g).is_err());
    g.trials_per_cell = 1;
    g.noise_axis = NoiseAxis::C0(vec![-1.0]);
    assert!(c0_sweep(&g).is_err());
}

#[test]
fn instance_report_examples() {
    for seed in 0..3 {
        let rep = instance_report(30, 10.0, seed).unwrap();
        assert_eq!(rep.predicted_ranks, rep.true_ranks);
        let angles = rep.angles_by_true_rank();
        assert!(angles.windows(2).all(|w| w[0] < w[1]), "seed {seed}");
        assert!(rep.trace.is_some());
        assert!(rep.certificate.is_some());
    }
    let rep = instance_report(30, -35.0, 1).unwrap();
    assert!(rep.tau.is_some());
}

#[test]
fn rank_csv_examples() {
    let dir = tempfile::tempdir().unwrap();

    let truth = generate_ground_truth(15, &mut rng_from_seed(8), true).unwrap();
    let raw = RawComparisons::complete_from_ranks(&truth.ranks).unwrap();
    let path = dir.path().join("full.csv");
    write_raw_comparisons(&raw, fs::File::create(&path).unwrap()).unwrap();
    let rep = rank_csv(&path, Some(15), &TrialOptions::default(), 0).unwrap();
    assert_eq!(rep.ranks, truth.ranks);

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "i,j,value\n").unwrap();
    assert!(matches!(rank_csv(&empty, Some(5), &TrialOptions::default(), 0), Err(Error::Validation(_))));

    let dup = dir.path().join("dup.csv");
    fs::write(&dup, "i,j,value\n0,1,1\n1,2,1\n1,0,-1\n").unwrap();
    match rank_csv(&dup, Some(3), &TrialOptions::default(), 0) {
        Err(Error::DuplicatePair { i, j }) => assert_eq!((i.min(j), i.max(j)), (0, 1)),
        other => panic!("expected duplicate pair error, got {other:?}"),
    }

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "i,j,value\n0,1,1\n1,x,1\n").unwrap();
    assert!(matches!(rank_csv(&bad, Some(3), &TrialOptions::default(), 0), Err(Error::Parse { line: 3, .. })));

    let out = dir.path().join("out.csv");
    fs::write(&out, "i,j,value\n0,1,7\n").unwrap();
    assert!(matches!(rank_csv(&out, Some(3), &TrialOptions::default(), 0), Err(Error::OutOfRange { .. })));
}
