//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use syncrank::{CMatrix, CVector};

/// Dense eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations
/// on the real embedding `[[Re A, −Im A], [Im A, Re A]]`.
///
/// Every eigenvalue of `A` appears twice in the embedding; one copy is kept.
/// Returns eigenvalues ascending with unit eigenvectors.
pub fn jacobi_eigh(a: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let n = a.nrows();
    let m = 2 * n;
    let mut s = vec![vec![0.0f64; m]; m];
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            s[i][j] = z.re;
            s[i + n][j + n] = z.re;
            s[i + n][j] = z.im;
            s[i][j + n] = -z.im;
        }
    }
    let mut v = vec![vec![0.0f64; m]; m];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob: f64 = s.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob.max(1e-300) {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - sn * vq;
                    row[q] = sn * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&x, &y| s[x][x].total_cmp(&s[y][y]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for pair in idx.chunks(2) {
        let k = pair[0];
        values.push(s[k][k]);
        let mut x = CVector::from_fn(n, |i, _| Complex64::new(v[i][k], v[i + n][k]));
        let norm = x.norm();
        x.unscale_mut(norm);
        vectors.push(x);
    }
    (values, vectors)
}

/// Fraction of concordant pairs by direct enumeration.
pub fn kendall_brute(p: &[usize], q: &[usize]) -> f64 {
    let n = p.len();
    let mut concordant = 0u64;
    let mut total = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            total += 1;
            if (p[i] < p[j]) == (q[i] < q[j]) {
                concordant += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        concordant as f64 / total as f64
    }
}

/// `min_θ ‖x − e^{iθ} y‖₂` over a uniform grid of `steps` angles.
pub fn grid_quotient_distance(x: &CVector, y: &CVector, steps: usize) -> f64 {
    (0..steps)
        .map(|s| {
            let r = Complex64::cis(std::f64::consts::TAU * s as f64 / steps as f64);
            x.iter()
                .zip(y.iter())
                .map(|(a, b)| (a - r * b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random Hermitian matrix `z z* + σ W` from the model, for oracle checks.
pub fn model_matrix(n: usize, sigma: f64, seed: u64) -> (syncrank::GroundTruth, syncrank::ComparisonMatrix) {
    let mut rng = syncrank::rng_from_seed(seed);
    let t = syncrank::model::generate_ground_truth(n, &mut rng, true).unwrap();
    let c = syncrank::model::synthesize(&t, sigma, &mut rng).unwrap();
    (t, c)
}
