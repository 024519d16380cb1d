mod common;

use common::{jacobi_eigh, model_matrix};
use num_complex::Complex64;
use syncrank::model::generate_noise;
use syncrank::quotient::quotient_distance;
use syncrank::spectral::{
    default_tol, leading_eigenpair, smallest_eigenvalues, spectral_norm, DEFAULT_MAX_ITER,
};
use syncrank::{rng_from_seed, CMatrix};

#[test]
fn jacobi_oracle_reconstructs_its_input() {
    let (_, c) = model_matrix(12, 2.0, 1);
    let (vals, vecs) = jacobi_eigh(c.as_matrix());
    let mut rebuilt = CMatrix::zeros(12, 12);
    for (l, v) in vals.iter().zip(&vecs) {
        rebuilt += v * v.adjoint() * Complex64::new(*l, 0.0);
    }
    assert!((rebuilt - c.as_matrix()).norm() < 1e-10);
}

#[test]
fn leading_pair_matches_dense_oracle() {
    for (n, sigma, seed) in [(5, 0.5, 1), (20, 1.0, 2), (50, 2.0, 3), (50, 6.0, 4), (33, 0.0, 5)] {
        let (_, c) = model_matrix(n, sigma, seed);
        let (vals, vecs) = jacobi_eigh(c.as_matrix());
        let r = leading_eigenpair(c.as_matrix(), default_tol(n), DEFAULT_MAX_ITER, &mut rng_from_seed(seed))
            .unwrap();
        assert!((r.value - vals[n - 1]).abs() < 1e-8, "n={n}: {} vs {}", r.value, vals[n - 1]);
        assert!(quotient_distance(&r.vector, &vecs[n - 1]).unwrap().value() < 1e-6);
        assert!(r.residual <= default_tol(n));
        let direct = (c.as_matrix() * &r.vector - &r.vector * Complex64::new(r.value, 0.0)).norm();
        assert!((direct - r.residual).abs() < 1e-12);
    }
}

#[test]
fn smallest_pairs_match_dense_oracle() {
    for (n, sigma, seed) in [(6, 1.0, 7), (30, 3.0, 8), (50, 1.0, 9)] {
        let (_, c) = model_matrix(n, sigma, seed);
        let (vals, vecs) = jacobi_eigh(c.as_matrix());
        let r = smallest_eigenvalues(c.as_matrix(), 3, 1e-10 * n as f64, DEFAULT_MAX_ITER, &mut rng_from_seed(1))
            .unwrap();
        for k in 0..3 {
            assert!((r[k].value - vals[k]).abs() < 1e-8, "n={n} k={k}");
            let gap = (vals[k + 1] - vals[k]).min(if k > 0 { vals[k] - vals[k - 1] } else { f64::INFINITY });
            if gap > 1e-3 {
                assert!(quotient_distance(&r[k].vector, &vecs[k]).unwrap().value() < 1e-6);
            }
        }
    }
}

#[test]
fn spectral_norm_matches_dense_oracle() {
    for (n, sigma, seed) in [(10, 0.5, 1), (40, 1.0, 2)] {
        let (_, c) = model_matrix(n, sigma, seed);
        let (vals, _) = jacobi_eigh(c.as_matrix());
        let exact = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let s = spectral_norm(c.as_matrix(), 1e-14, 100_000, &mut rng_from_seed(seed)).unwrap();
        assert!((s - exact).abs() < 1e-8 * exact, "{s} vs {exact}");
    }
    // Pure noise: the top two singular values nearly coincide.
    let w = generate_noise(50, &mut rng_from_seed(3)).unwrap();
    let (vals, _) = jacobi_eigh(w.as_matrix());
    let exact = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let s = spectral_norm(w.as_matrix(), 1e-12, 100_000, &mut rng_from_seed(3)).unwrap();
    assert!((s - exact).abs() < 1e-4 * exact, "{s} vs {exact}");
}

#[test]
fn leading_eigenvalue_within_weyl_band() {
    let n = 100;
    let sigma = 1.0;
    let (_, c) = model_matrix(n, sigma, 21);
    let r = leading_eigenpair(c.as_matrix(), default_tol(n), DEFAULT_MAX_ITER, &mut rng_from_seed(0)).unwrap();
    let band = 2.0 * sigma * (n as f64).sqrt();
    assert!((r.value - n as f64).abs() <= band, "{}", r.value);
}

#[test]
fn noise_spectral_norm_concentrates() {
    for n in [100, 200] {
        for seed in 0..20 {
            let w = generate_noise(n, &mut rng_from_seed(seed)).unwrap();
            let s = spectral_norm(w.as_matrix(), 1e-6, 10_000, &mut rng_from_seed(seed + 100)).unwrap();
            let ratio = s / (n as f64).sqrt();
            assert!((1.5..=2.5).contains(&ratio), "n={n} seed={seed}: {ratio}");
        }
    }
    let w = generate_noise(400, &mut rng_from_seed(1)).unwrap();
    let r = spectral_norm(w.as_matrix(), 1e-6, 10_000, &mut rng_from_seed(2)).unwrap() / 20.0;
    assert!((1.7..=2.3).contains(&r), "{r}");
    let w = generate_noise(500, &mut rng_from_seed(2)).unwrap();
    let s = spectral_norm(w.as_matrix(), 1e-6, 10_000, &mut rng_from_seed(3)).unwrap();
    assert!(s <= 2.5 * 500f64.sqrt());
}

#[test]
fn eigensolvers_are_bitwise_deterministic() {
    let (_, c) = model_matrix(40, 2.0, 5);
    let a = leading_eigenpair(c.as_matrix(), 4e-9, DEFAULT_MAX_ITER, &mut rng_from_seed(9)).unwrap();
    let b = leading_eigenpair(c.as_matrix(), 4e-9, DEFAULT_MAX_ITER, &mut rng_from_seed(9)).unwrap();
    assert_eq!(a, b);
    let a = smallest_eigenvalues(c.as_matrix(), 2, 4e-9, DEFAULT_MAX_ITER, &mut rng_from_seed(9)).unwrap();
    let b = smallest_eigenvalues(c.as_matrix(), 2, 4e-9, DEFAULT_MAX_ITER, &mut rng_from_seed(9)).unwrap();
    assert_eq!(a, b);
}
