//! Global ranking recovery from noisy pairwise comparisons by phase
//! synchronization.
//!
//! Items are encoded as phases `z_k = exp(i θ_k)` on the upper half circle,
//! observations form a Hermitian matrix `C = z z* + σ W`, and the ranking is
//! recovered by a spectral start followed by the generalized power method
//! `x ← P(C x)`. A dual certificate `S = diag(μ) − C` checks that the
//! recovered `x x*` is the unique optimum of the semidefinite relaxation
//! `max Tr(C X)` subject to `diag(X) = 1, X ⪰ 0`.
//!
//! ```
//! use syncrank::{model, pipeline, rng_from_seed};
//!
//! let mut rng = rng_from_seed(7);
//! let truth = model::generate_ground_truth(30, &mut rng, true).unwrap();
//! let c = model::synthesize(&truth, 0.1, &mut rng).unwrap();
//! let out = pipeline::recover(&c, &Default::default(), Some(&truth), &mut rng).unwrap();
//! assert_eq!(out.ranking.ranks, truth.ranks);
//! ```

pub mod certificate;
pub mod error;
pub mod gpm;
pub mod harness;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod quotient;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{ComparisonMatrix, GroundTruth, RankingVector, RawComparisons};

use rand::SeedableRng;

/// Random source used for every generation and solver step.
pub type Rng = rand_chacha::ChaCha8Rng;

/// One 64-bit seed fully determines a trial.
pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Complex dense vector.
pub type CVector = nalgebra::DVector<num_complex::Complex64>;
/// Complex dense matrix.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
