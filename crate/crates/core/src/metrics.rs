//! Rank extraction from phases and ranking-quality metrics.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::model::{ComparisonMatrix, GroundTruth, RankingVector};
use crate::quotient::align_phase;
use crate::{Error, Result};

/// Gaps within this many radians of the largest gap count as tied.
const GAP_TIE_TOL: f64 = 1e-9;

/// Ranking read off the circle. `ranks[k]` is the position of item `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractedRanking {
    pub ranks: Vec<usize>,
    /// Angles in `[0, 2π)` measured from the first item after the cut.
    pub angles: Vec<f64>,
    /// Width of the empty arc where the circle was cut.
    pub cut_gap: f64,
}

impl ExtractedRanking {
    /// Same ordering read in the opposite direction.
    pub fn reversed(&self) -> Self {
        let n = self.ranks.len();
        let span = self.angles.iter().cloned().fold(0.0, f64::max);
        Self {
            ranks: self.ranks.iter().map(|r| n - 1 - r).collect(),
            angles: self.angles.iter().map(|a| span - a).collect(),
            cut_gap: self.cut_gap,
        }
    }
}

pub fn validate_permutation(p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &r in p {
        if r >= p.len() || std::mem::replace(&mut seen[r], true) {
            return Err(Error::InvalidPermutation(format!(
                "{r} is out of range or repeated in a permutation of length {}",
                p.len()
            )));
        }
    }
    Ok(())
}

fn check_pair(a: &[usize], b: &[usize]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: b.len(),
            actual: a.len(),
        });
    }
    validate_permutation(a)?;
    validate_permutation(b)
}

/// Sorts phases around the circle, cuts at the widest empty arc, and ranks
/// items in increasing angle from the cut.
///
/// Tied widest arcs go to the cut whose first item has the smallest index.
pub fn extract_ranking(x: &RankingVector) -> ExtractedRanking {
    let theta: Vec<f64> = x
        .as_vector()
        .iter()
        .map(|z| z.arg().rem_euclid(TAU))
        .map(|a| if a >= TAU { 0.0 } else { a })
        .collect();
    let n = theta.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]).then(a.cmp(&b)));
    if n < 2 {
        return ExtractedRanking {
            ranks: vec![0; n],
            angles: vec![0.0; n],
            cut_gap: TAU,
        };
    }

    // gaps[p]: arc from order[p] to order[p + 1], wrapping at the end.
    let gaps: Vec<f64> = (0..n)
        .map(|p| {
            if p + 1 < n {
                theta[order[p + 1]] - theta[order[p]]
            } else {
                theta[order[0]] + TAU - theta[order[n - 1]]
            }
        })
        .collect();
    let widest = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cut = (0..n)
        .filter(|&p| gaps[p] >= widest - GAP_TIE_TOL)
        .min_by_key(|&p| order[(p + 1) % n])
        .expect("at least one widest gap");

    let start = (cut + 1) % n;
    let origin = theta[order[start]];
    let mut ranks = vec![0; n];
    let mut angles = vec![0.0; n];
    for pos in 0..n {
        let item = order[(start + pos) % n];
        ranks[item] = pos;
        angles[item] = (theta[item] - origin).rem_euclid(TAU);
    }
    ExtractedRanking {
        ranks,
        angles,
        cut_gap: gaps[cut],
    }
}

/// Agreement of a ranking with the data: `Σ_{i<j} sign(Im C_ij) sign(r_i − r_j)`.
///
/// Under the model `Im C_ij ≈ sin(θ_i − θ_j)`, which has the sign of
/// `r_i − r_j`, so the correct orientation scores positive. Imaginary parts
/// below rounding level count as zero.
pub fn orientation_score(ranks: &[usize], c: &ComparisonMatrix) -> i64 {
    let n = ranks.len().min(c.n());
    let scale = c.as_matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let eps = 1e-12 * scale.max(1.0);
    let mut score = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let im = c.get(i, j).im;
            if im.abs() <= eps {
                continue;
            }
            let s = if im > 0.0 { 1 } else { -1 };
            let d = match ranks[i].cmp(&ranks[j]) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
            };
            score += s * d;
        }
    }
    score
}

/// Chooses between a ranking and its reverse by [`orientation_score`];
/// ties keep the input.
pub fn orientation_resolve(predicted: &ExtractedRanking, c: &ComparisonMatrix) -> ExtractedRanking {
    if orientation_score(&predicted.ranks, c) < 0 {
        predicted.reversed()
    } else {
        predicted.clone()
    }
}

/// Sorts `v` and returns the number of inversions it contained.
fn sort_count_inversions(v: &mut [usize], buf: &mut Vec<usize>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = sort_count_inversions(&mut v[..mid], buf) + sort_count_inversions(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf.push(v[i]);
            i += 1;
        } else {
            // v[j] jumps ahead of every remaining left element.
            inv += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    inv
}

/// Fraction of unordered pairs ordered the same way by both rankings.
///
/// `O(n log n)` via merge-sort inversion counting. Length-0 and length-1
/// inputs have no pairs and score 1.
pub fn kendall_tau_normalized(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    check_pair(predicted, truth)?;
    let n = truth.len();
    if n < 2 {
        return Ok(1.0);
    }
    // Predicted positions listed in true-rank order.
    let mut by_truth = vec![0; n];
    for (item, &r) in truth.iter().enumerate() {
        by_truth[r] = predicted[item];
    }
    let discordant = sort_count_inversions(&mut by_truth, &mut Vec::with_capacity(n));
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok((pairs - discordant) as f64 / pairs as f64)
}

/// `max_k |pred_k − truth_k|`.
pub fn max_displacement(predicted: &[usize], truth: &[usize]) -> Result<usize> {
    check_pair(predicted, truth)?;
    Ok(predicted
        .iter()
        .zip(truth)
        .map(|(&p, &t)| p.abs_diff(t))
        .max()
        .unwrap_or(0))
}

/// Largest wrapped angle error in `[0, π]` after optimal global alignment.
pub fn angle_error(estimate: &RankingVector, truth: &GroundTruth) -> Result<f64> {
    let z = truth.vector.as_vector();
    let aligned = align_phase(estimate.as_vector(), z)?;
    Ok(aligned
        .iter()
        .zip(z.iter())
        .map(|(a, t)| (a * t.conj()).arg().abs().min(PI))
        .fold(0.0, f64::max))
}
