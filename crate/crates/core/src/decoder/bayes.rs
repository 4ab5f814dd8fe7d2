//! Exhaustive Bayesian decoding for small populations.

use crate::channel::{patterns2, FeedbackVector, JointKernel};
use crate::codebook::TransmissionMatrix;
use crate::error::{Error, Result};

use super::partition::Partition;
use super::typical::count_patterns;

pub const BAYES_MAX_USERS: usize = 16;

/// `log p(y | x_i OR x_j)` for every pair, as an `N x N` symmetric table
/// (diagonal unused, `-inf` when `y` is impossible under the pair).
pub fn pair_log_likelihoods(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    kernel: &JointKernel,
) -> Result<Vec<Vec<f64>>> {
    let n = x.n_users();
    if y.len() != x.n_rounds() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rounds(),
            actual: y.len(),
        });
    }
    let logp: Vec<((bool, bool), f64)> = patterns2()
        .map(|(w, w0)| ((w, w0), kernel.channel.p_y_given_y0(w, w0).ln()))
        .collect();
    let mut ll = vec![vec![f64::NEG_INFINITY; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = x.row(i).or(x.row(j));
            let mut acc = 0.0;
            for &((w, w0), lp) in &logp {
                let c = count_patterns(&[y.bits(), &v], &[w, w0])?;
                if c > 0 {
                    acc += c as f64 * lp;
                }
            }
            ll[i][j] = acc;
            ll[j][i] = acc;
        }
    }
    Ok(ll)
}

/// Maximises `W(z) = sum over pairs split by z of p(y | x_i OR x_j)` over all
/// 2-partitions.
///
/// Label vectors are enumerated as masks with user 0 as the most significant
/// bit (bit set means label 2), so mask order is lexicographic order. Ties
/// within `1e-9 * max(1, best)` of the scaled weight go to the smaller mask.
pub fn bayesian_decode(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    kernel: &JointKernel,
) -> Result<Partition> {
    let n = x.n_users();
    if n > BAYES_MAX_USERS {
        return Err(Error::InvalidParameter(format!(
            "{n} users exceeds the exhaustive limit {BAYES_MAX_USERS}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two users".into()));
    }
    if kernel.k != 2 {
        return Err(Error::InvalidParameter(
            "Bayesian decoding supports k = 2 only".into(),
        ));
    }
    let ll = pair_log_likelihoods(x, y, kernel)?;
    let lmax = ll
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lin: Vec<Vec<f64>> = ll
        .iter()
        .map(|r| {
            r.iter()
                .map(|&l| {
                    if lmax.is_finite() {
                        (l - lmax).exp()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();

    // Bit of user i inside the mask.
    let bit = |i: usize| 1u32 << (n - 1 - i);
    let full = (1u32 << n) - 1;
    let mut mask = 0u32;
    let mut w = 0.0f64;
    let mut best_mask = u32::MAX;
    let mut best = f64::NEG_INFINITY;
    for step in 1u32..=full {
        // Gray code: flip the user whose bit is the lowest set bit of `step`.
        let flip_bit = step.trailing_zeros() as usize;
        let v = n - 1 - flip_bit;
        let joining = mask & bit(v) == 0;
        let mut delta = 0.0;
        for j in 0..n {
            if j == v {
                continue;
            }
            let same_side_before = (mask & bit(j) != 0) == !joining;
            delta += if same_side_before {
                lin[v][j]
            } else {
                -lin[v][j]
            };
        }
        mask ^= bit(v);
        w += delta;
        if mask == full {
            continue;
        }
        let tol = 1e-9 * best.max(1.0);
        if w > best + tol || (w >= best - tol && mask < best_mask) {
            best = best.max(w);
            best_mask = mask;
        }
    }
    let labels = (0..n)
        .map(|i| if best_mask & bit(i) != 0 { 2 } else { 1 })
        .collect();
    Partition::new(labels, 2)
}
