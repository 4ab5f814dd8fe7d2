//! Pattern counts and the typicality tests.

use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::channel::{patterns2, FeedbackVector, JointKernel};
use crate::error::{Error, Result};

/// Slack of the per-block test relative to the full test: `2 eps`
/// (implied by the full test) or `eps / 2` (implies it).
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    #[default]
    Sufficient,
    Necessary,
}

impl Strictness {
    pub fn slack(&self, eps: f64) -> f64 {
        match self {
            Strictness::Sufficient => 2.0 * eps,
            Strictness::Necessary => eps / 2.0,
        }
    }
}

// Absorbs rounding in `n / t` so that a count exactly on the band edge passes.
const BAND_TOL: f64 = 1e-12;

#[inline]
fn in_band(count: usize, t: usize, p: f64, slack: f64) -> bool {
    (count as f64 / t as f64 - p).abs() <= slack / 4.0 + BAND_TOL
}

/// Closed-band test of a single count; zero-probability patterns need a zero count.
#[inline]
pub fn typical_count(count: usize, t: usize, p: f64, slack: f64) -> bool {
    if p == 0.0 {
        count == 0
    } else {
        in_band(count, t, p, slack)
    }
}

fn check_lengths(vectors: &[&BitRow]) -> Result<usize> {
    let t = vectors.first().map_or(0, |v| v.len());
    for v in vectors {
        if v.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                actual: v.len(),
            });
        }
    }
    Ok(t)
}

/// Number of positions where `(vectors[0][t], vectors[1][t], ...)` equals
/// `pattern`.
pub fn count_patterns(vectors: &[&BitRow], pattern: &[bool]) -> Result<usize> {
    if vectors.len() != pattern.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            actual: pattern.len(),
        });
    }
    let t = check_lengths(vectors)?;
    if vectors.is_empty() {
        return Ok(0);
    }
    let n_words = t.div_ceil(64);
    let mut total = 0usize;
    for wi in 0..n_words {
        let mut acc = vectors[0].word_mask(wi);
        for (v, &b) in vectors.iter().zip(pattern) {
            let w = v.words()[wi];
            acc &= if b { w } else { !w };
        }
        total += acc.count_ones() as usize;
    }
    Ok(total)
}

/// Counts of every pattern over `L` aligned vectors.
///
/// Index bit `L - 1 - k` holds the bit of vector `k`, so the first vector is
/// the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCounts {
    width: usize,
    table: Vec<usize>,
}

impl PatternCounts {
    pub fn of(vectors: &[&BitRow]) -> Result<Self> {
        check_lengths(vectors)?;
        let width = vectors.len();
        if width > 16 {
            return Err(Error::InvalidParameter(format!(
                "{width} vectors is too many to tabulate"
            )));
        }
        let mut table = vec![0usize; 1 << width];
        for (idx, slot) in table.iter_mut().enumerate() {
            let pattern: Vec<bool> = (0..width)
                .map(|k| idx >> (width - 1 - k) & 1 == 1)
                .collect();
            *slot = count_patterns(vectors, &pattern)?;
        }
        Ok(PatternCounts { width, table })
    }

    pub fn get(&self, pattern: &[bool]) -> usize {
        assert_eq!(pattern.len(), self.width);
        let idx = pattern.iter().fold(0usize, |a, &b| (a << 1) | b as usize);
        self.table[idx]
    }

    pub fn total(&self) -> usize {
        self.table.iter().sum()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Strong typicality of `[y, v]` against `p_{y,y0}` with slack `eps / 4` per
/// pattern.
pub fn full_typical_membership(
    y: &FeedbackVector,
    v: &FeedbackVector,
    kernel: &JointKernel,
    eps: f64,
) -> bool {
    let t = y.len();
    if t == 0 || v.len() != t {
        return false;
    }
    patterns2().all(|(w, w0)| {
        let n = count_patterns(&[y.bits(), v.bits()], &[w, w0]).expect("lengths checked");
        typical_count(n, t, kernel.p_y_y0(w, w0), eps)
    })
}

/// Marginal test on `y` alone: `|N(1|y)/T - p1| <= eps' / 4`.
pub fn marginal_typical(
    y: &FeedbackVector,
    kernel: &JointKernel,
    eps: f64,
    strictness: Strictness,
) -> bool {
    let t = y.len();
    if t == 0 {
        return false;
    }
    let slack = strictness.slack(eps);
    let ones = y.bits().count_ones();
    typical_count(ones, t, kernel.p1(), slack) && typical_count(t - ones, t, kernel.p0(), slack)
}

/// Rounds split by the observed bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSplit {
    ones: BitRow,
    zeros: BitRow,
}

impl BlockSplit {
    pub fn new(y: &FeedbackVector) -> Self {
        BlockSplit {
            ones: y.bits().clone(),
            zeros: y.bits().not(),
        }
    }

    pub fn n_rounds(&self) -> usize {
        self.ones.len()
    }

    /// Rows `t` with `y_t = w`, as a mask.
    pub fn mask(&self, w: bool) -> &BitRow {
        if w {
            &self.ones
        } else {
            &self.zeros
        }
    }

    /// `T^w`.
    pub fn t_w(&self, w: bool) -> usize {
        self.mask(w).count_ones()
    }

    pub fn indices(&self, w: bool) -> Vec<usize> {
        self.mask(w).iter_ones().collect()
    }

    /// `T^w_{u,v}` for the codeword pair `(xi, xj)`, indexed `[w][u][v]`.
    pub fn pair_counts(&self, xi: &BitRow, xj: &BitRow) -> [[[usize; 2]; 2]; 2] {
        let mut out = [[[0; 2]; 2]; 2];
        for w in [false, true] {
            for u in [false, true] {
                for v in [false, true] {
                    out[w as usize][u as usize][v as usize] =
                        count_patterns(&[self.mask(w), xi, xj], &[true, u, v]).expect("aligned");
                }
            }
        }
        out
    }

    /// `#{t : y_t = w, xi_t = xj_t = 0}`.
    pub fn silent_count(&self, w: bool, xi: &BitRow, xj: &BitRow) -> usize {
        let m = self.mask(w);
        m.words()
            .iter()
            .zip(xi.words())
            .zip(xj.words())
            .map(|((&m, &a), &b)| (m & !(a | b)).count_ones() as usize)
            .sum()
    }
}

/// Per-block edge test: in each block `w` the number of rounds where both
/// codewords are silent must be within `eps' / 4` of `p_{y,y0}(w, 0)`.
///
/// Assumes the marginal test on `y` already passed.
pub fn simplified_edge_test(
    split: &BlockSplit,
    xi: &BitRow,
    xj: &BitRow,
    kernel: &JointKernel,
    eps: f64,
    strictness: Strictness,
) -> bool {
    let t = split.n_rounds();
    let slack = strictness.slack(eps);
    [true, false].into_iter().all(|w| {
        let silent = split.silent_count(w, xi, xj);
        let busy = split.t_w(w) - silent;
        let p_silent = kernel.p_y_y0(w, false);
        if kernel.p_y_y0(w, true) == 0.0 && busy != 0 {
            return false;
        }
        typical_count(silent, t, p_silent, slack)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::rng::{stream, Role};
    use rand::Rng;

    fn row(s: &str) -> BitRow {
        BitRow::from_str01(s)
    }

    fn random_row<R: Rng>(t: usize, p: f64, rng: &mut R) -> BitRow {
        BitRow::from_bools(&(0..t).map(|_| rng.gen::<f64>() < p).collect::<Vec<_>>())
    }

    #[test]
    fn counts_small_pattern() {
        assert_eq!(
            count_patterns(&[&row("110"), &row("100")], &[true, true]).unwrap(),
            1
        );
        let v = row("0110100");
        let z = count_patterns(&[&v], &[false]).unwrap();
        let o = count_patterns(&[&v], &[true]).unwrap();
        assert_eq!(z + o, 7);
        assert!(count_patterns(&[&row("11"), &row("1")], &[true, true]).is_err());
    }

    #[test]
    fn counts_match_positionwise_scan() {
        let mut rng = stream(3, Role::Auxiliary);
        let vs: Vec<BitRow> = (0..3).map(|_| random_row(201, 0.4, &mut rng)).collect();
        let refs: Vec<&BitRow> = vs.iter().collect();
        let table = PatternCounts::of(&refs).unwrap();
        assert_eq!(table.total(), 201);
        for idx in 0..8 {
            let pat = [idx & 4 != 0, idx & 2 != 0, idx & 1 != 0];
            let naive = (0..201)
                .filter(|&t| (0..3).all(|k| vs[k].get(t) == pat[k]))
                .count();
            assert_eq!(count_patterns(&refs, &pat).unwrap(), naive);
            assert_eq!(table.get(&pat), naive);
        }
    }

    // T = 400, p = 0.5, q10 = 0.1, q01 = 0.2 gives integral expected counts.
    fn exact_instance() -> (FeedbackVector, FeedbackVector, JointKernel) {
        let k = JointKernel::pair(0.5, ChannelParams::new(0.1, 0.2).unwrap()).unwrap();
        let mut y = Vec::new();
        let mut v = Vec::new();
        for (w, w0) in patterns2() {
            let n = (400.0 * k.p_y_y0(w, w0)).round() as usize;
            y.extend(std::iter::repeat(w).take(n));
            v.extend(std::iter::repeat(w0).take(n));
        }
        assert_eq!(y.len(), 400);
        (
            FeedbackVector::new(BitRow::from_bools(&y)),
            FeedbackVector::new(BitRow::from_bools(&v)),
            k,
        )
    }

    #[test]
    fn exact_frequencies_are_typical() {
        let (y, v, k) = exact_instance();
        assert!(full_typical_membership(&y, &v, &k, 1e-9));
    }

    #[test]
    fn one_count_out_of_band_fails() {
        let (y, v, k) = exact_instance();
        // Move 6 rounds from (1,1) to (0,1): off by 6 > 400 * 0.05 / 4 = 5.
        let mut yb: Vec<bool> = y.bits().iter().collect();
        let mut moved = 0;
        for t in 0..400 {
            if moved < 6 && yb[t] && v.bits().get(t) {
                yb[t] = false;
                moved += 1;
            }
        }
        let y2 = FeedbackVector::new(BitRow::from_bools(&yb));
        assert!(!full_typical_membership(&y2, &v, &k, 0.05));
        assert!(full_typical_membership(&y2, &v, &k, 0.06));
    }

    #[test]
    fn forbidden_pattern_fails_at_any_slack() {
        let k = JointKernel::pair(0.5, ChannelParams::new(0.0, 0.1).unwrap()).unwrap();
        let y = FeedbackVector::from_str01("1000");
        let v = FeedbackVector::from_str01("0000");
        assert!(!full_typical_membership(&y, &v, &k, 100.0));
    }

    #[test]
    fn band_edge_is_closed() {
        // T = 80, p(1,0) = 0.025 -> expected 2; sufficient slack 2 eps = 0.2 -> band 4 counts.
        let k = JointKernel::pair(0.5, ChannelParams::new(0.1, 0.0).unwrap()).unwrap();
        let t = 80;
        let eps = 0.1;
        let target_00_block0 = (t as f64 * k.p_y_y0(false, false)).round() as usize; // 18
        for extra in [4usize, 5] {
            let silent1 = 2 + extra;
            let mut y = vec![false; t];
            let mut xi = vec![true; t];
            for s in 0..silent1 {
                y[s] = true;
                xi[s] = false;
            }
            for s in silent1..(silent1 + target_00_block0) {
                xi[s] = false;
            }
            for s in (silent1 + target_00_block0)..t {
                y[s] = true;
            }
            let split = BlockSplit::new(&FeedbackVector::new(BitRow::from_bools(&y)));
            let x = BitRow::from_bools(&xi);
            let ok = simplified_edge_test(&split, &x, &x, &k, eps, Strictness::Sufficient);
            assert_eq!(ok, extra == 4, "extra {extra}");
        }
    }

    #[test]
    fn noiseless_test_requires_exact_consistency() {
        let k = JointKernel::pair(0.5, ChannelParams::noiseless()).unwrap();
        let y = FeedbackVector::from_str01("1100");
        let split = BlockSplit::new(&y);
        // Consistent: covers both ones, silent on both zeros.
        assert!(simplified_edge_test(
            &split,
            &row("1000"),
            &row("0100"),
            &k,
            10.0,
            Strictness::Sufficient
        ));
        // Misses a one.
        assert!(!simplified_edge_test(
            &split,
            &row("1000"),
            &row("0000"),
            &k,
            10.0,
            Strictness::Sufficient
        ));
        // Talks during a zero.
        assert!(!simplified_edge_test(
            &split,
            &row("1110"),
            &row("0100"),
            &k,
            10.0,
            Strictness::Sufficient
        ));
    }

    #[test]
    fn full_and_simplified_tests_nest() {
        let k = JointKernel::pair(0.5, ChannelParams::new(0.1, 0.05).unwrap()).unwrap();
        let mut rng = stream(17, Role::Auxiliary);
        let (mut full_hits, mut nec_hits) = (0, 0);
        for _ in 0..1000 {
            let t = 40;
            let eps = 0.3;
            let xi = random_row(t, 0.5, &mut rng);
            let xj = random_row(t, 0.5, &mut rng);
            let v = FeedbackVector::new(xi.or(&xj));
            let y: Vec<bool> = v
                .bits()
                .iter()
                .map(|b| {
                    let u: f64 = rng.gen();
                    if b {
                        u >= 0.05
                    } else {
                        u < 0.1
                    }
                })
                .collect();
            let y = FeedbackVector::new(BitRow::from_bools(&y));
            let split = BlockSplit::new(&y);
            let full = full_typical_membership(&y, &v, &k, eps);
            if full {
                full_hits += 1;
                assert!(marginal_typical(&y, &k, eps, Strictness::Sufficient));
                assert!(simplified_edge_test(
                    &split,
                    &xi,
                    &xj,
                    &k,
                    eps,
                    Strictness::Sufficient
                ));
            }
            if marginal_typical(&y, &k, eps, Strictness::Necessary)
                && simplified_edge_test(&split, &xi, &xj, &k, eps, Strictness::Necessary)
            {
                nec_hits += 1;
                assert!(full);
            }
        }
        assert!(full_hits > 50 && nec_hits > 5, "{full_hits} {nec_hits}");
    }

    #[test]
    fn pair_counts_partition_blocks() {
        let mut rng = stream(4, Role::Auxiliary);
        let y = FeedbackVector::new(random_row(150, 0.5, &mut rng));
        let xi = random_row(150, 0.3, &mut rng);
        let xj = random_row(150, 0.3, &mut rng);
        let split = BlockSplit::new(&y);
        let c = split.pair_counts(&xi, &xj);
        assert_eq!(split.t_w(true) + split.t_w(false), 150);
        for w in [false, true] {
            let s: usize = c[w as usize].iter().flatten().sum();
            assert_eq!(s, split.t_w(w));
            assert_eq!(c[w as usize][0][0], split.silent_count(w, &xi, &xj));
            assert_eq!(split.indices(w).len(), split.t_w(w));
        }
    }
}
