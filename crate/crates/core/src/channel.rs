//! Boolean OR superposition, memoryless observation noise and the joint
//! probability kernels derived from them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::codebook::TransmissionMatrix;
use crate::error::{check_probability, Error, Result};

/// Crossover probabilities of the binary feedback channel.
///
/// `q10` is the probability that a silent round (`y0 = 0`) is observed as 1,
/// `q01` the probability that a busy round (`y0 = 1`) is observed as 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub q10: f64,
    pub q01: f64,
}

impl ChannelParams {
    pub fn new(q10: f64, q01: f64) -> Result<Self> {
        check_probability("q10", q10)?;
        check_probability("q01", q01)?;
        Ok(ChannelParams { q10, q01 })
    }

    pub fn noiseless() -> Self {
        ChannelParams { q10: 0.0, q01: 0.0 }
    }

    pub fn symmetric(q: f64) -> Result<Self> {
        Self::new(q, q)
    }

    /// `q10 + q01 = 1` makes the output independent of the input.
    pub fn is_degenerate(&self) -> bool {
        (self.q10 + self.q01 - 1.0).abs() < 1e-12
    }

    /// The mirrored channel `(1 - q10, 1 - q01)`.
    pub fn mirrored(&self) -> Self {
        ChannelParams {
            q10: 1.0 - self.q10,
            q01: 1.0 - self.q01,
        }
    }

    /// `p(y | y0)`.
    pub fn p_y_given_y0(&self, y: bool, y0: bool) -> f64 {
        match (y, y0) {
            (true, false) => self.q10,
            (false, false) => 1.0 - self.q10,
            (false, true) => self.q01,
            (true, true) => 1.0 - self.q01,
        }
    }
}

/// Activity indicator over the `N` users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusVector {
    bits: BitRow,
}

impl StatusVector {
    /// Builds a status vector with the given 0-based active users.
    pub fn from_actives(n_users: usize, actives: &[usize]) -> Result<Self> {
        let mut bits = BitRow::zeros(n_users);
        for &a in actives {
            if a >= n_users {
                return Err(Error::InvalidParameter(format!(
                    "active user {a} out of range {n_users}"
                )));
            }
            bits.set(a, true);
        }
        Ok(StatusVector { bits })
    }

    /// Builds a status vector whose population count must equal `k`.
    pub fn with_k(n_users: usize, actives: &[usize], k: usize) -> Result<Self> {
        let s = Self::from_actives(n_users, actives)?;
        if s.k() != k {
            return Err(Error::InvalidParameter(format!(
                "status vector has {} actives, expected {k}",
                s.k()
            )));
        }
        Ok(s)
    }

    /// The status vector used by every trial: users 0 and 1 active.
    pub fn first_pair(n_users: usize) -> Self {
        Self::from_actives(n_users, &[0, 1]).expect("n_users >= 2")
    }

    pub fn n_users(&self) -> usize {
        self.bits.len()
    }

    pub fn k(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn actives(&self) -> Vec<usize> {
        self.bits.iter_ones().collect()
    }

    pub fn bits(&self) -> &BitRow {
        &self.bits
    }
}

/// Channel feedback over the `T` rounds, noise-free (`y0`) or observed (`y`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackVector(pub BitRow);

impl FeedbackVector {
    pub fn new(bits: BitRow) -> Self {
        FeedbackVector(bits)
    }

    pub fn from_str01(s: &str) -> Self {
        FeedbackVector(BitRow::from_str01(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &BitRow {
        &self.0
    }
}

/// `y0 = X^T (x) s`: the OR of the codewords of all active users.
///
/// Accepts any number of actives, including none.
pub fn or_superpose(x: &TransmissionMatrix, s: &StatusVector) -> Result<FeedbackVector> {
    if x.n_users() != s.n_users() {
        return Err(Error::DimensionMismatch {
            expected: x.n_users(),
            actual: s.n_users(),
        });
    }
    let mut y0 = BitRow::zeros(x.n_rounds());
    for i in s.bits().iter_ones() {
        y0.or_assign(x.row(i));
    }
    Ok(FeedbackVector(y0))
}

/// Passes `y0` through the memoryless binary channel.
///
/// Draws exactly one uniform per round, in round order.
pub fn apply_noise<R: Rng + ?Sized>(
    y0: &FeedbackVector,
    ch: &ChannelParams,
    rng: &mut R,
) -> FeedbackVector {
    let mut y = y0.0.clone();
    for t in 0..y0.len() {
        let u: f64 = rng.gen();
        if y0.0.get(t) {
            if u < ch.q01 {
                y.set(t, false);
            }
        } else if u < ch.q10 {
            y.set(t, true);
        }
    }
    FeedbackVector(y)
}

/// Joint laws of one round under i.i.d. Bernoulli(`p`) codewords with `k`
/// active users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointKernel {
    pub p: f64,
    pub channel: ChannelParams,
    pub k: usize,
}

impl JointKernel {
    pub fn new(p: f64, channel: ChannelParams, k: usize) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("q10", channel.q10)?;
        check_probability("q01", channel.q01)?;
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        let kern = JointKernel { p, channel, k };
        let total: f64 = patterns2().map(|(w, w0)| kern.p_y_y0(w, w0)).sum();
        assert!((total - 1.0).abs() <= 1e-12, "p(y, y0) sums to {total}");
        if k == 2 {
            let total: f64 = patterns3().map(|(w, u, v)| kern.p_y_x1_x2(w, u, v)).sum();
            assert!((total - 1.0).abs() <= 1e-12, "p(y, x1, x2) sums to {total}");
        }
        assert!((kern.p1() + kern.p0() - 1.0).abs() <= 1e-12);
        Ok(kern)
    }

    pub fn pair(p: f64, channel: ChannelParams) -> Result<Self> {
        Self::new(p, channel, 2)
    }

    /// `Pr(y0 = 0) = (1 - p)^k`.
    pub fn p_silent(&self) -> f64 {
        (1.0 - self.p).powi(self.k as i32)
    }

    /// `p_{y,y0}(w, w0)`.
    pub fn p_y_y0(&self, w: bool, w0: bool) -> f64 {
        let s = self.p_silent();
        let prior = if w0 { 1.0 - s } else { s };
        self.channel.p_y_given_y0(w, w0) * prior
    }

    /// `p_{y,x1,x2}(w, u, v) = p(w | u OR v) p_x(u) p_x(v)`.
    pub fn p_y_x1_x2(&self, w: bool, u: bool, v: bool) -> f64 {
        self.channel.p_y_given_y0(w, u || v) * self.p_x(u) * self.p_x(v)
    }

    pub fn p_x(&self, u: bool) -> f64 {
        if u {
            self.p
        } else {
            1.0 - self.p
        }
    }

    /// `p_y(1)`.
    pub fn p1(&self) -> f64 {
        self.p_y_y0(true, true) + self.p_y_y0(true, false)
    }

    /// `p_y(0)`.
    pub fn p0(&self) -> f64 {
        self.p_y_y0(false, true) + self.p_y_y0(false, false)
    }

    pub fn p_y(&self, w: bool) -> f64 {
        if w {
            self.p1()
        } else {
            self.p0()
        }
    }
}

/// All `(w, w0)` patterns.
pub fn patterns2() -> impl Iterator<Item = (bool, bool)> {
    [(true, true), (true, false), (false, true), (false, false)].into_iter()
}

/// All `(w, u, v)` patterns.
pub fn patterns3() -> impl Iterator<Item = (bool, bool, bool)> {
    (0..8u8).map(|b| (b & 4 != 0, b & 2 != 0, b & 1 != 0))
}

/// `p_{y,y0}((w, w0))` for the closed-form kernel.
pub fn joint_pattern_prob(kernel: &JointKernel, pattern: (bool, bool)) -> f64 {
    kernel.p_y_y0(pattern.0, pattern.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Role};

    fn matrix(rows: &[&str]) -> TransmissionMatrix {
        TransmissionMatrix::from_rows(rows.iter().map(|r| BitRow::from_str01(r)).collect(), 0.5)
            .unwrap()
    }

    #[test]
    fn or_of_no_actives_is_zero() {
        let x = matrix(&["101", "011", "111"]);
        let s = StatusVector::from_actives(3, &[]).unwrap();
        assert_eq!(
            or_superpose(&x, &s).unwrap(),
            FeedbackVector::from_str01("000")
        );
    }

    #[test]
    fn or_single_and_pair() {
        let x = matrix(&["101", "011", "000"]);
        let s = StatusVector::from_actives(3, &[0]).unwrap();
        assert_eq!(
            or_superpose(&x, &s).unwrap(),
            FeedbackVector::from_str01("101")
        );
        let s = StatusVector::from_actives(3, &[0, 1]).unwrap();
        assert_eq!(
            or_superpose(&x, &s).unwrap(),
            FeedbackVector::from_str01("111")
        );
    }

    #[test]
    fn or_rejects_dimension_mismatch() {
        let x = matrix(&["101", "011"]);
        let s = StatusVector::from_actives(3, &[0]).unwrap();
        assert!(matches!(
            or_superpose(&x, &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn status_vector_checks_k() {
        assert!(StatusVector::with_k(4, &[0, 2], 2).is_ok());
        assert!(StatusVector::with_k(4, &[0], 2).is_err());
        assert!(StatusVector::from_actives(4, &[4]).is_err());
    }

    #[test]
    fn noiseless_noise_is_identity() {
        let y0 = FeedbackVector::from_str01("0110100111");
        let mut rng = stream(1, Role::Noise);
        assert_eq!(apply_noise(&y0, &ChannelParams::noiseless(), &mut rng), y0);
    }

    #[test]
    fn full_crossover_flips_every_bit() {
        let y0 = FeedbackVector::from_str01("01");
        let mut rng = stream(2, Role::Noise);
        let ch = ChannelParams::new(1.0, 1.0).unwrap();
        assert_eq!(
            apply_noise(&y0, &ch, &mut rng),
            FeedbackVector::from_str01("10")
        );
    }

    #[test]
    fn noise_frequency_matches_q10() {
        let t = 100_000;
        let y0 = FeedbackVector(BitRow::zeros(t));
        let mut rng = stream(3, Role::Noise);
        let y = apply_noise(&y0, &ChannelParams::new(0.1, 0.0).unwrap(), &mut rng);
        let f = y.0.count_ones() as f64 / t as f64;
        assert!(
            (f - 0.1).abs() <= 3.0 * (0.1f64 * 0.9 / t as f64).sqrt(),
            "frequency {f}"
        );
    }

    #[test]
    fn noise_consumes_one_draw_per_round() {
        let y0 = FeedbackVector(BitRow::zeros(37));
        let mut a = stream(4, Role::Noise);
        let mut b = stream(4, Role::Noise);
        apply_noise(&y0, &ChannelParams::new(0.3, 0.2).unwrap(), &mut a);
        for _ in 0..37 {
            let _: f64 = b.gen();
        }
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());
    }

    #[test]
    fn joint_pattern_closed_forms() {
        let k = JointKernel::pair(0.5, ChannelParams::new(0.1, 0.0).unwrap()).unwrap();
        assert!((joint_pattern_prob(&k, (true, false)) - 0.025).abs() < 1e-15);
        assert_eq!(joint_pattern_prob(&k, (false, true)), 0.0);
        let s: f64 = patterns2().map(|a| joint_pattern_prob(&k, a)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        let p1 = (1.0 - 0.25) * 1.0 + 0.25 * 0.1;
        assert!((k.p1() - p1).abs() < 1e-15);
    }

    #[test]
    fn kernel_rejects_bad_probabilities() {
        assert!(JointKernel::pair(1.5, ChannelParams::noiseless()).is_err());
        assert!(ChannelParams::new(-0.1, 0.0).is_err());
    }
}
