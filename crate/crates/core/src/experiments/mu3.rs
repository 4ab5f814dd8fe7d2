//! Third-user triangle probability at `M = 3`, conditioned on a typical
//! true pair.
//!
//! For each conditioned trial the probability over the third codeword is
//! computed exactly from the block counts (the three classes of rounds a
//! silent third user affects are independent binomials), and a sampled
//! third codeword is also checked directly. The exact value is the
//! estimator; the sampled hits are a sanity check.

use serde::Serialize;

use crate::bits::BitRow;
use crate::channel::{apply_noise, patterns3, ChannelParams, FeedbackVector, JointKernel};
use crate::codebook::{ExperimentConfig, TransmissionMatrix};
use crate::decoder::{count_patterns, typical_count, BlockSplit};
use crate::error::{Error, Result};
use crate::rates::{phi, LdpKernel};
use crate::rng::{Role, StreamKey};

use super::mc::run_parallel;
use super::stats::McEstimate;

/// Default width of the conditioning set `|N(a)/T - p(a)| <= delta / 16`.
pub const DEFAULT_DELTA: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mu3Options {
    pub delta: f64,
    /// Stop once this many trials were conditioned (checked per batch).
    pub min_conditioned: u64,
    pub cell: u64,
    pub workers: Option<usize>,
}

impl Default for Mu3Options {
    fn default() -> Self {
        Mu3Options {
            delta: DEFAULT_DELTA,
            min_conditioned: 1,
            cell: 0,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mu3Estimate {
    pub t: usize,
    pub block: u8,
    pub trials: u64,
    pub conditioned: u64,
    /// Mean of the exact conditional probability over conditioned trials.
    pub mean: f64,
    pub log_mean: f64,
    /// Sampled third codewords completing the triangle.
    pub sampled: McEstimate,
    /// `exp(-p_w phi_w T)`.
    pub bound: f64,
    pub log_bound: f64,
}

/// `[y, x1, x2]` lies in the strong typical set with slack `delta / 16`.
pub fn in_conditioning_set(
    y: &FeedbackVector,
    x1: &BitRow,
    x2: &BitRow,
    kernel: &JointKernel,
    delta: f64,
) -> bool {
    let t = y.len();
    patterns3().all(|(w, u, v)| {
        let n = count_patterns(&[y.bits(), x1, x2], &[w, u, v]).expect("aligned");
        let p = kernel.p_y_x1_x2(w, u, v);
        if p == 0.0 {
            n == 0
        } else {
            (n as f64 / t as f64 - p).abs() <= delta / 16.0
        }
    })
}

struct LogBinom {
    ln_fact: Vec<f64>,
    ln_q: f64,
    ln_1mq: f64,
}

impl LogBinom {
    fn new(max_n: usize, q: f64) -> Self {
        let mut ln_fact = vec![0.0; max_n + 1];
        for i in 1..=max_n {
            ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
        }
        LogBinom {
            ln_fact,
            ln_q: q.ln(),
            ln_1mq: (1.0 - q).ln(),
        }
    }

    fn pmf(&self, k: usize, n: usize) -> f64 {
        let lc = self.ln_fact[n] - self.ln_fact[k] - self.ln_fact[n - k];
        let a = if k > 0 { k as f64 * self.ln_q } else { 0.0 };
        let b = if n > k {
            (n - k) as f64 * self.ln_1mq
        } else {
            0.0
        };
        (lc + a + b).exp()
    }
}

/// Exact probability, over a fresh Bernoulli(`p`) third codeword, that
/// both pairs `(1,3)` and `(2,3)` pass the block-`w` test.
///
/// `counts[u][v]` are the block-`w` class sizes `T^w_uv` of the true pair.
pub fn conditional_mu3(
    counts: [[usize; 2]; 2],
    t: usize,
    w: bool,
    kernel: &JointKernel,
    eps: f64,
    strictness: crate::decoder::Strictness,
) -> f64 {
    let tw: usize = counts.iter().flatten().sum();
    let slack = strictness.slack(eps);
    let p0 = kernel.p_y_y0(w, false);
    let p1 = kernel.p_y_y0(w, true);
    let allowed: Vec<bool> = (0..=tw)
        .map(|n| typical_count(n, t, p0, slack) && (p1 != 0.0 || n == tw))
        .collect();
    let lb = LogBinom::new(t, 1.0 - kernel.p);
    let (n00, n01, n10) = (counts[0][0], counts[0][1], counts[1][0]);
    let first = allowed.iter().position(|&a| a);
    let Some(first) = first else { return 0.0 };
    let last = allowed.iter().rposition(|&a| a).unwrap();
    let side = |n: usize, a00: usize| -> f64 {
        let lo = first.saturating_sub(a00);
        let hi = (last.saturating_sub(a00)).min(n);
        if last < a00 || lo > hi {
            return 0.0;
        }
        (lo..=hi)
            .filter(|&a| allowed[a00 + a])
            .map(|a| lb.pmf(a, n))
            .sum()
    };
    let mut total = 0.0;
    for a00 in 0..=n00.min(last) {
        let s1 = side(n01, a00);
        if s1 == 0.0 {
            continue;
        }
        let s2 = side(n10, a00);
        total += lb.pmf(a00, n00) * s1 * s2;
    }
    total
}

struct Mu3Trial {
    conditioned: bool,
    prob: f64,
    hit: bool,
}

/// Estimates `mu_3^w` at `cfg.n_rounds`, scanning at most `max_trials`
/// trials and stopping early once `opts.min_conditioned` were conditioned.
pub fn estimate_mu3(
    cfg: &ExperimentConfig,
    ch: &ChannelParams,
    max_trials: u64,
    w: bool,
    opts: &Mu3Options,
) -> Result<Mu3Estimate> {
    if max_trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let cfg = cfg.clone().with_channel(*ch);
    cfg.validate()?;
    let kernel = cfg.kernel()?;
    let t = cfg.n_rounds;
    let p = cfg.design_p;
    let trial = |i: u64| -> Result<Mu3Trial> {
        let x = TransmissionMatrix::random(
            2,
            t,
            p,
            &mut StreamKey::new(cfg.seed, opts.cell, i, Role::Codebook).rng(),
        );
        let y0 = FeedbackVector::new(x.row(0).or(x.row(1)));
        let y = apply_noise(
            &y0,
            ch,
            &mut StreamKey::new(cfg.seed, opts.cell, i, Role::Noise).rng(),
        );
        if !in_conditioning_set(&y, x.row(0), x.row(1), &kernel, opts.delta) {
            return Ok(Mu3Trial {
                conditioned: false,
                prob: 0.0,
                hit: false,
            });
        }
        let split = BlockSplit::new(&y);
        let c = split.pair_counts(x.row(0), x.row(1))[w as usize];
        let counts = [[c[0][0], c[0][1]], [c[1][0], c[1][1]]];
        let prob = conditional_mu3(counts, t, w, &kernel, cfg.epsilon, cfg.strictness);
        let x3 = TransmissionMatrix::random(
            1,
            t,
            p,
            &mut StreamKey::new(cfg.seed, opts.cell, i, Role::ThirdUser).rng(),
        );
        let slack = cfg.strictness.slack(cfg.epsilon);
        let tw = split.t_w(w);
        let ok = |xa: &BitRow| {
            let n = split.silent_count(w, xa, x3.row(0));
            typical_count(n, t, kernel.p_y_y0(w, false), slack)
                && (kernel.p_y_y0(w, true) != 0.0 || n == tw)
        };
        let hit = ok(x.row(0)) && ok(x.row(1));
        Ok(Mu3Trial {
            conditioned: true,
            prob,
            hit,
        })
    };

    const BATCH: u64 = 1 << 15;
    let mut scanned = 0u64;
    let mut conditioned = 0u64;
    let mut hits = 0u64;
    let mut probs: Vec<f64> = Vec::new();
    while scanned < max_trials && conditioned < opts.min_conditioned {
        let n = BATCH.min(max_trials - scanned);
        let start = scanned;
        let batch = run_parallel(n, opts.workers, |k| trial(start + k))?;
        for r in batch.into_iter().filter(|r| r.conditioned) {
            conditioned += 1;
            hits += r.hit as u64;
            probs.push(r.prob);
        }
        scanned += n;
    }
    if conditioned < opts.min_conditioned || conditioned == 0 {
        return Err(Error::InsufficientSamples {
            got: conditioned,
            need: opts.min_conditioned.max(1),
        });
    }
    let mean = probs.iter().sum::<f64>() / conditioned as f64;
    let lk = LdpKernel::new(p, ch.q10, ch.q01)?;
    let log_bound = -lk.p_w(w) * phi(w, &lk).value * t as f64;
    Ok(Mu3Estimate {
        t,
        block: w as u8,
        trials: scanned,
        conditioned,
        mean,
        log_mean: mean.ln(),
        sampled: McEstimate::from_counts(conditioned, hits, 0),
        bound: log_bound.exp(),
        log_bound,
    })
}
