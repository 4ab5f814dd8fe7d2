use serde::Serialize;

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let ph = k as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let centre = (ph + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (ph * (1.0 - ph) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if k == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// `P(X >= k)` for `X ~ Bin(n, q)`.
pub fn binomial_upper_tail(k: u64, n: u64, q: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let lf: Vec<f64> = std::iter::once(0.0)
        .chain((1..=n).scan(0.0, |s, i| {
            *s += (i as f64).ln();
            Some(*s)
        }))
        .collect();
    (k..=n)
        .map(|i| {
            let lc = lf[n as usize] - lf[i as usize] - lf[(n - i) as usize];
            let a = if i > 0 { i as f64 * q.ln() } else { 0.0 };
            let b = if n > i {
                (n - i) as f64 * (1.0 - q).ln()
            } else {
                0.0
            };
            (lc + a + b).exp()
        })
        .sum::<f64>()
        .min(1.0)
}

/// Failure frequency with a Wilson interval.
///
/// `p_hat` is over the scored trials, i.e. excluding those whose
/// bipartization ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub failures: u64,
    pub budget_exceeded: u64,
    pub p_hat: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
}

impl McEstimate {
    pub fn from_counts(trials: u64, failures: u64, budget_exceeded: u64) -> Self {
        let scored = trials - budget_exceeded;
        let p_hat = if scored == 0 {
            f64::NAN
        } else {
            failures as f64 / scored as f64
        };
        let (lo, hi) = wilson_interval(failures, scored);
        McEstimate {
            trials,
            failures,
            budget_exceeded,
            p_hat,
            ci95_lo: lo,
            ci95_hi: hi,
        }
    }

    pub fn scored(&self) -> u64 {
        self.trials - self.budget_exceeded
    }
}
