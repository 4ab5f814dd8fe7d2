//! Log moment generating function of the number of silent-pair states in
//! the chained third-user codewords, and its Legendre transform.
//!
//! For a cycle of `M` users through the true pair, each round of a block
//! contributes one length-`M` subsequence of states `(x_w, x_{w+1})`
//! starting at the known `(x_1, x_2) = (u, v)`. Subsequences are
//! independent, so the log-MGF splits as `sum_uv T_uv log g_uv(M, l)`.

use crate::error::{Error, Result};

use super::kernel::{rho_plus, LdpKernel};
use super::phi;
use super::search::maximize;
use super::LAMBDA_MAX;

/// `J_k / rho_+^{k-1}` for `J_k = (rho_+^k - rho_-^k) / (rho_+ - rho_-)`,
/// given `r = rho_- / rho_+`.
pub fn j_scaled(k: usize, r: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 1..k {
        let next = (1.0 + r) * cur - r * prev;
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovLogMgf {
    m: usize,
    p: f64,
    /// Subsequence counts `T_uv`, indexed `[u][v]`.
    counts: [[f64; 2]; 2],
}

impl MarkovLogMgf {
    pub fn from_counts(m: usize, p: f64, counts: [[f64; 2]; 2]) -> Result<Self> {
        if m < 3 || m % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "cycle length {m} must be odd and at least 3"
            )));
        }
        crate::error::check_probability("p", p)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter("p must lie in (0, 1)".into()));
        }
        Ok(MarkovLogMgf { m, p, counts })
    }

    /// Counts at their expected values `p_{y,x1,x2}(w, u, v) T`.
    pub fn idealized(m: usize, k: &LdpKernel, w: bool, t: f64) -> Result<Self> {
        let mut counts = [[0.0; 2]; 2];
        for u in [false, true] {
            for v in [false, true] {
                counts[u as usize][v as usize] = k.table(w, u, v) * t;
            }
        }
        Self::from_counts(m, k.p, counts)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn counts(&self) -> [[f64; 2]; 2] {
        self.counts
    }

    /// `log g_uv(M, l)`.
    pub fn log_g(&self, u: bool, v: bool, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return 0.0;
        }
        let p = self.p;
        let m = self.m;
        let rp = rho_plus(lambda, p);
        let det = p * (1.0 - p) * lambda.exp_m1();
        let r = det / (rp * rp);
        let alpha = p + (1.0 - p) * lambda.exp();
        let j1 = j_scaled(m - 1, r);
        let j2 = j_scaled(m - 2, r);
        let base = (m - 3) as f64 * rp.ln();
        // Each arm keeps every term positive for its sign of `l`.
        let scaled = match (u, v) {
            (true, false) | (false, true) => j1 * rp,
            (true, true) => {
                if lambda <= 0.0 {
                    rp * j1 + (1.0 - alpha) * j2
                } else {
                    rp * r.powi(m as i32 - 2) + (1.0 - det / rp) * j2
                }
            }
            (false, false) => {
                if lambda <= 0.0 {
                    rp * j1 + p * (-lambda).exp_m1() * j2
                } else {
                    rp * r.powi(m as i32 - 2) + (rp - p + p * (-lambda).exp()) * j2
                }
            }
        };
        let tilt = if !u && !v { 2.0 * lambda } else { 0.0 };
        base + scaled.ln() + tilt
    }

    /// `Lambda(l) = log E exp(l * #silent-pair states)`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !lambda.is_finite() || lambda.abs() > LAMBDA_MAX {
            return Err(Error::InvalidParameter(format!(
                "tilt {lambda} outside [-{LAMBDA_MAX}, {LAMBDA_MAX}]"
            )));
        }
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let mut s = 0.0;
        for u in [false, true] {
            for v in [false, true] {
                let c = self.counts[u as usize][v as usize];
                if c != 0.0 {
                    s += c * self.log_g(u, v, lambda);
                }
            }
        }
        Ok(s)
    }

    /// Expected number of silent-pair states, read off the chain directly.
    pub fn mean(&self) -> f64 {
        let q = 1.0 - self.p;
        let inner = (self.m - 3) as f64 * q * q;
        let per = |u: bool, v: bool| match (u, v) {
            (true, true) => inner,
            (true, false) | (false, true) => q + inner,
            (false, false) => 1.0 + 2.0 * q + inner,
        };
        let mut s = 0.0;
        for u in [false, true] {
            for v in [false, true] {
                s += self.counts[u as usize][v as usize] * per(u, v);
            }
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Legendre {
    pub value: f64,
    pub lambda: f64,
}

/// `sup_l (l x - f(l))` over `l in [-50, 50]`.
///
/// When the best point is on the clamp and the objective is still rising
/// outward, the supremum is reported as unbounded.
pub fn legendre_transform<F: Fn(f64) -> f64>(f: F, x: f64) -> Result<Legendre> {
    let g = |l: f64| l * x - f(l);
    let m = maximize(g, -LAMBDA_MAX, LAMBDA_MAX, 2048);
    let h = 1e-3;
    let tol = 1e-9 * (1.0 + x.abs());
    if m.at_hi && (g(LAMBDA_MAX) - g(LAMBDA_MAX - h)) / h > tol {
        return Err(Error::Unbounded { x });
    }
    if m.at_lo && (g(-LAMBDA_MAX) - g(-LAMBDA_MAX + h)) / h > tol {
        return Err(Error::Unbounded { x });
    }
    Ok(Legendre {
        value: m.value,
        lambda: m.arg,
    })
}

/// `Lambda*(M T (1-p)^2 q10) / (M T1) - (M - 2) / M * phi_1` at the expected
/// block-1 counts; non-negative according to the cycle bound.
pub fn lemma3_gap(m: usize, p: f64, q10: f64, q01: f64) -> Result<f64> {
    let k = LdpKernel::new(p, q10, q01)?;
    if k.is_degenerate() || k.p1 <= 0.0 {
        return Err(Error::InvalidParameter("degenerate parameters".into()));
    }
    let mgf = MarkovLogMgf::idealized(m, &k, true, 1.0)?;
    let x = m as f64 * (1.0 - p) * (1.0 - p) * q10;
    let l = legendre_transform(|l| mgf.eval(l).expect("tilt within clamp"), x)?;
    let mf = m as f64;
    Ok(l.value / (mf * k.p1) - (mf - 2.0) / mf * phi(true, &k).value)
}
