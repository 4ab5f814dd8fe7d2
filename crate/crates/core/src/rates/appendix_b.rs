//! The converse rate as a constrained minimum of Bernoulli divergences.
//!
//! Given the block-`w` proportions `beta_uv = p_{y,x1,x2}(w,u,v) / p_w`, a
//! third codeword is silent in a fraction `b_uv / beta_uv` of the rounds of
//! each class. Both new edges are typical when `b00 + b10 = b00 + b01 =
//! beta00`, so the rate is the minimum over `b00` of
//! `beta00 KL(b00/beta00 || 1-p) + 2 beta10 KL((beta00-b00)/beta10 || 1-p)`.

use crate::error::{Error, Result};

use super::kernel::LdpKernel;

/// Optimum of the constrained problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedRate {
    pub value: f64,
    pub b00: f64,
    pub b10: f64,
    /// Per-class tilts `log[(p/(1-p)) b / (beta - b)]`, `NaN` when the class
    /// is empty.
    pub lambda00: f64,
    pub lambda10: f64,
    /// `|2 lambda10 - lambda00|`, or 0 when `beta00 = 0`.
    pub residual: f64,
}

fn kl_bern(r: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 { 0.0 } else { a * (a / b).ln() };
    term(r, q) + term(1.0 - r, 1.0 - q)
}

fn tilt(p: f64, b: f64, beta: f64) -> f64 {
    if beta <= 0.0 {
        return f64::NAN;
    }
    ((p / (1.0 - p)) * b / (beta - b)).ln()
}

/// Rate of block `w` per unit of block length.
pub fn appendix_b_rate(w: bool, k: &LdpKernel) -> Result<ConstrainedRate> {
    if k.is_degenerate() {
        return Err(Error::InvalidParameter("degenerate parameters".into()));
    }
    let pw = k.p_w(w);
    if pw <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "block {} has zero probability",
            w as u8
        )));
    }
    let p = k.p;
    let beta00 = k.table(w, false, false) / pw;
    let beta10 = k.table(w, true, false) / pw;
    let lo = (beta00 - beta10).max(0.0);
    let hi = beta00;
    if lo > hi {
        return Err(Error::InvalidParameter("empty constraint set".into()));
    }
    let obj = |b00: f64| {
        let a = if beta00 > 0.0 {
            beta00 * kl_bern(b00 / beta00, 1.0 - p)
        } else {
            0.0
        };
        let c = if beta10 > 0.0 {
            2.0 * beta10 * kl_bern((beta00 - b00) / beta10, 1.0 - p)
        } else {
            0.0
        };
        a + c
    };
    let b00 = if hi - lo <= 0.0 {
        lo
    } else {
        let n = 1024;
        let at = |i: usize| lo + (hi - lo) * i as f64 / n as f64;
        let best = (0..=n)
            .min_by(|&i, &j| obj(at(i)).total_cmp(&obj(at(j))))
            .unwrap();
        let a = at(best.saturating_sub(1));
        let b = at((best + 1).min(n));
        // The objective is convex with derivative lambda00 - 2 lambda10, so
        // polish the bracketed minimum by bisection on that derivative.
        let slope = |b: f64| tilt(p, b, beta00) - 2.0 * tilt(p, beta00 - b, beta10);
        let (mut a, mut b) = (a, b);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if slope(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let x = 0.5 * (a + b);
        if obj(x) <= obj(at(best)) {
            x
        } else {
            at(best)
        }
    };
    let b10 = beta00 - b00;
    let lambda00 = tilt(p, b00, beta00);
    let lambda10 = tilt(p, b10, beta10);
    let residual = if beta00 > 0.0 {
        (2.0 * lambda10 - lambda00).abs()
    } else {
        0.0
    };
    Ok(ConstrainedRate {
        value: obj(b00),
        b00,
        b10,
        lambda00,
        lambda10,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::phi_prime;

    #[test]
    fn agrees_with_tilted_sup() {
        let k = LdpKernel::new(0.5, 0.1, 0.1).unwrap();
        for w in [true, false] {
            let r = appendix_b_rate(w, &k).unwrap();
            let d = phi_prime(w, &k).value;
            assert!((r.value - d).abs() < 1e-6, "{w}: {} vs {d}", r.value);
            assert!(r.residual < 1e-6, "residual {}", r.residual);
        }
    }

    #[test]
    fn mean_vector_gives_zero() {
        // With beta00 = beta10 the mean b00 = beta00 (1-p), b10 = beta10 (1-p)
        // satisfies the constraint only if b00 + b10 = beta00, i.e. p = 1/2.
        assert_eq!(kl_bern(0.3, 0.3), 0.0);
        let k = LdpKernel::new(0.5, 0.2, 0.3).unwrap();
        let r = appendix_b_rate(true, &k).unwrap();
        assert!(r.value > 0.0);
    }
}
