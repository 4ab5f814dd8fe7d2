//! Parameters of the rate functions and the eigenvalues of the tilted
//! transition matrix.

use crate::channel::{ChannelParams, JointKernel};
use crate::error::Result;

/// `log(p + (1 - p) e^x)` without overflow.
pub fn ln_mix(p: f64, x: f64) -> f64 {
    if x > 0.0 {
        x + (1.0 - p + p * (-x).exp()).ln()
    } else {
        (p + (1.0 - p) * x.exp()).ln()
    }
}

/// Larger eigenvalue of the tilted transition matrix,
/// `(p + a + sqrt((p - a)^2 + 4 p (1 - p))) / 2` with `a = (1 - p) e^l`.
pub fn rho_plus(lambda: f64, p: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let a = (1.0 - p) * lambda.exp();
    let disc = ((p - a) * (p - a) + 4.0 * p * (1.0 - p)).sqrt();
    0.5 * (p + a + disc)
}

/// Smaller eigenvalue, from `rho_+ rho_- = p (1 - p) (e^l - 1)`.
pub fn rho_minus(lambda: f64, p: f64) -> f64 {
    p * (1.0 - p) * lambda.exp_m1() / rho_plus(lambda, p)
}

/// `lim rho_+` as the tilt goes to minus infinity.
pub fn rho_plus_neg_limit(p: f64) -> f64 {
    0.5 * (p + (p * p + 4.0 * p * (1.0 - p)).sqrt())
}

/// Design probability and noise, with the derived block laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdpKernel {
    pub p: f64,
    pub q10: f64,
    pub q01: f64,
    pub p1: f64,
    pub p0: f64,
    /// `(1 - p)^2 q10 / p1`.
    pub xbar1: f64,
    /// `(1 - p)^2 (1 - q10) / p0`.
    pub xbar0: f64,
    joint: JointKernel,
}

impl LdpKernel {
    pub fn new(p: f64, q10: f64, q01: f64) -> Result<Self> {
        let joint = JointKernel::pair(p, ChannelParams::new(q10, q01)?)?;
        let p1 = joint.p1();
        let p0 = joint.p0();
        let s = (1.0 - p) * (1.0 - p);
        let xbar1 = if p1 > 0.0 { s * q10 / p1 } else { 0.0 };
        let xbar0 = if p0 > 0.0 { s * (1.0 - q10) / p0 } else { 0.0 };
        Ok(LdpKernel {
            p,
            q10,
            q01,
            p1,
            p0,
            xbar1,
            xbar0,
            joint,
        })
    }

    pub fn p_w(&self, w: bool) -> f64 {
        if w {
            self.p1
        } else {
            self.p0
        }
    }

    pub fn xbar(&self, w: bool) -> f64 {
        if w {
            self.xbar1
        } else {
            self.xbar0
        }
    }

    /// `p_{y,x1,x2}(w, u, v)`.
    pub fn table(&self, w: bool, u: bool, v: bool) -> f64 {
        self.joint.p_y_x1_x2(w, u, v)
    }

    pub fn joint(&self) -> &JointKernel {
        &self.joint
    }

    /// No information flows through the channel, or the code is constant.
    pub fn is_degenerate(&self) -> bool {
        (self.q10 + self.q01 - 1.0).abs() < 1e-12 || !(self.p > 0.0 && self.p < 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Spectral radius of the transition matrix with its (0,0) row tilted by e^l,
    // by power iteration.
    fn power_iteration(lambda: f64, p: f64) -> f64 {
        let q = 1.0 - p;
        let a = q * lambda.exp();
        let m = [
            [p, 0.0, p, 0.0],
            [q, 0.0, q, 0.0],
            [0.0, p, 0.0, p],
            [0.0, a, 0.0, a],
        ];
        let mut v = [1.0; 4];
        let mut r = 0.0;
        for _ in 0..2000 {
            let mut nv = [0.0; 4];
            for i in 0..4 {
                for j in 0..4 {
                    nv[i] += m[i][j] * v[j];
                }
            }
            r = nv.iter().map(|x: &f64| x.abs()).fold(0.0, f64::max);
            for i in 0..4 {
                v[i] = nv[i] / r;
            }
        }
        r
    }

    #[test]
    fn stochastic_at_zero() {
        assert_eq!(rho_plus(0.0, 0.3), 1.0);
        assert_eq!(rho_minus(0.0, 0.3), 0.0);
    }

    #[test]
    fn matches_power_iteration() {
        for &(l, p) in &[(0.7, 0.3), (-1.2, 0.5), (2.0, 0.8), (-4.0, 0.1)] {
            assert!(
                (rho_plus(l, p) - power_iteration(l, p)).abs() < 1e-10,
                "{l} {p}"
            );
        }
    }

    #[test]
    fn trace_and_determinant() {
        for &(l, p) in &[(0.7, 0.3), (-1.2, 0.5), (30.0, 0.8), (-30.0, 0.1)] {
            let (rp, rm) = (rho_plus(l, p), rho_minus(l, p));
            let alpha = p + (1.0 - p) * f64::exp(l);
            assert!((rp + rm - alpha).abs() <= 1e-10 * alpha.max(1.0));
            let beta = ((2.0 * p - alpha).powi(2) + 4.0 * p * (1.0 - p)).sqrt();
            assert!((rp - rm - beta).abs() <= 1e-10 * beta.max(1.0));
        }
    }

    #[test]
    fn limits() {
        assert!((rho_plus_neg_limit(0.5) - (1.0 + 5f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((rho_plus(-40.0, 0.5) - 0.809_017_0).abs() < 1e-7);
        let p: f64 = 0.3;
        assert!((rho_plus(40.0, p).ln() - 40.0 - (1.0 - p).ln()).abs() < 1e-9);
    }

    #[test]
    fn ln_mix_is_stable() {
        assert!((ln_mix(0.3, 700.0) - (700.0 + 0.7f64.ln())).abs() < 1e-9);
        assert!((ln_mix(0.3, -700.0) - 0.3f64.ln()).abs() < 1e-12);
        assert!((ln_mix(0.3, 0.5) - (0.3 + 0.7 * 0.5f64.exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn kernel_means_balance() {
        let k = LdpKernel::new(0.35, 0.12, 0.3).unwrap();
        assert!((k.p1 * k.xbar1 + k.p0 * k.xbar0 - 0.65 * 0.65).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&k.xbar1) && (0.0..=1.0).contains(&k.xbar0));
    }
}
