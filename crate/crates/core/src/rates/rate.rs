//! The achievability rate `C`, the converse rate `D`, the group-testing
//! rate `Cg`, and their optimisation over the design probability.

use serde::Serialize;

use crate::channel::patterns3;
use crate::error::Result;

use super::kernel::{ln_mix, rho_plus, rho_plus_neg_limit, LdpKernel};
use super::search::{maximize, maximize_unit};
use super::LAMBDA_MAX;

const LAMBDA_SCAN: usize = 2048;
pub const DEFAULT_P_GRID: usize = 512;

/// A rate with a flag for degenerate parameters (reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateValue {
    pub value: f64,
    pub degenerate: bool,
}

impl RateValue {
    fn ok(value: f64) -> Self {
        RateValue {
            value,
            degenerate: false,
        }
    }

    fn degenerate() -> Self {
        RateValue {
            value: 0.0,
            degenerate: true,
        }
    }
}

/// `phi_w = sup_l (l xbar^w - log rho_+(l))`.
pub fn phi(w: bool, k: &LdpKernel) -> RateValue {
    if k.is_degenerate() {
        return RateValue::degenerate();
    }
    let xbar = k.xbar(w);
    let p = k.p;
    if xbar <= 0.0 {
        return RateValue::ok(-rho_plus_neg_limit(p).ln());
    }
    if xbar >= 1.0 {
        return RateValue::ok(-(1.0 - p).ln());
    }
    let m = maximize(
        |l| l * xbar - rho_plus(l, p).ln(),
        -LAMBDA_MAX,
        LAMBDA_MAX,
        LAMBDA_SCAN,
    );
    RateValue::ok(m.value.max(0.0))
}

/// `phi'_w = (1 / p_w) sup_l [A (2l - log(p + (1-p) e^{2l})) - 2 B log(p + (1-p) e^l)]`
/// with `A = p_{y,x1,x2}(w,0,0)` and `B = p_{y,x1,x2}(w,1,0)`.
pub fn phi_prime(w: bool, k: &LdpKernel) -> RateValue {
    if k.is_degenerate() {
        return RateValue::degenerate();
    }
    let p = k.p;
    let pw = k.p_w(w);
    if pw <= 0.0 {
        return RateValue::ok(0.0);
    }
    let a = k.table(w, false, false);
    let b = k.table(w, true, false);
    let value = if a == 0.0 {
        -2.0 * b * p.ln()
    } else if b == 0.0 {
        -a * (1.0 - p).ln()
    } else {
        let f = |l: f64| a * (2.0 * l - ln_mix(p, 2.0 * l)) - 2.0 * b * ln_mix(p, l);
        maximize(f, -LAMBDA_MAX, LAMBDA_MAX, LAMBDA_SCAN).value
    };
    RateValue::ok((value / pw).max(0.0))
}

/// `C = p1 phi_1 + p0 phi_0`.
pub fn rate_c(p: f64, q10: f64, q01: f64) -> Result<RateValue> {
    let k = LdpKernel::new(p, q10, q01)?;
    if k.is_degenerate() {
        return Ok(RateValue::degenerate());
    }
    Ok(RateValue::ok(
        k.p1 * phi(true, &k).value + k.p0 * phi(false, &k).value,
    ))
}

/// `D = p1 phi'_1 + p0 phi'_0`.
pub fn rate_d(p: f64, q10: f64, q01: f64) -> Result<RateValue> {
    let k = LdpKernel::new(p, q10, q01)?;
    if k.is_degenerate() {
        return Ok(RateValue::degenerate());
    }
    Ok(RateValue::ok(
        k.p1 * phi_prime(true, &k).value + k.p0 * phi_prime(false, &k).value,
    ))
}

fn entropy<I: IntoIterator<Item = f64>>(ps: I) -> f64 {
    ps.into_iter()
        .filter(|&q| q > 0.0)
        .map(|q| -q * q.ln())
        .sum()
}

/// `Cg = min{ I(x1; x2, y), I(x1, x2; y) / 2 }`.
pub fn rate_cg(p: f64, q10: f64, q01: f64) -> Result<RateValue> {
    let k = LdpKernel::new(p, q10, q01)?;
    if k.is_degenerate() {
        return Ok(RateValue::degenerate());
    }
    let j = |w: bool, u: bool, v: bool| k.table(w, u, v);
    let h_all = entropy(patterns3().map(|(w, u, v)| j(w, u, v)));
    let h_x1 = entropy([p, 1.0 - p]);
    let h_x1x2 = 2.0 * h_x1;
    let h_y = entropy([k.p1, k.p0]);
    let h_x2y = entropy(
        [false, true]
            .into_iter()
            .flat_map(|w| [false, true].map(|v| j(w, false, v) + j(w, true, v))),
    );
    let i_single = h_x1 + h_x2y - h_all;
    let i_joint = h_x1x2 + h_y - h_all;
    Ok(RateValue::ok((i_single.min(0.5 * i_joint)).max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateKind {
    C,
    D,
    Cg,
}

impl RateKind {
    pub fn eval(&self, p: f64, q10: f64, q01: f64) -> Result<RateValue> {
        match self {
            RateKind::C => rate_c(p, q10, q01),
            RateKind::D => rate_d(p, q10, q01),
            RateKind::Cg => rate_cg(p, q10, q01),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub p_star: f64,
    pub value: f64,
    pub degenerate: bool,
}

/// Maximises a rate over `p in (0, 1)`: scan of `grid` midpoints, then
/// golden-section refinement.
pub fn optimize_over_p(q10: f64, q01: f64, which: RateKind, grid: usize) -> Result<Optimum> {
    crate::channel::ChannelParams::new(q10, q01)?;
    if (q10 + q01 - 1.0).abs() < 1e-12 {
        return Ok(Optimum {
            p_star: 0.5,
            value: 0.0,
            degenerate: true,
        });
    }
    let f = |p: f64| {
        which
            .eval(p, q10, q01)
            .map_or(f64::NEG_INFINITY, |r| r.value)
    };
    let m = maximize_unit(f, grid.max(2));
    Ok(Optimum {
        p_star: m.arg,
        value: m.value,
        degenerate: m.value <= 0.0,
    })
}

/// Rates at `p` together with the thresholds of the channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub p: f64,
    pub q10: f64,
    pub q01: f64,
    pub c: f64,
    pub d: f64,
    pub cg: f64,
    /// Maximiser of `C` over `p`.
    pub p_star: f64,
    /// `1 / max_p C`.
    pub c1: f64,
    /// `1 / D(p_star)`.
    pub c2: f64,
    /// `1 / max_p Cg`.
    pub cg_threshold: f64,
    pub degenerate: bool,
}

/// Thresholds of `(q10, q01)` evaluated at `p = p_star`.
pub fn rate_point(q10: f64, q01: f64, grid: usize) -> Result<RatePoint> {
    let oc = optimize_over_p(q10, q01, RateKind::C, grid)?;
    if oc.degenerate {
        return Ok(RatePoint {
            p: oc.p_star,
            q10,
            q01,
            c: 0.0,
            d: 0.0,
            cg: 0.0,
            p_star: oc.p_star,
            c1: f64::INFINITY,
            c2: f64::INFINITY,
            cg_threshold: f64::INFINITY,
            degenerate: true,
        });
    }
    let og = optimize_over_p(q10, q01, RateKind::Cg, grid)?;
    let d = rate_d(oc.p_star, q10, q01)?.value;
    let cg = rate_cg(oc.p_star, q10, q01)?.value;
    Ok(RatePoint {
        p: oc.p_star,
        q10,
        q01,
        c: oc.value,
        d,
        cg,
        p_star: oc.p_star,
        c1: 1.0 / oc.value,
        c2: 1.0 / d,
        cg_threshold: 1.0 / og.value,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hb(x: f64) -> f64 {
        entropy([x, 1.0 - x])
    }

    // Dense grid oracle for a concave sup.
    fn grid_sup<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
        (0..=400_000)
            .map(|i| f(lo + (hi - lo) * i as f64 / 400_000.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn noiseless_phis() {
        let k = LdpKernel::new(0.5, 0.0, 0.0).unwrap();
        let phi1 = phi(true, &k).value;
        let phi0 = phi(false, &k).value;
        assert!((phi1 - 0.211_935_8).abs() < 1e-6, "{phi1}");
        assert!((phi1 + ((1.0 + 5f64.sqrt()) / 4.0).ln()).abs() < 1e-12);
        assert!((phi0 - 2f64.ln()).abs() < 1e-12);
        // The grid oracle approaches the limits from below.
        let g1 = grid_sup(|l| -rho_plus(l, 0.5).ln(), -50.0, 50.0);
        assert!(g1 <= phi1 + 1e-15 && phi1 - g1 < 1e-12);
        let c = rate_c(0.5, 0.0, 0.0).unwrap().value;
        assert!((c - 0.332_239).abs() < 1e-5, "{c}");
    }

    #[test]
    fn noisy_phi_matches_grid() {
        let k = LdpKernel::new(0.5, 0.1, 0.1).unwrap();
        for w in [true, false] {
            let x = k.xbar(w);
            let g = grid_sup(|l| l * x - rho_plus(l, 0.5).ln(), -20.0, 20.0);
            let v = phi(w, &k).value;
            assert!(v >= g - 1e-12 && v - g < 1e-8, "{w} {v} {g}");
        }
        assert!((rate_c(0.5, 0.1, 0.1).unwrap().value - 0.16982).abs() < 1e-4);
        assert!((rate_d(0.5, 0.1, 0.1).unwrap().value - 0.26981).abs() < 1e-4);
    }

    #[test]
    fn local_maximality_of_sup() {
        let k = LdpKernel::new(0.4, 0.15, 0.05).unwrap();
        for w in [true, false] {
            let x = k.xbar(w);
            let f = |l: f64| l * x - rho_plus(l, 0.4).ln();
            let m = maximize(f, -50.0, 50.0, 2048);
            for h in [1e-4, -1e-4] {
                assert!(f(m.arg + h) <= m.value + 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        for r in [
            rate_c(0.3, 0.5, 0.5),
            rate_d(0.3, 0.5, 0.5),
            rate_cg(0.3, 0.5, 0.5),
            rate_c(0.3, 0.2, 0.8),
        ] {
            let r = r.unwrap();
            assert!(r.degenerate && r.value == 0.0);
        }
        assert!(rate_c(0.0, 0.1, 0.1).unwrap().degenerate);
        assert!(rate_d(1.0, 0.1, 0.1).unwrap().degenerate);
    }

    #[test]
    fn symmetry() {
        let a = rate_c(0.3, 0.1, 0.2).unwrap().value;
        let b = rate_c(0.3, 0.9, 0.8).unwrap().value;
        assert!((a - b).abs() < 1e-9);
        let a = rate_d(0.3, 0.1, 0.2).unwrap().value;
        let b = rate_d(0.3, 0.9, 0.8).unwrap().value;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn noiseless_cg() {
        let cg = rate_cg(0.5, 0.0, 0.0).unwrap().value;
        let want = (0.5 * hb(0.5)).min(0.5 * hb(0.75));
        assert!((cg - want).abs() < 1e-12);
        assert!((cg - 0.281_167_6).abs() < 1e-7, "{cg} {want}");
        let o = optimize_over_p(0.0, 0.0, RateKind::Cg, 512).unwrap();
        assert!(o.value >= cg && o.p_star > 0.0 && o.p_star < 1.0);
    }

    #[test]
    fn joint_information_dominates_single() {
        for &(p, a, b) in &[(0.3, 0.1, 0.2), (0.6, 0.0, 0.4), (0.5, 0.7, 0.1)] {
            let k = LdpKernel::new(p, a, b).unwrap();
            let j = |w: bool, u: bool, v: bool| k.table(w, u, v);
            let h_all = entropy(patterns3().map(|(w, u, v)| j(w, u, v)));
            let i_joint = 2.0 * hb(p) + hb(k.p1) - h_all;
            let h_x1y = entropy(
                [false, true]
                    .into_iter()
                    .flat_map(|w| [false, true].map(|u| j(w, u, false) + j(w, u, true))),
            );
            let i_single = hb(p) + hb(k.p1) - h_x1y;
            assert!(i_joint >= i_single - 1e-15);
        }
    }

    #[test]
    fn p_optimum_is_local_max() {
        let o = optimize_over_p(0.1, 0.1, RateKind::C, 512).unwrap();
        for h in [1e-3, -1e-3] {
            assert!(rate_c(o.p_star + h, 0.1, 0.1).unwrap().value <= o.value);
        }
        assert!((o.p_star - 0.31).abs() < 0.02, "{}", o.p_star);
    }

    #[test]
    fn thresholds_ordered_at_q_01() {
        let r = rate_point(0.1, 0.1, 512).unwrap();
        assert!(r.c2 < r.c1 && r.c1 < r.cg_threshold, "{r:?}");
    }
}
