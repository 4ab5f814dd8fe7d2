//! Scan-then-golden-section maximisation on a bounded interval.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
    /// The best point sits on the lower / upper end of the interval.
    pub at_lo: bool,
    pub at_hi: bool,
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol * (1.0 + c.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Evaluates `f` on `n` evenly spaced points of `[lo, hi]` (ends included),
/// then refines around the best one.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Maximum {
    assert!(n >= 3 && hi > lo);
    let h = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + h * i as f64 };
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = at(best_i.saturating_sub(1));
    let b = at((best_i + 1).min(n - 1));
    let (x, v) = golden_max(&f, a, b, 1e-13);
    let (arg, value) = if v > best { (x, v) } else { (at(best_i), best) };
    let edge = 1e-9 * (hi - lo);
    Maximum {
        arg,
        value,
        at_lo: arg - lo <= edge,
        at_hi: hi - arg <= edge,
    }
}

/// Maximises over the points `(i + 0.5) / n`, `i < n`, of `(0, 1)`, then
/// refines between the neighbours of the best point.
pub fn maximize_unit<F: Fn(f64) -> f64>(f: F, n: usize) -> Maximum {
    assert!(n >= 2);
    let at = |i: usize| (i as f64 + 0.5) / n as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { 1e-9 } else { at(best_i - 1) };
    let b = if best_i == n - 1 {
        1.0 - 1e-9
    } else {
        at(best_i + 1)
    };
    let (x, v) = golden_max(&f, a, b, 1e-12);
    let (arg, value) = if v > best { (x, v) } else { (at(best_i), best) };
    Maximum {
        arg,
        value,
        at_lo: best_i == 0,
        at_hi: best_i == n - 1,
    }
}
