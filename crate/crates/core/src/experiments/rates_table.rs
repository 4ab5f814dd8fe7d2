//! Rates CSV: thresholds along a segment of noise parameters.

use std::io::Write;

use crate::error::Result;
use crate::rates::{rate_point, RatePoint};

/// `n` points from `(0, 0)` to `(q10, q01)` inclusive; `n = 1` is just the
/// end point.
pub fn q_segment(q10: f64, q01: f64, n: usize) -> Vec<(f64, f64)> {
    if n <= 1 {
        return vec![(q10, q01)];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            (q10 * s, q01 * s)
        })
        .collect()
}

pub fn rates_table(points: &[(f64, f64)], p_grid: usize) -> Result<Vec<RatePoint>> {
    points
        .iter()
        .map(|&(a, b)| rate_point(a, b, p_grid))
        .collect()
}

pub fn write_rates_csv<W: Write>(rows: &[RatePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "q10",
        "q01",
        "p_star",
        "C",
        "C1",
        "D",
        "C2",
        "Cg",
        "Cg_threshold",
        "degenerate",
    ])?;
    for r in rows {
        w.write_record([
            r.q10.to_string(),
            r.q01.to_string(),
            r.p_star.to_string(),
            r.c.to_string(),
            r.c1.to_string(),
            r.d.to_string(),
            r.c2.to_string(),
            r.cg.to_string(),
            r.cg_threshold.to_string(),
            r.degenerate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_endpoints() {
        assert_eq!(q_segment(0.4, 0.2, 1), vec![(0.4, 0.2)]);
        let s = q_segment(0.4, 0.2, 5);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], (0.0, 0.0));
        assert_eq!(s[4], (0.4, 0.2));
    }

    #[test]
    fn csv_header_and_degenerate_row() {
        let rows = rates_table(&[(0.5, 0.5), (0.1, 0.1)], 64).unwrap();
        let mut buf = Vec::new();
        write_rates_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "q10,q01,p_star,C,C1,D,C2,Cg,Cg_threshold,degenerate"
        );
        assert!(lines.next().unwrap().ends_with(",true"));
        assert!(lines.next().unwrap().ends_with(",false"));
    }
}
