//! Cartesian parameter sweeps written as CSV.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::codebook::{DecoderMode, ExperimentConfig};
use crate::decoder::Strictness;
use crate::error::{Error, Result};

use super::mc::{estimate_p3_with, estimate_pe_with, RunOptions};
use super::stats::McEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Suboptimal,
    Bipartize,
    Bayes,
    /// The triangle-or-missing-edge event.
    P3,
}

impl SweepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMode::Suboptimal => "suboptimal",
            SweepMode::Bipartize => "bipartize",
            SweepMode::Bayes => "bayes",
            SweepMode::P3 => "p3",
        }
    }

    fn decoder(&self) -> Option<DecoderMode> {
        match self {
            SweepMode::Suboptimal => Some(DecoderMode::Suboptimal),
            SweepMode::Bipartize => Some(DecoderMode::Bipartize),
            SweepMode::Bayes => Some(DecoderMode::Bayes),
            SweepMode::P3 => None,
        }
    }
}

/// Round counts: explicit values, or ratios `r` giving `T = ceil(r ln N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TSpec {
    T(Vec<usize>),
    TOverLogN(Vec<f64>),
}

/// JSON sweep description; every list is one axis of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: Vec<usize>,
    #[serde(default)]
    pub t: Option<Vec<usize>>,
    #[serde(default)]
    pub t_over_log_n: Option<Vec<f64>>,
    pub p: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub q10: Vec<f64>,
    pub q01: Vec<f64>,
    pub modes: Vec<SweepMode>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub strictness: Strictness,
    #[serde(default = "default_budget")]
    pub search_budget: u64,
}

fn default_budget() -> u64 {
    crate::codebook::DEFAULT_SEARCH_BUDGET
}

/// One grid cell and its outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub cell: u64,
    pub n: usize,
    pub t: usize,
    pub p: f64,
    pub epsilon: f64,
    pub q10: f64,
    pub q01: f64,
    pub mode: SweepMode,
    pub trials: u64,
    pub seed: u64,
    pub estimate: Option<McEstimate>,
    pub error: Option<String>,
    pub wall_ms: u128,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: SweepSpec = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    fn t_spec(&self) -> Result<TSpec> {
        match (&self.t, &self.t_over_log_n) {
            (Some(t), None) => Ok(TSpec::T(t.clone())),
            (None, Some(r)) => Ok(TSpec::TOverLogN(r.clone())),
            _ => Err(Error::InvalidParameter(
                "give exactly one of t and t_over_log_n".into(),
            )),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t_len = match self.t_spec()? {
            TSpec::T(v) => v.len(),
            TSpec::TOverLogN(v) => v.len(),
        };
        let lens = [
            self.n.len(),
            t_len,
            self.p.len(),
            self.epsilon.len(),
            self.q10.len(),
            self.q01.len(),
            self.modes.len(),
        ];
        if lens.contains(&0) {
            return Err(Error::InvalidParameter(
                "every sweep axis needs at least one value".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Cells in canonical order: `n, t, p, epsilon, q10, q01, mode`, the
    /// last varying fastest.
    pub fn cells(&self) -> Result<Vec<SweepRow>> {
        self.validate()?;
        let ts = self.t_spec()?;
        let mut out = Vec::new();
        for &n in &self.n {
            let t_values: Vec<usize> = match &ts {
                TSpec::T(v) => v.clone(),
                TSpec::TOverLogN(r) => r
                    .iter()
                    .map(|&r| ((r * (n as f64).ln()).ceil() as usize).max(1))
                    .collect(),
            };
            for &t in &t_values {
                for &p in &self.p {
                    for &epsilon in &self.epsilon {
                        for &q10 in &self.q10 {
                            for &q01 in &self.q01 {
                                for &mode in &self.modes {
                                    out.push(SweepRow {
                                        cell: out.len() as u64,
                                        n,
                                        t,
                                        p,
                                        epsilon,
                                        q10,
                                        q01,
                                        mode,
                                        trials: self.trials,
                                        seed: self.seed,
                                        estimate: None,
                                        error: None,
                                        wall_ms: 0,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn run_cell(spec: &SweepSpec, row: &SweepRow, workers: Option<usize>) -> Result<McEstimate> {
    let decoder = row.mode.decoder().unwrap_or(DecoderMode::Suboptimal);
    let ch = ChannelParams::new(row.q10, row.q01)?;
    let mut cfg = ExperimentConfig::new(row.n, row.t, row.p, row.epsilon, row.seed, decoder)?
        .with_channel(ch)
        .with_strictness(spec.strictness)
        .with_budget(spec.search_budget);
    cfg.mode = decoder;
    // Modes vary fastest, so all modes of one parameter point share a
    // stream key and see the same codebooks and noise.
    let opts = RunOptions {
        cell: row.cell / spec.modes.len() as u64,
        workers,
    };
    match row.mode.decoder() {
        Some(m) => estimate_pe_with(&cfg, &ch, row.trials, m, &opts),
        None => estimate_p3_with(&cfg, &ch, row.trials, &opts),
    }
}

/// Runs every cell; a failing cell records its error and the sweep goes on.
/// Rows come back sorted by cell id.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<SweepRow>> {
    let mut rows = spec.cells()?;
    for row in rows.iter_mut() {
        let start = Instant::now();
        match run_cell(spec, row, workers) {
            Ok(e) => row.estimate = Some(e),
            Err(e) => row.error = Some(e.to_string()),
        }
        row.wall_ms = start.elapsed().as_millis();
    }
    rows.sort_by_key(|r| r.cell);
    Ok(rows)
}

/// Writes the sweep CSV. Wall time is a trailing column only when asked
/// for, so the default output is byte-stable.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], with_timing: bool, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "cell",
        "n",
        "t",
        "p",
        "epsilon",
        "q10",
        "q01",
        "mode",
        "trials",
        "seed",
        "failures",
        "budget_exceeded",
        "p_hat",
        "ci95_lo",
        "ci95_hi",
        "error",
    ];
    if with_timing {
        header.push("wall_ms");
    }
    w.write_record(&header)?;
    for r in rows {
        let (f, b, ph, lo, hi) = match &r.estimate {
            Some(e) => (
                e.failures.to_string(),
                e.budget_exceeded.to_string(),
                e.p_hat.to_string(),
                e.ci95_lo.to_string(),
                e.ci95_hi.to_string(),
            ),
            None => Default::default(),
        };
        let mut rec = vec![
            r.cell.to_string(),
            r.n.to_string(),
            r.t.to_string(),
            r.p.to_string(),
            r.epsilon.to_string(),
            r.q10.to_string(),
            r.q01.to_string(),
            r.mode.as_str().to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
            f,
            b,
            ph,
            lo,
            hi,
            r.error.clone().unwrap_or_default(),
        ];
        if with_timing {
            rec.push(r.wall_ms.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> SweepSpec {
        SweepSpec::from_json(
            r#"{"n":[6,8],"t":[20],"p":[0.3],"epsilon":[0.3],"q10":[0.05],"q01":[0.05],
                "modes":["suboptimal","p3"],"trials":20,"seed":3}"#,
        )
        .unwrap()
    }

    #[test]
    fn grid_order_and_ids() {
        let cells = spec().cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[1].n, cells[1].mode), (6, SweepMode::P3));
        assert_eq!((cells[2].n, cells[2].cell), (8, 2));
    }

    #[test]
    fn ratio_axis() {
        let s = SweepSpec::from_json(
            r#"{"n":[32],"t_over_log_n":[2.0],"p":[0.3],"epsilon":[0.3],"q10":[0.1],"q01":[0.1],
                "modes":["p3"],"trials":1,"seed":1}"#,
        )
        .unwrap();
        assert_eq!(s.cells().unwrap()[0].t, (2.0 * 32f64.ln()).ceil() as usize);
    }

    #[test]
    fn invalid_specs() {
        assert!(SweepSpec::from_json(r#"{"n":[],"t":[2],"p":[0.3],"epsilon":[0.3],"q10":[0],"q01":[0],"modes":["p3"],"trials":1,"seed":1}"#).is_err());
        assert!(SweepSpec::from_json(r#"{"n":[4],"t":[2],"p":[0.3],"epsilon":[0.3],"q10":[0],"q01":[0],"modes":["p3"],"trials":0,"seed":1}"#).is_err());
        assert!(SweepSpec::from_json(r#"{"n":[4],"p":[0.3],"epsilon":[0.3],"q10":[0],"q01":[0],"modes":["p3"],"trials":1,"seed":1}"#).is_err());
    }

    #[test]
    fn cell_errors_do_not_stop_the_sweep() {
        let s = SweepSpec::from_json(
            r#"{"n":[20],"t":[10],"p":[0.3],"epsilon":[0.3],"q10":[0.0],"q01":[0.0],
                "modes":["bayes","suboptimal"],"trials":3,"seed":1}"#,
        )
        .unwrap();
        let rows = run_sweep(&s, Some(1)).unwrap();
        assert!(rows[0].error.is_some() && rows[0].estimate.is_none());
        assert!(rows[1].estimate.is_some());
    }

    #[test]
    fn modes_share_draws() {
        // Missing edge or triangle on the active pair implies a suboptimal
        // failure, which in turn bounds the bipartizing decoder.
        let s = SweepSpec::from_json(
            r#"{"n":[12],"t":[30,60],"p":[0.3],"epsilon":[0.3],"q10":[0.1],"q01":[0.1],
                "modes":["p3","suboptimal","bipartize"],"trials":200,"seed":9}"#,
        )
        .unwrap();
        let rows = run_sweep(&s, None).unwrap();
        for c in rows.chunks(3) {
            let f: Vec<u64> = c.iter().map(|r| r.estimate.unwrap().failures).collect();
            assert!(f[0] <= f[1] && f[2] <= f[1], "{f:?}");
        }
    }

    #[test]
    fn csv_is_repeatable() {
        let s = spec();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_sweep_csv(&run_sweep(&s, Some(1)).unwrap(), false, &mut a).unwrap();
        write_sweep_csv(&run_sweep(&s, Some(3)).unwrap(), false, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("cell,n,t,p,epsilon,q10,q01,mode,trials,seed,failures,budget_exceeded,p_hat,ci95_lo,ci95_hi,error\n"));
    }
}
