//! The random code: an `N x T` i.i.d. Bernoulli transmission matrix.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitRow;
use crate::channel::ChannelParams;
use crate::decoder::Strictness;
use crate::error::{Error, Result};

/// Which decoder (or analysis criterion) a trial is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DecoderMode {
    /// True edge present and not on any odd cycle of the candidate graph.
    Suboptimal,
    /// Candidate graph, minimum edge bipartization, 2-coloring.
    Bipartize,
    /// Exhaustive Bayesian decoding (small `N` only).
    Bayes,
}

impl DecoderMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecoderMode::Suboptimal => "suboptimal",
            DecoderMode::Bipartize => "bipartize",
            DecoderMode::Bayes => "bayes",
        }
    }
}

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Parameters of one simulated configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_users: usize,
    pub n_rounds: usize,
    pub k_active: usize,
    pub design_p: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub mode: DecoderMode,
    #[serde(default = "ChannelParams::noiseless")]
    pub channel: ChannelParams,
    #[serde(default)]
    pub strictness: Strictness,
    #[serde(default = "default_budget")]
    pub search_budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_SEARCH_BUDGET
}

impl ExperimentConfig {
    pub fn new(
        n_users: usize,
        n_rounds: usize,
        design_p: f64,
        epsilon: f64,
        seed: u64,
        mode: DecoderMode,
    ) -> Result<Self> {
        let cfg = ExperimentConfig {
            n_users,
            n_rounds,
            k_active: 2,
            design_p,
            epsilon,
            seed,
            mode,
            channel: ChannelParams::noiseless(),
            strictness: Strictness::default(),
            search_budget: DEFAULT_SEARCH_BUDGET,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_channel(mut self, ch: ChannelParams) -> Self {
        self.channel = ch;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.search_budget = budget;
        self
    }

    pub fn kernel(&self) -> Result<crate::channel::JointKernel> {
        crate::channel::JointKernel::new(self.design_p, self.channel, self.k_active)
    }

    pub fn with_strictness(mut self, s: Strictness) -> Self {
        self.strictness = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_users < 3 {
            return bad(format!("n_users = {} must be at least 3", self.n_users));
        }
        if self.n_rounds < 1 {
            return bad("n_rounds must be at least 1".into());
        }
        if !(self.design_p > 0.0 && self.design_p < 1.0) {
            return bad(format!("design_p = {} must lie in (0, 1)", self.design_p));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if self.k_active != 2 {
            return bad(format!(
                "k_active = {} is unsupported, only 2",
                self.k_active
            ));
        }
        Ok(())
    }
}

/// `N x T` bit matrix; row `i` is the codeword of user `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMatrix {
    rows: Vec<BitRow>,
    n_rounds: usize,
    design_p: f64,
}

impl TransmissionMatrix {
    pub fn from_rows(rows: Vec<BitRow>, design_p: f64) -> Result<Self> {
        let n_rounds = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != n_rounds) {
            return Err(Error::DimensionMismatch {
                expected: n_rounds,
                actual: bad.len(),
            });
        }
        Ok(TransmissionMatrix {
            rows,
            n_rounds,
            design_p,
        })
    }

    /// Draws every entry as an independent Bernoulli(`p`), row-major.
    ///
    /// `p = 0` short-circuits to the zero matrix without consuming draws.
    pub fn random<R: Rng + ?Sized>(n_users: usize, n_rounds: usize, p: f64, rng: &mut R) -> Self {
        let rows = (0..n_users)
            .map(|_| {
                let mut r = BitRow::zeros(n_rounds);
                if p > 0.0 {
                    for t in 0..n_rounds {
                        if rng.gen::<f64>() < p {
                            r.set(t, true);
                        }
                    }
                }
                r
            })
            .collect();
        TransmissionMatrix {
            rows,
            n_rounds,
            design_p: p,
        }
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }

    pub fn n_rounds(&self) -> usize {
        self.n_rounds
    }

    pub fn design_p(&self) -> f64 {
        self.design_p
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn get(&self, i: usize, t: usize) -> bool {
        self.rows[i].get(t)
    }

    /// Writes `N, T, p, seed` followed by the packed rows, all little-endian.
    pub fn write_dump<W: Write>(&self, seed: u64, mut w: W) -> Result<()> {
        w.write_all(&(self.n_users() as u64).to_le_bytes())?;
        w.write_all(&(self.n_rounds as u64).to_le_bytes())?;
        w.write_all(&self.design_p.to_le_bytes())?;
        w.write_all(&seed.to_le_bytes())?;
        for r in &self.rows {
            for word in r.words() {
                w.write_all(&word.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a dump written by [`write_dump`](Self::write_dump); returns the
    /// matrix and the recorded seed.
    pub fn read_dump<R: Read>(mut r: R) -> Result<(Self, u64)> {
        let mut buf = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut buf)?;
            Ok(buf)
        };
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let t = u64::from_le_bytes(next(&mut r)?) as usize;
        let p = f64::from_le_bytes(next(&mut r)?);
        let seed = u64::from_le_bytes(next(&mut r)?);
        let words_per_row = t.div_ceil(64);
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let mut words = Vec::with_capacity(words_per_row);
            for _ in 0..words_per_row {
                words.push(u64::from_le_bytes(next(&mut r)?));
            }
            rows.push(BitRow::from_words(words, t));
        }
        Ok((
            TransmissionMatrix {
                rows,
                n_rounds: t,
                design_p: p,
            },
            seed,
        ))
    }
}

/// Draws the codebook for `cfg` from `rng`.
pub fn generate<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> TransmissionMatrix {
    TransmissionMatrix::random(cfg.n_users, cfg.n_rounds, cfg.design_p, rng)
}
