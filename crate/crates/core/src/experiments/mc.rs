//! Per-trial simulation and the `P_e` / `P_3` estimators.

use rayon::prelude::*;

use crate::channel::{apply_noise, or_superpose, ChannelParams, FeedbackVector, StatusVector};
use crate::codebook::{generate, DecoderMode, ExperimentConfig, TransmissionMatrix};
use crate::decoder::{
    bayesian_decode, decode_detailed, distortion, marginal_typical, simplified_edge_test,
    suboptimal_success, BlockSplit,
};
use crate::error::{Error, Result};
use crate::rng::{Role, StreamKey};

use super::stats::McEstimate;

/// Scheduling knobs; none of them changes any result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Cell index used in the stream keys.
    pub cell: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    Failure,
    BudgetExceeded,
}

pub(crate) fn draw_trial(
    cfg: &ExperimentConfig,
    cell: u64,
    trial: u64,
) -> Result<(TransmissionMatrix, FeedbackVector)> {
    let x = generate(
        cfg,
        &mut StreamKey::new(cfg.seed, cell, trial, Role::Codebook).rng(),
    );
    let y0 = or_superpose(&x, &StatusVector::first_pair(cfg.n_users))?;
    let y = apply_noise(
        &y0,
        &cfg.channel,
        &mut StreamKey::new(cfg.seed, cell, trial, Role::Noise).rng(),
    );
    Ok((x, y))
}

pub(crate) fn run_parallel<T, F>(trials: u64, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let go = || {
        (0..trials)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<T>>>()
    };
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    }
}

fn tally(outcomes: &[TrialOutcome]) -> McEstimate {
    let failures = outcomes
        .iter()
        .filter(|&&o| o == TrialOutcome::Failure)
        .count() as u64;
    let budget = outcomes
        .iter()
        .filter(|&&o| o == TrialOutcome::BudgetExceeded)
        .count() as u64;
    McEstimate::from_counts(outcomes.len() as u64, failures, budget)
}

fn one_trial(
    cfg: &ExperimentConfig,
    mode: DecoderMode,
    cell: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let (x, y) = draw_trial(cfg, cell, trial)?;
    let s0 = StatusVector::first_pair(cfg.n_users);
    let fail = |bad: bool| {
        if bad {
            TrialOutcome::Failure
        } else {
            TrialOutcome::Success
        }
    };
    Ok(match mode {
        DecoderMode::Suboptimal => fail(!suboptimal_success(&x, &y, &s0, cfg)?),
        DecoderMode::Bipartize => match decode_detailed(&x, &y, cfg) {
            Ok(r) => fail(distortion(&s0, &r.partition)? == 1),
            Err(Error::BudgetExceeded { .. }) => TrialOutcome::BudgetExceeded,
            Err(e) => return Err(e),
        },
        DecoderMode::Bayes => {
            fail(distortion(&s0, &bayesian_decode(&x, &y, &cfg.kernel()?)?)? == 1)
        }
    })
}

/// Average error of `mode` with the active pair fixed to users 0 and 1.
pub fn estimate_pe(
    cfg: &ExperimentConfig,
    ch: &ChannelParams,
    trials: u64,
    mode: DecoderMode,
) -> Result<McEstimate> {
    estimate_pe_with(cfg, ch, trials, mode, &RunOptions::default())
}

pub fn estimate_pe_with(
    cfg: &ExperimentConfig,
    ch: &ChannelParams,
    trials: u64,
    mode: DecoderMode,
    opts: &RunOptions,
) -> Result<McEstimate> {
    Ok(tally(&trial_outcomes(cfg, ch, trials, mode, opts)?))
}

/// Per-trial outcomes behind [`estimate_pe_with`], in trial order. Two
/// configurations run with the same seed and cell share their stream keys,
/// which pairs their trials.
pub fn trial_outcomes(
    cfg: &ExperimentConfig,
    ch: &ChannelParams,
    trials: u64,
    mode: DecoderMode,
    opts: &RunOptions,
) -> Result<Vec<TrialOutcome>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let cfg = cfg.clone().with_channel(*ch);
    cfg.validate()?;
    if mode == DecoderMode::Bayes && cfg.n_users > crate::decoder::BAYES_MAX_USERS {
        return Err(Error::InvalidParameter(format!(
            "bayes mode needs n <= {}",
            crate::decoder::BAYES_MAX_USERS
        )));
    }
    run_parallel(trials, opts.workers, |t| {
        one_trial(&cfg, mode, opts.cell, t)
    })
}

/// True edge missing, or a triangle through it, in the candidate graph.
///
/// Only the `2N - 3` pairs touching users 0 or 1 are tested.
pub fn p3_event(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    cfg: &ExperimentConfig,
) -> Result<bool> {
    let kernel = cfg.kernel()?;
    if !marginal_typical(y, &kernel, cfg.epsilon, cfg.strictness) {
        return Ok(true);
    }
    let split = BlockSplit::new(y);
    let edge = |i: usize, j: usize| {
        simplified_edge_test(
            &split,
            x.row(i),
            x.row(j),
            &kernel,
            cfg.epsilon,
            cfg.strictness,
        )
    };
    if !edge(0, 1) {
        return Ok(true);
    }
    Ok((2..x.n_users()).any(|k| edge(0, k) && edge(1, k)))
}

pub fn estimate_p3(cfg: &ExperimentConfig, ch: &ChannelParams, trials: u64) -> Result<McEstimate> {
    estimate_p3_with(cfg, ch, trials, &RunOptions::default())
}

pub fn estimate_p3_with(
    cfg: &ExperimentConfig,
    ch: &ChannelParams,
    trials: u64,
    opts: &RunOptions,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let cfg = cfg.clone().with_channel(*ch);
    cfg.validate()?;
    let outcomes = run_parallel(trials, opts.workers, |t| {
        let (x, y) = draw_trial(&cfg, opts.cell, t)?;
        Ok(if p3_event(&x, &y, &cfg)? {
            TrialOutcome::Failure
        } else {
            TrialOutcome::Success
        })
    })?;
    Ok(tally(&outcomes))
}
