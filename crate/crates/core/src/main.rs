use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use bmac_partition::codebook::{DecoderMode, ExperimentConfig, DEFAULT_EPSILON};
use bmac_partition::experiments::{
    estimate_pe_with, q_segment, rates_table, run_sweep, run_validate, write_rates_csv,
    write_sweep_csv, McEstimate, RunOptions, SweepSpec,
};
use bmac_partition::rates::DEFAULT_P_GRID;
use bmac_partition::{ChannelParams, Strictness};

#[derive(Parser)]
#[command(
    name = "bmac",
    version,
    about = "User partitioning over a noisy Boolean multi-access channel"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rate functions and thresholds along the segment from (0,0) to (q10,q01).
    Rates {
        #[arg(long)]
        q10: f64,
        #[arg(long)]
        q01: f64,
        /// Number of points on the segment; 1 evaluates only (q10,q01).
        #[arg(long, default_value_t = 1)]
        qgrid: usize,
        /// Scan points for the maximisation over p.
        #[arg(long, default_value_t = DEFAULT_P_GRID)]
        pgrid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo estimate of the decoding error probability.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        q10: f64,
        #[arg(long, default_value_t = 0.0)]
        q01: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = DecoderMode::Suboptimal)]
        mode: DecoderMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Strictness::Sufficient)]
        strictness: Strictness,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a JSON grid of simulations and writes one CSV row per cell.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Append a wall_ms column (makes the output run-dependent).
        #[arg(long)]
        with_timing: bool,
    },
    /// Numeric self-checks of the rate toolkit; exits nonzero on failure.
    Validate {
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    config: &'a ExperimentConfig,
    trials: u64,
    estimate: McEstimate,
}

fn create(path: &PathBuf) -> bmac_partition::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> bmac_partition::Result<bool> {
    match cli.cmd {
        Cmd::Rates {
            q10,
            q01,
            qgrid,
            pgrid,
            out,
        } => {
            let rows = rates_table(&q_segment(q10, q01, qgrid), pgrid)?;
            write_rates_csv(&rows, create(&out)?)?;
            Ok(true)
        }
        Cmd::Simulate {
            n,
            t,
            p,
            epsilon,
            q10,
            q01,
            trials,
            mode,
            seed,
            strictness,
            workers,
            out,
        } => {
            let ch = ChannelParams::new(q10, q01)?;
            let cfg = ExperimentConfig::new(n, t, p, epsilon, seed, mode)?
                .with_channel(ch)
                .with_strictness(strictness);
            let estimate =
                estimate_pe_with(&cfg, &ch, trials, mode, &RunOptions { cell: 0, workers })?;
            let text = serde_json::to_string_pretty(&SimulateOutput {
                config: &cfg,
                trials,
                estimate,
            })?;
            println!("{text}");
            if let Some(path) = out {
                let mut f = create(&path)?;
                writeln!(f, "{text}")?;
            }
            Ok(true)
        }
        Cmd::Sweep {
            spec,
            out,
            workers,
            with_timing,
        } => {
            let spec = SweepSpec::from_json(&std::fs::read_to_string(spec)?)?;
            let rows = run_sweep(&spec, workers)?;
            write_sweep_csv(&rows, with_timing, create(&out)?)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "cell {}: {}",
                    r.cell,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            Ok(true)
        }
        Cmd::Validate { json } => {
            let report = run_validate()?;
            for c in &report.checks {
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{verdict} {:<20} measured={:.3e} tol={:.0e}  {}",
                    c.name, c.measured, c.tolerance, c.detail
                );
            }
            if let Some(path) = json {
                let mut f = create(&path)?;
                serde_json::to_writer_pretty(&mut f, &report)?;
                writeln!(f)?;
            }
            Ok(report.all_passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
