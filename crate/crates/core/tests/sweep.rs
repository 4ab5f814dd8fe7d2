use bmac_partition::experiments::{
    estimate_p3_with, estimate_pe_with, run_sweep, write_sweep_csv, RunOptions, SweepSpec,
};
use bmac_partition::{ChannelParams, DecoderMode, ExperimentConfig};

#[test]
fn single_cell_matches_direct_estimate() {
    let spec = SweepSpec::from_json(
        r#"{"n":[10],"t":[40],"p":[0.3],"epsilon":[0.25],"q10":[0.05],"q01":[0.1],
            "modes":["bipartize"],"trials":120,"seed":5}"#,
    )
    .unwrap();
    let rows = run_sweep(&spec, None).unwrap();
    assert_eq!(rows.len(), 1);
    let ch = ChannelParams::new(0.05, 0.1).unwrap();
    let cfg = ExperimentConfig::new(10, 40, 0.3, 0.25, 5, DecoderMode::Bipartize)
        .unwrap()
        .with_channel(ch);
    let direct = estimate_pe_with(
        &cfg,
        &ch,
        120,
        DecoderMode::Bipartize,
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(rows[0].estimate.unwrap(), direct);
}

#[test]
fn p3_cells_match_direct_estimate() {
    let spec = SweepSpec::from_json(
        r#"{"n":[10],"t":[40],"p":[0.3],"epsilon":[0.25],"q10":[0.05],"q01":[0.1],
            "modes":["p3"],"trials":120,"seed":5}"#,
    )
    .unwrap();
    let rows = run_sweep(&spec, Some(2)).unwrap();
    let ch = ChannelParams::new(0.05, 0.1).unwrap();
    let cfg = ExperimentConfig::new(10, 40, 0.3, 0.25, 5, DecoderMode::Suboptimal)
        .unwrap()
        .with_channel(ch);
    let direct = estimate_p3_with(&cfg, &ch, 120, &RunOptions::default()).unwrap();
    assert_eq!(rows[0].estimate.unwrap(), direct);
}

#[test]
fn shuffled_execution_gives_identical_csv() {
    let spec = SweepSpec::from_json(
        r#"{"n":[6,9],"t":[20,35],"p":[0.3],"epsilon":[0.3],"q10":[0.05],"q01":[0.05],
            "modes":["suboptimal","p3"],"trials":30,"seed":8}"#,
    )
    .unwrap();
    let rows = run_sweep(&spec, Some(1)).unwrap();
    let mut reversed = rows.clone();
    reversed.reverse();
    // Out-of-order rows are put back in canonical order before writing.
    reversed.sort_by_key(|r| r.cell);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_sweep_csv(&rows, false, &mut a).unwrap();
    write_sweep_csv(&reversed, false, &mut b).unwrap();
    assert_eq!(a, b);
}
