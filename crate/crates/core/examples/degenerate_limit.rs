//! |S_n/V_n| for the slowly varying tail P(|X| > x) = 1/ln x: the fraction
//! of replicates outside 1 ± 0.1 along n.
//!
//! `cargo run --release --example degenerate_limit -- [M]`

use selfnorm_lab::experiments::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> selfnorm_lab::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5_000);
    let mut cfg = ExperimentConfig::new("degenerate", ExperimentKind::Degenerate, "slowvar_tail");
    cfg.n_grid = vec![10, 100, 1_000, 10_000];
    cfg.replicates = Some(m);
    let report = run_experiment(&cfg, 0)?.report;
    for (n, d) in report.n_grid.iter().zip(&report.distances) {
        println!("n = {n:>6}  P(||S_n/V_n| - 1| > 0.1) = {d:.4}");
    }
    Ok(())
}
