//! Self-normalized path, Student statistic, max ratios and the scalar
//! triple for one Pareto sample.
//!
//! `cargo run --release --example self_normalized -- [n]`

use selfnorm_lab::models::{sample_iid, DistributionModel};
use selfnorm_lab::norming::compute_an;
use selfnorm_lab::selfnorm::{max_ratios, scalar_triple, sn_path, student_process};
use selfnorm_lab::RandomSource;

fn main() -> selfnorm_lab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let model = DistributionModel::pareto_sym(1.5)?;
    let xs = sample_iid(&model, n, &mut RandomSource::new(3, 0));
    let grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let path = sn_path(&xs, &grid);
    for (t, v) in path.grid.iter().zip(&path.values) {
        println!("t = {t:.1}  S_[nt]/V_n = {v:+.5}  T_n,t = {:+.5}", student_process(&xs, 0.0, *t)?);
    }
    let (over_s, over_v) = max_ratios(&xs);
    println!("max/S_n = {over_s:?}, max/V_n = {over_v:.5}");
    let a = compute_an(&model, n as u64)?;
    println!("a_n = {a:.4}, triple = {:?}", scalar_triple(&xs, a));
    Ok(())
}
