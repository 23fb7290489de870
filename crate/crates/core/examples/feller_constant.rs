//! The sequence n E sin(X/a_n) for α = 1 models: it settles for the
//! symmetric Cauchy law and drifts like a logarithm for a skewed Pareto law.
//!
//! `cargo run --release --example feller_constant`

use selfnorm_lab::models::DistributionModel;
use selfnorm_lab::norming::feller_sequence;

fn main() -> selfnorm_lab::Result<()> {
    let grid = [10u64, 100, 1_000, 10_000, 100_000];
    for name in ["cauchy_sym", "pareto_asym:1:0.8"] {
        let model = DistributionModel::lookup(name)?;
        let seq = feller_sequence(&model, &grid)?;
        println!("{name}: converging = {}", seq.converging);
        for (n, v) in seq.n_grid.iter().zip(&seq.values) {
            println!("  n = {n:>7}  n E sin(X/a_n) = {v:+.6}");
        }
    }
    Ok(())
}
