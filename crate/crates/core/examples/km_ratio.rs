//! Kesten–Maller ratio (x|E X1{|X|<=x}| + E X²1{|X|<=x}) / (x² P(|X|>x)).
//!
//! `cargo run --release --example km_ratio`

use selfnorm_lab::models::DistributionModel;
use selfnorm_lab::norming::km_ratio;

fn main() -> selfnorm_lab::Result<()> {
    for name in ["logpareto2", "pareto_sym:1.5", "pareto_sym:0.5", "cauchy_sym", "rademacher"] {
        let model = DistributionModel::lookup(name)?;
        print!("{name:<16}");
        for x in [10.0, 1e2, 1e3, 1e4] {
            match km_ratio(&model, x) {
                Ok(r) => print!(" {r:>10.5}"),
                Err(_) => print!(" {:>10}", "-"),
            }
        }
        println!();
    }
    Ok(())
}
