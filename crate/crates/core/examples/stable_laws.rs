//! Characteristic function, sampler, CDF and quantiles of S(α, γ, c, p, q).
//!
//! `cargo run --release --example stable_laws`

use selfnorm_lab::stable::{cf_eval, StableCdf, StableParams, StableSampler};
use selfnorm_lab::RandomSource;

fn main() -> selfnorm_lab::Result<()> {
    let mut rng = RandomSource::new(7, 0);
    for (alpha, p) in [(0.5, 1.0), (1.0, 0.5), (1.5, 0.8), (2.0, 0.5)] {
        let params = StableParams::unit(alpha, 0.0, p)?;
        let sampler = StableSampler::new(&params)?;
        let cdf = StableCdf::new(&params)?;
        let draws: Vec<f64> = (0..5).map(|_| sampler.sample(&mut rng)).collect();
        let f = cf_eval(&params, 1.0)?;
        println!("S({alpha}, 0, 1, {p}, {}):", 1.0 - p);
        println!("  f(1) = {:.6} {:+.6}i", f.re, f.im);
        println!("  F(0) = {:.6}, F(1) = {:.6}", cdf.cdf(0.0)?, cdf.cdf(1.0)?);
        println!("  median = {:.6}", cdf.quantile(0.5)?);
        println!("  draws = {draws:.4?}");
    }
    Ok(())
}
