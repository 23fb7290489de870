//! Compares the simulated Lévy endpoint X(1) with direct stable draws.
//!
//! `cargo run --release --example levy_marginal -- [M] [epsilon]`

use rayon::prelude::*;
use selfnorm_lab::levy::{limit_statistic_sample, LevyMeasureSpec, LimitConfig, LimitSpec};
use selfnorm_lab::stable::{sample_stable, StableParams};
use selfnorm_lab::stats::{critical_two_sample, ks_two_sample, EmpiricalSample};
use selfnorm_lab::RandomSource;

fn main() -> selfnorm_lab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let m: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let epsilon: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let threshold = 1.5 * critical_two_sample(m, m);
    println!("M = {m}, epsilon = {epsilon}, threshold = {threshold:.4}");
    println!("{:>6} {:>5} {:>10} {:>10}", "alpha", "p", "KS", "KS(2C)");
    for (i, &alpha) in [0.5, 1.0, 1.5].iter().enumerate() {
        for (j, &p) in [0.5, 0.8].iter().enumerate() {
            let params = StableParams::unit(alpha, 0.0, p)?;
            let direct_rng = RandomSource::derive(1, &[i as u64, j as u64, 0]);
            let direct: Vec<f64> = (0..m as u64)
                .into_par_iter()
                .map(|r| sample_stable(&params, &mut direct_rng.split(r)))
                .collect::<selfnorm_lab::Result<_>>()?;
            let direct = EmpiricalSample::from_values("direct", direct)?;

            let mut config = LimitConfig::new(LimitSpec::unit(alpha, p)?);
            config.epsilon = epsilon;
            let path_rng = RandomSource::derive(1, &[i as u64, j as u64, 1]);
            let x1 = limit_statistic_sample(&config, m, &path_rng)?.x1_sample()?;

            let LimitSpec::Stable(nu) = config.spec else { unreachable!() };
            config.spec = LimitSpec::Stable(LevyMeasureSpec::new(alpha, p, 2.0 * nu.scale_const)?);
            let doubled = limit_statistic_sample(&config, m, &path_rng)?.x1_sample()?;

            println!(
                "{alpha:>6} {p:>5} {:>10.5} {:>10.5}",
                ks_two_sample(&x1, &direct),
                ks_two_sample(&doubled, &direct)
            );
        }
    }
    Ok(())
}
