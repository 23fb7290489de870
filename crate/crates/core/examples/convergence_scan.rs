//! KS distance of S_n/V_n to the standard normal along n for Rademacher
//! signs, and to the simulated X(1)/sqrt([X]_1) for a Pareto law.
//!
//! `cargo run --release --example convergence_scan`

use selfnorm_lab::levy::{limit_statistic_sample, LimitConfig, LimitSpec};
use selfnorm_lab::models::{sample_iid, DistributionModel};
use selfnorm_lab::selfnorm::self_normalized_sum;
use selfnorm_lab::stable::normal_cdf;
use selfnorm_lab::stats::{convergence_scan, LimitRef};
use selfnorm_lab::RandomSource;

fn main() -> selfnorm_lab::Result<()> {
    let m = 10_000;
    let n_grid = [10u64, 100, 1_000];
    let root = RandomSource::new(17, 0);

    let rademacher = DistributionModel::rademacher();
    let gen = |n: u64, r: &mut RandomSource| Ok(self_normalized_sum(&sample_iid(&rademacher, n as usize, r)));
    let cdf = |x: f64| Ok(normal_cdf(x));
    let report = convergence_scan("rademacher", gen, &LimitRef::Cdf(&cdf), &n_grid, m, &root.split(0), 0.03)?;
    println!("{}: {:?} -> {:?}", report.label, report.distances, report.verdict);

    let pareto = DistributionModel::pareto_sym(0.8)?;
    let limit = limit_statistic_sample(&LimitConfig::new(LimitSpec::unit(0.8, 0.5)?), m, &root.split(1))?
        .self_normalized()?;
    let gen = |n: u64, r: &mut RandomSource| Ok(self_normalized_sum(&sample_iid(&pareto, n as usize, r)));
    let report = convergence_scan("pareto_sym:0.8", gen, &LimitRef::Sample(&limit), &n_grid, m, &root.split(2), 0.03)?;
    println!("{}: {:?} -> {:?}", report.label, report.distances, report.verdict);
    Ok(())
}
