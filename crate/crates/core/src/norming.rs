//! Norming constant `a_n`, centering `b_n`, the Feller constant and the
//! Kesten–Maller ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::DistributionModel;

/// Start of the geometric bracketing scan.
pub const SCAN_START: f64 = 1e-6;
/// Number of doublings of the scan before giving up.
pub const SCAN_DOUBLINGS: u32 = 200;
/// Absolute tolerance on `n E sin(X/a_n)`.
pub const FELLER_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormingResult {
    pub n: u64,
    pub a_n: f64,
    pub b_n: Option<f64>,
    pub feller_gamma_n: Option<f64>,
}

fn ratio(model: &DistributionModel, n: u64, x: f64) -> f64 {
    n as f64 * model.trunc_second_moment(x) / (x * x)
}

/// `a_n`: the last crossing of `g(x) = n l(x) / x^2` through 1, i.e.
/// `sup{x : g(x) >= 1}`.
///
/// `g` is scanned on `1e-6 * 2^k` (plus the atoms of `|X|`, where `l` jumps)
/// and bisected down to adjacent doubles on the last bracket; of the two
/// endpoints the one with `g` closer to 1 is returned. Laws without mass
/// near the origin have `g = 0 <= 1` on a whole initial interval, which is
/// why the last crossing rather than the first is taken.
pub fn compute_an(model: &DistributionModel, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let mut points: Vec<f64> = (0..=SCAN_DOUBLINGS)
        .map(|k| SCAN_START * 2f64.powi(k as i32))
        .collect();
    points.extend(model.abs_atoms().iter().copied());
    points.sort_by(|a, b| a.total_cmp(b));
    points.dedup();

    let values: Vec<f64> = points.iter().map(|&x| ratio(model, n, x)).collect();
    if let Some(bad) = values.iter().find(|v| v.is_nan()) {
        return Err(Error::numerical("truncated second moment evaluation", *bad));
    }
    let last = values
        .iter()
        .rposition(|&g| g >= 1.0)
        .ok_or(Error::NoCrossing { n })?;
    if last + 1 == points.len() {
        return Err(Error::BracketOverflow {
            doublings: SCAN_DOUBLINGS,
        });
    }
    let (mut lo, mut hi) = (points[last], points[last + 1]);
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio(model, n, mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (g_lo, g_hi) = (ratio(model, n, lo), ratio(model, n, hi));
    Ok(if (g_lo - 1.0).abs() <= (g_hi - 1.0).abs() { lo } else { hi })
}

/// `n E sin(X / a_n)`, for α = 1 models.
pub fn feller_gamma(model: &DistributionModel, n: u64) -> Result<f64> {
    if model.alpha_attractor() != Some(1.0) {
        return Err(Error::BranchInapplicable(format!(
            "Feller constant needs an alpha = 1 model, {} is not",
            model.name()
        )));
    }
    let a = compute_an(model, n)?;
    Ok(n as f64 * model.sin_expectation(a, FELLER_TOL / n as f64)?)
}

/// Centering `b_n`: `(n/a_n) EX` for `1 < α <= 2`, `n E sin(X/a_n)` for
/// α = 1, and 0 for `α < 1`.
pub fn compute_bn(model: &DistributionModel, n: u64) -> Result<f64> {
    let alpha = model.alpha_attractor().ok_or_else(|| {
        Error::BranchInapplicable(format!("{} has no stable attractor", model.name()))
    })?;
    if alpha < 1.0 {
        Ok(0.0)
    } else if alpha == 1.0 {
        feller_gamma(model, n)
    } else {
        let mean = model.mean().ok_or_else(|| {
            Error::BranchInapplicable(format!("{}: EX undefined", model.name()))
        })?;
        if mean == 0.0 {
            return Ok(0.0);
        }
        Ok(n as f64 / compute_an(model, n)? * mean)
    }
}

pub fn norming(model: &DistributionModel, n: u64) -> Result<NormingResult> {
    let a_n = compute_an(model, n)?;
    let b_n = compute_bn(model, n).ok();
    let feller_gamma_n = if model.alpha_attractor() == Some(1.0) {
        b_n
    } else {
        None
    };
    Ok(NormingResult {
        n,
        a_n,
        b_n,
        feller_gamma_n,
    })
}

/// `n E sin(X/a_n)` along a grid of `n`, with a convergence flag.
#[derive(Clone, Debug, Serialize)]
pub struct FellerSequence {
    pub n_grid: Vec<u64>,
    pub values: Vec<f64>,
    pub differences: Vec<f64>,
    /// Successive differences shrink (or vanish).
    pub converging: bool,
    /// Value at the largest `n`.
    pub limit_estimate: f64,
}

pub fn feller_sequence(model: &DistributionModel, n_grid: &[u64]) -> Result<FellerSequence> {
    let values = n_grid
        .iter()
        .map(|&n| feller_gamma(model, n))
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let converging = differences
        .windows(2)
        .all(|d| d[1] < d[0] || d[1] <= 2.0 * FELLER_TOL);
    Ok(FellerSequence {
        n_grid: n_grid.to_vec(),
        limit_estimate: *values.last().unwrap_or(&0.0),
        values,
        differences,
        converging,
    })
}

/// `(x |E[X 1{|X|<=x}]| + E[X^2 1{|X|<=x}]) / (x^2 P(|X| > x))`.
pub fn km_ratio(model: &DistributionModel, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParams(format!("x = {x} must be positive")));
    }
    let tail = model.tail(x);
    if tail <= 0.0 {
        return Err(Error::DivisionDomain(format!(
            "P(|X| > {x}) = 0 for {}",
            model.name()
        )));
    }
    Ok((x * model.trunc_first_moment(x).abs() + model.trunc_second_moment(x)) / (x * x * tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain bisection on a closed-form `l`, used as the oracle.
    fn bisect_closed_form<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn rademacher_is_sqrt_n() {
        let m = DistributionModel::rademacher();
        for n in [1u64, 2, 3, 10, 100, 1000, 12345, 1_000_000] {
            let a = compute_an(&m, n).unwrap();
            let want = (n as f64).sqrt();
            assert!(((a - want) / want).abs() < 1e-8, "n={n}: {a}");
        }
        assert_eq!(compute_an(&m, 10_000).unwrap(), 100.0);
    }

    #[test]
    fn pareto_matches_oracle_and_asymptote() {
        for alpha in [0.5, 0.8, 1.5] {
            let m = DistributionModel::pareto_sym(alpha).unwrap();
            for n in [10u64, 1000, 100_000] {
                let nf = n as f64;
                let g = |x: f64| {
                    if x < 1.0 {
                        0.0
                    } else {
                        nf * alpha * (x.powf(2.0 - alpha) - 1.0) / ((2.0 - alpha) * x * x)
                    }
                };
                let want = bisect_closed_form(g, 1.0, 1e30);
                let a = compute_an(&m, n).unwrap();
                assert!(((a - want) / want).abs() < 1e-10, "{alpha} {n}");
                assert!((g(a) - 1.0).abs() < 1e-8);
            }
            let big = compute_an(&m, 1_000_000).unwrap();
            let asym = (1e6 * alpha / (2.0 - alpha)).powf(1.0 / alpha);
            assert!((big / asym - 1.0).abs() < 0.01, "{alpha}: {big} vs {asym}");
        }
    }

    #[test]
    fn uniform_small_n_has_no_crossing() {
        // g(x) = n x / 3 on (0, 1] and n / (3 x^2) beyond; below 1 for n <= 2.
        let m = DistributionModel::uniform_centered();
        assert!(matches!(compute_an(&m, 1), Err(Error::NoCrossing { n: 1 })));
        assert!(matches!(compute_an(&m, 2), Err(Error::NoCrossing { .. })));
        // Grid-search oracle for the last crossing at n = 10.
        let n = 10.0;
        let g = |x: f64| n * x.min(1.0).powi(3) / 3.0 / (x * x);
        let mut last = 0.0;
        let mut x = 1e-6;
        while x < 5.0 {
            if g(x) >= 1.0 {
                last = x;
            }
            x += 1e-6;
        }
        let a = compute_an(&m, 10).unwrap();
        assert!((a - last).abs() < 2e-6, "{a} vs {last}");
        assert!((a - (10.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn scaling_law() {
        for alpha in [0.5, 0.8, 1.5] {
            let m = DistributionModel::pareto_sym(alpha).unwrap();
            let r = compute_an(&m, 200_000).unwrap() / compute_an(&m, 100_000).unwrap();
            assert!((r / 2f64.powf(1.0 / alpha) - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn an_nondecreasing() {
        for m in crate::models::catalog() {
            if m.name() == "slowvar_tail" {
                continue;
            }
            let mut prev = 0.0;
            for n in [10u64, 100, 1000, 10_000] {
                let a = compute_an(&m, n).unwrap();
                assert!(a > 0.0 && a >= prev, "{}", m.name());
                prev = a;
            }
        }
    }

    #[test]
    fn centering_branches() {
        let centered = DistributionModel::pareto_centered(1.5, 0.8).unwrap();
        assert_eq!(compute_bn(&centered, 1000).unwrap(), 0.0);
        assert_eq!(compute_bn(&DistributionModel::pareto_sym(0.8).unwrap(), 1000).unwrap(), 0.0);
        assert_eq!(compute_bn(&DistributionModel::cauchy_sym(), 1000).unwrap(), 0.0);
        let asym = DistributionModel::pareto_asym(1.5, 0.8).unwrap();
        let b = compute_bn(&asym, 1000).unwrap();
        let want = 1000.0 / compute_an(&asym, 1000).unwrap() * 1.8;
        assert!((b - want).abs() < 1e-12);
        assert!(matches!(
            compute_bn(&DistributionModel::slowvar_tail(), 10),
            Err(Error::BranchInapplicable(_))
        ));
        assert!(matches!(
            feller_gamma(&DistributionModel::rademacher(), 10),
            Err(Error::BranchInapplicable(_))
        ));
    }

    /// `Ci(x)` by its power series, for the closed-form oracle.
    fn cos_integral(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            let k2 = 2.0 * k as f64;
            term *= -x * x / ((k2 - 1.0) * k2);
            sum += term / k2;
        }
        0.577_215_664_901_532_9 + x.ln() + sum
    }

    #[test]
    fn feller_constant_cauchy_and_asymmetric() {
        let cauchy = DistributionModel::cauchy_sym();
        assert_eq!(feller_gamma(&cauchy, 10_000).unwrap(), 0.0);
        let seq = feller_sequence(&cauchy, &[1000, 10_000, 100_000, 1_000_000]).unwrap();
        assert_eq!(seq.limit_estimate, 0.0);
        assert!(seq.converging);

        // pareto_asym(1, p): n E sin(X/a) = n (p-q)/a [sin δ/δ - Ci(δ)], δ = 1/a.
        let m = DistributionModel::pareto_asym(1.0, 0.8).unwrap();
        let grid = [1000u64, 10_000, 100_000, 1_000_000];
        let seq = feller_sequence(&m, &grid).unwrap();
        for (&n, &v) in grid.iter().zip(&seq.values) {
            let a = compute_an(&m, n).unwrap();
            let d = 1.0 / a;
            let want = n as f64 * 0.6 / a * (d.sin() / d - cos_integral(d));
            assert!((v - want).abs() < 1e-5, "n={n}: {v} vs {want}");
        }
        // Differences approach 0.6 log 10 instead of shrinking.
        for d in &seq.differences {
            assert!((d - 0.6 * 10f64.ln()).abs() < 0.01, "{d}");
        }
        assert!(!seq.converging);
    }

    #[test]
    fn km_ratios() {
        let m = DistributionModel::pareto_sym(1.5).unwrap();
        let r = km_ratio(&m, 1e8).unwrap();
        assert!((r - 3.0).abs() < 1e-3, "{r}");
        let lp = DistributionModel::logpareto2();
        let vals: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&x| km_ratio(&lp, x).unwrap()).collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
        assert!((vals[2] - 2.0 * 1000f64.ln()).abs() < 1e-9);
        assert!(matches!(
            km_ratio(&DistributionModel::rademacher(), 2.0),
            Err(Error::DivisionDomain(_))
        ));
        let half = DistributionModel::pareto_sym(0.5).unwrap();
        let r = km_ratio(&half, 1e8).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-3);
    }
}
