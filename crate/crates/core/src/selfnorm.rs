//! Finite-n self-normalized statistics.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFunctionPath {
    pub n: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// `⌊n t⌋`, clamped to `[0, n]`; the tiny slack keeps `t = k/n` on index `k`.
pub fn floor_index(n: usize, t: f64) -> usize {
    let k = (n as f64 * t * (1.0 + 4.0 * f64::EPSILON)).floor();
    (k.max(0.0) as usize).min(n)
}

fn prefix_sums(xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len() + 1);
    let mut s = 0.0;
    out.push(0.0);
    for &x in xs {
        s += x;
        out.push(s);
    }
    out
}

fn sum_squares(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum()
}

/// `S_{⌊nt⌋} / V_n` on `grid`; the zero path when `V_n = 0`.
pub fn sn_path(xs: &[f64], grid: &[f64]) -> StepFunctionPath {
    let n = xs.len();
    let v = sum_squares(xs).sqrt();
    let prefix = prefix_sums(xs);
    let values = grid
        .iter()
        .map(|&t| {
            if v > 0.0 {
                prefix[floor_index(n, t)] / v
            } else {
                0.0
            }
        })
        .collect();
    StepFunctionPath {
        n,
        grid: grid.to_vec(),
        values,
    }
}

/// `S_n / V_n` with the zero convention.
pub fn self_normalized_sum(xs: &[f64]) -> f64 {
    let v = sum_squares(xs).sqrt();
    if v > 0.0 {
        xs.iter().sum::<f64>() / v
    } else {
        0.0
    }
}

/// `T_{n,t}(X - μ) = n^{-1/2} Σ_{i≤⌊nt⌋}(x_i - μ) / s_n`, with `s_n` the
/// sample standard deviation (divisor `n - 1`).
pub fn student_process(xs: &[f64], mu: f64, t: f64) -> Result<f64> {
    let n = xs.len();
    if n < 2 {
        return Err(Error::Degenerate("Student statistic needs n >= 2".into()));
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::Degenerate("sample variance is zero".into()));
    }
    let k = floor_index(n, t);
    let partial: f64 = xs[..k].iter().map(|x| x - mu).sum();
    Ok(partial / (n as f64).sqrt() / var.sqrt())
}

/// The Student statistic at `t = 1, μ = 0` written through `S_n/V_n`:
/// `r / sqrt((n - r^2)/(n - 1))`.
pub fn student_from_self_normalized(ratio: f64, n: usize) -> Result<f64> {
    let nf = n as f64;
    let denom = (nf - ratio * ratio) / (nf - 1.0);
    if n < 2 || !(denom > 0.0) {
        return Err(Error::Degenerate(
            "S_n/V_n = ±sqrt(n) leaves no sample variance".into(),
        ));
    }
    Ok(ratio / denom.sqrt())
}

/// `(max|x_i| / S_n, max|x_i| / V_n)`; the first is `None` when `S_n = 0`.
pub fn max_ratios(xs: &[f64]) -> (Option<f64>, f64) {
    let m = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let s: f64 = xs.iter().sum();
    let v = sum_squares(xs).sqrt();
    let over_s = if s != 0.0 { Some(m / s) } else { None };
    let over_v = if v > 0.0 { m / v } else { 0.0 };
    (over_s, over_v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarTriple {
    pub s_over_a: f64,
    pub v2_over_a2: f64,
    pub max_over_a: f64,
}

pub fn scalar_triple(xs: &[f64], a_n: f64) -> ScalarTriple {
    let s: f64 = xs.iter().sum();
    let m = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    ScalarTriple {
        s_over_a: s / a_n,
        v2_over_a2: sum_squares(xs) / (a_n * a_n),
        max_over_a: m / a_n,
    }
}
