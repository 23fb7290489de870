//! Empirical samples, Kolmogorov–Smirnov distances and convergence verdicts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Final thresholds are KS critical values times this factor.
pub const THRESHOLD_INFLATION: f64 = 1.5;
/// Largest tolerated ratio between consecutive distances along `n_grid`.
pub const MAX_INCREASE: f64 = 1.2;
const KS_95: f64 = 1.36;

pub fn critical_one_sample(m: usize) -> f64 {
    KS_95 / (m as f64).sqrt()
}

pub fn critical_two_sample(m1: usize, m2: usize) -> f64 {
    let (a, b) = (m1 as f64, m2 as f64);
    KS_95 * ((a + b) / (a * b)).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct EmpiricalSample {
    pub label: String,
    values: Vec<f64>,
    #[serde(skip)]
    sorted: Vec<f64>,
    pub seed_provenance: Vec<(u64, u64)>,
    pub n_inner: Option<u64>,
}

impl EmpiricalSample {
    pub fn new(
        label: impl Into<String>,
        values: Vec<f64>,
        seed_provenance: Vec<(u64, u64)>,
        n_inner: Option<u64>,
    ) -> Result<Self> {
        let label = label.into();
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("sample `{label}` holds {bad}")));
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalSample {
            label,
            values,
            sorted,
            seed_provenance,
            n_inner,
        })
    }

    pub fn from_values(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(label, values, Vec::new(), None)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            label,
            self.values.iter().map(|&v| f(v)).collect(),
            self.seed_provenance.clone(),
            self.n_inner,
        )
    }

    /// Fraction of values with `pred` true.
    pub fn fraction(&self, pred: impl Fn(f64) -> bool) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().filter(|&&v| pred(v)).count() as f64 / self.values.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample skewness and its large-sample standard error `sqrt(6/M)`.
    pub fn skewness(&self) -> (f64, f64) {
        let m = self.values.len() as f64;
        let mu = self.mean();
        let m2 = self.values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / m;
        let m3 = self.values.iter().map(|v| (v - mu).powi(3)).sum::<f64>() / m;
        (m3 / m2.powf(1.5), (6.0 / m).sqrt())
    }
}

/// `sup_x |F_M(x) - F(x)|`, checking both sides of every jump of `F_M`.
pub fn ks_one_sample(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> f64 {
    try_ks_one_sample(sample, |x| Ok(cdf(x))).expect("infallible cdf")
}

pub fn try_ks_one_sample(
    sample: &EmpiricalSample,
    cdf: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let xs = sample.sorted();
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i])?;
        d = d.max((f - i as f64 / m).abs()).max(((j + 1) as f64 / m - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// `sup_x |F_a(x) - F_b(x)|` by a merge over both sorted samples.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> f64 {
    let (xa, xb) = (a.sorted(), b.sorted());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub n_grid: Vec<u64>,
    pub distances: Vec<f64>,
    pub threshold: f64,
    pub max_increase: f64,
    /// Distances at or below this (the inflated null critical value) are
    /// treated as noise by the trend rule.
    pub noise_floor: f64,
    pub require_trend: bool,
    /// Per-n fraction of replicates where the statistic was undefined.
    pub undefined_fraction: Vec<f64>,
    pub verdict: Verdict,
}

impl ConvergenceReport {
    pub fn new(
        label: impl Into<String>,
        n_grid: Vec<u64>,
        distances: Vec<f64>,
        threshold: f64,
        noise_floor: f64,
    ) -> Self {
        let k = n_grid.len();
        let mut r = ConvergenceReport {
            label: label.into(),
            n_grid,
            distances,
            threshold,
            max_increase: MAX_INCREASE,
            noise_floor,
            require_trend: true,
            undefined_fraction: vec![0.0; k],
            verdict: Verdict::Fail,
        };
        r.verdict = r.evaluate();
        r
    }

    /// Final-only verdict, for checks where the trend is not part of the claim.
    pub fn without_trend(mut self) -> Self {
        self.require_trend = false;
        self.verdict = self.evaluate();
        self
    }

    pub fn with_max_increase(mut self, factor: f64) -> Self {
        self.max_increase = factor;
        self.verdict = self.evaluate();
        self
    }

    pub fn final_distance(&self) -> f64 {
        *self.distances.last().unwrap_or(&f64::INFINITY)
    }

    pub fn trend_ok(&self) -> bool {
        self.distances
            .windows(2)
            .all(|w| w[1] <= self.noise_floor || w[1] <= self.max_increase * w[0])
    }

    /// Recomputes the verdict from the stored fields.
    pub fn evaluate(&self) -> Verdict {
        let final_ok = self.final_distance() < self.threshold;
        Verdict::from_bool(final_ok && (!self.require_trend || self.trend_ok()))
    }
}

/// The reference a statistic is compared with.
pub enum LimitRef<'a> {
    Cdf(&'a (dyn Fn(f64) -> Result<f64> + Sync)),
    Sample(&'a EmpiricalSample),
    /// Convergence in probability to `value`: the distance is
    /// `P(|stat - value| > delta)`.
    PointMass { value: f64, delta: f64 },
}

impl LimitRef<'_> {
    pub fn distance(&self, sample: &EmpiricalSample) -> Result<f64> {
        match self {
            LimitRef::Cdf(f) => try_ks_one_sample(sample, f),
            LimitRef::Sample(b) => Ok(ks_two_sample(sample, b)),
            LimitRef::PointMass { value, delta } => {
                Ok(sample.fraction(|x| (x - value).abs() > *delta))
            }
        }
    }

    pub fn critical(&self, m: usize) -> f64 {
        match self {
            LimitRef::Cdf(_) => critical_one_sample(m),
            LimitRef::Sample(b) => critical_two_sample(m, b.len()),
            LimitRef::PointMass { .. } => 0.0,
        }
    }
}

/// `m` replicates of a scalar statistic at sample size `n`; replicate `r`
/// draws from `rng.split(r)`. Non-finite values are dropped and counted.
pub fn replicate_sample<G>(
    label: &str,
    generator: &G,
    n: u64,
    m: usize,
    rng: &RandomSource,
) -> Result<(EmpiricalSample, f64)>
where
    G: Fn(u64, &mut RandomSource) -> Result<f64> + Sync,
{
    let raw = (0..m as u64)
        .into_par_iter()
        .map(|r| generator(n, &mut rng.split(r)))
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| Error::AtSampleSize {
            n: n as usize,
            source: Box::new(e),
        })?;
    let total = raw.len();
    let values: Vec<f64> = raw.into_iter().filter(|v| v.is_finite()).collect();
    let undefined = (total - values.len()) as f64 / total.max(1) as f64;
    let sample = EmpiricalSample::new(label, values, vec![(rng.seed(), rng.stream())], Some(n))?;
    Ok((sample, undefined))
}

/// KS distance to `limit` at each n of `n_grid`, with `m` replicates per n.
/// Grid point `k` uses the stream `rng.split(k)`.
pub fn convergence_scan<G>(
    label: &str,
    generator: G,
    limit: &LimitRef,
    n_grid: &[u64],
    m: usize,
    rng: &RandomSource,
    threshold: f64,
) -> Result<ConvergenceReport>
where
    G: Fn(u64, &mut RandomSource) -> Result<f64> + Sync,
{
    convergence_scan_samples(label, generator, limit, n_grid, m, rng, threshold).map(|(r, _)| r)
}

/// [`convergence_scan`] that also hands back the sample drawn at each n.
pub fn convergence_scan_samples<G>(
    label: &str,
    generator: G,
    limit: &LimitRef,
    n_grid: &[u64],
    m: usize,
    rng: &RandomSource,
    threshold: f64,
) -> Result<(ConvergenceReport, Vec<EmpiricalSample>)>
where
    G: Fn(u64, &mut RandomSource) -> Result<f64> + Sync,
{
    check_grid(n_grid)?;
    let mut distances = Vec::with_capacity(n_grid.len());
    let mut undefined = Vec::with_capacity(n_grid.len());
    let mut samples = Vec::with_capacity(n_grid.len());
    let mut min_len = m;
    for (k, &n) in n_grid.iter().enumerate() {
        let (sample, u) = replicate_sample(label, &generator, n, m, &rng.split(k as u64))?;
        min_len = min_len.min(sample.len());
        distances.push(limit.distance(&sample)?);
        undefined.push(u);
        samples.push(sample);
    }
    let mut report = ConvergenceReport::new(
        label,
        n_grid.to_vec(),
        distances,
        threshold,
        THRESHOLD_INFLATION * limit.critical(min_len.max(1)),
    );
    report.undefined_fraction = undefined;
    Ok((report, samples))
}

fn check_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(format!(
            "n_grid must be nonempty and increasing, got {n_grid:?}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FddReport {
    pub t_set: Vec<f64>,
    pub per_t: Vec<ConvergenceReport>,
    /// KS of the increment `value(1) - value(1/2)`.
    pub increment: ConvergenceReport,
    pub verdict: Verdict,
}

fn with_increment_times(t_set: &[f64]) -> Vec<f64> {
    let mut times = t_set.to_vec();
    for t in [0.5, 1.0] {
        if !times.contains(&t) {
            times.push(t);
        }
    }
    times
}

fn path_samples(
    label: &str,
    rows: &[Vec<f64>],
    times: &[f64],
    t_count: usize,
    provenance: (u64, u64),
    n_inner: Option<u64>,
) -> Result<Vec<EmpiricalSample>> {
    let half = times.iter().position(|&t| t == 0.5).expect("added");
    let one = times.iter().position(|&t| t == 1.0).expect("added");
    let mut out = Vec::with_capacity(t_count + 1);
    for (i, t) in times.iter().take(t_count).enumerate() {
        out.push(EmpiricalSample::new(
            format!("{label}@t={t}"),
            rows.iter().map(|r| r[i]).collect(),
            vec![provenance],
            n_inner,
        )?);
    }
    out.push(EmpiricalSample::new(
        format!("{label}@increment"),
        rows.iter().map(|r| r[one] - r[half]).collect(),
        vec![provenance],
        n_inner,
    )?);
    Ok(out)
}

/// Coordinates compared by the f.d.d. checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FddCoord {
    Time(f64),
    /// `value(1) - value(1/2)`.
    Increment,
}

fn check_times(t_set: &[f64]) -> Result<()> {
    if t_set.is_empty() || t_set.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InvalidParams(format!("t_set must lie in (0, 1], got {t_set:?}")));
    }
    Ok(())
}

/// Finite-n samples per coordinate (each t, then the increment) at every n.
fn finite_n_fdd<P>(
    label: &str,
    path_generator: &P,
    times: &[f64],
    t_count: usize,
    n_grid: &[u64],
    m: usize,
    rng: &RandomSource,
) -> Result<Vec<Vec<EmpiricalSample>>>
where
    P: Fn(u64, &mut RandomSource, &[f64]) -> Result<Vec<f64>> + Sync,
{
    n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let grid_rng = rng.split(g as u64 + 1);
            let rows = (0..m as u64)
                .into_par_iter()
                .map(|r| path_generator(n, &mut grid_rng.split(r), times))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::AtSampleSize {
                    n: n as usize,
                    source: Box::new(e),
                })?;
            path_samples(
                label,
                &rows,
                times,
                t_count,
                (grid_rng.seed(), grid_rng.stream()),
                Some(n),
            )
        })
        .collect()
}

fn assemble_fdd(
    label: &str,
    t_set: &[f64],
    n_grid: &[u64],
    distances: Vec<Vec<f64>>,
    threshold: f64,
    floor: f64,
) -> FddReport {
    let mut reports: Vec<ConvergenceReport> = distances
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let name = if i < t_set.len() {
                format!("{label}@t={}", t_set[i])
            } else {
                format!("{label}@increment")
            };
            ConvergenceReport::new(name, n_grid.to_vec(), d, threshold, floor)
        })
        .collect();
    let increment = reports.pop().expect("increment report");
    let verdict = Verdict::from_bool(
        reports.iter().all(|r| r.verdict.passed()) && increment.verdict.passed(),
    );
    FddReport {
        t_set: t_set.to_vec(),
        per_t: reports,
        increment,
        verdict,
    }
}

/// Finite-dimensional check of a path statistic against a simulated limit.
///
/// `path_generator(n, rng, times)` and `limit_generator(rng, times)` return
/// the path values at `times`. The limit uses `rng.split(0)`, grid point `k`
/// uses `rng.split(k + 1)`.
#[allow(clippy::too_many_arguments)]
pub fn fdd_check<P, L>(
    label: &str,
    path_generator: P,
    limit_generator: L,
    t_set: &[f64],
    n_grid: &[u64],
    m: usize,
    rng: &RandomSource,
    threshold: f64,
) -> Result<FddReport>
where
    P: Fn(u64, &mut RandomSource, &[f64]) -> Result<Vec<f64>> + Sync,
    L: Fn(&mut RandomSource, &[f64]) -> Result<Vec<f64>> + Sync,
{
    check_grid(n_grid)?;
    check_times(t_set)?;
    let times = with_increment_times(t_set);
    let limit_rng = rng.split(0);
    let limit_rows = (0..m as u64)
        .into_par_iter()
        .map(|r| limit_generator(&mut limit_rng.split(r), &times))
        .collect::<Result<Vec<_>>>()?;
    let limits = path_samples(
        &format!("{label}/limit"),
        &limit_rows,
        &times,
        t_set.len(),
        (limit_rng.seed(), limit_rng.stream()),
        None,
    )?;
    let finite = finite_n_fdd(label, &path_generator, &times, t_set.len(), n_grid, m, rng)?;
    let mut distances = vec![Vec::with_capacity(n_grid.len()); t_set.len() + 1];
    for samples in &finite {
        for (i, s) in samples.iter().enumerate() {
            distances[i].push(ks_two_sample(s, &limits[i]));
        }
    }
    Ok(assemble_fdd(label, t_set, n_grid, distances, threshold, THRESHOLD_INFLATION * critical_two_sample(m, m)))
}

/// [`fdd_check`] against known marginal CDFs, `cdf(coord, x)`.
#[allow(clippy::too_many_arguments)]
pub fn fdd_check_cdf<P, F>(
    label: &str,
    path_generator: P,
    cdf: F,
    t_set: &[f64],
    n_grid: &[u64],
    m: usize,
    rng: &RandomSource,
    threshold: f64,
) -> Result<FddReport>
where
    P: Fn(u64, &mut RandomSource, &[f64]) -> Result<Vec<f64>> + Sync,
    F: Fn(FddCoord, f64) -> f64,
{
    check_grid(n_grid)?;
    check_times(t_set)?;
    let times = with_increment_times(t_set);
    let finite = finite_n_fdd(label, &path_generator, &times, t_set.len(), n_grid, m, rng)?;
    let mut distances = vec![Vec::with_capacity(n_grid.len()); t_set.len() + 1];
    for samples in &finite {
        for (i, s) in samples.iter().enumerate() {
            let coord = if i < t_set.len() {
                FddCoord::Time(t_set[i])
            } else {
                FddCoord::Increment
            };
            distances[i].push(ks_one_sample(s, |x| cdf(coord, x)));
        }
    }
    Ok(assemble_fdd(label, t_set, n_grid, distances, threshold, THRESHOLD_INFLATION * critical_one_sample(m)))
}
