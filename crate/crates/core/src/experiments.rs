//! Config-driven experiments. Each one binds a catalog model, the norming
//! constants, the finite-n statistics and the simulated limit into a report.
//!
//! Randomness: experiment `e` of a config draws from
//! `RandomSource::derive(seed, &[e])`; its `c`-th check uses `split(c)`, and
//! below that the scan functions in [`crate::stats`] split by grid point and
//! replicate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::{self, LimitConfig, LimitSpec};
use crate::models::{sample_iid, sample_iid_rescaled, DistributionModel, Law};
use crate::norming::{compute_an, compute_bn, feller_gamma, km_ratio};
use crate::rng::RandomSource;
use crate::selfnorm::{max_ratios, self_normalized_sum, sn_path, student_process};
use crate::stable::{cauchy_cdf, normal_cdf, StableCdf, StableParams};
use crate::stats::{
    convergence_scan_samples, fdd_check, fdd_check_cdf, ks_two_sample, ConvergenceReport,
    EmpiricalSample, FddCoord, FddReport, LimitRef, Verdict,
};

/// Default thresholds, keyed as in the `thresholds` table of a config.
pub mod thresholds {
    /// α = 2 marginals against the normal CDF.
    pub const BROWNIAN: f64 = 0.025;
    /// Two-sample f.d.d. checks, `1.5 * 1.36 * sqrt(2/5000)` rounded up.
    pub const FDD: f64 = 0.04;
    /// Simulated `X(1)` against direct stable draws at `M = 2e4`.
    pub const LEVY_MARGINAL: f64 = 0.0204;
    pub const TRIPLE: f64 = 0.04;
    pub const MAX_RATIO: f64 = 0.04;
    pub const LEMMA: f64 = 0.03;
    /// `P(||S_n/V_n| - 1| > 0.1)` at the largest n.
    pub const DEGENERATE: f64 = 0.1;
    pub const STUDENT_CROSS: f64 = 0.03;
    /// In-probability checks (`P(stat > δ)` when the limit is a point mass).
    pub const IN_PROBABILITY: f64 = 0.01;
}

/// Half-width of the band around ±1 in the degenerate check.
pub const DEGENERATE_BAND: f64 = 0.1;
/// The δ values of the α = 2 max-ratio check.
pub const MAX_RATIO_DELTAS: [f64; 2] = [0.1, 0.05];
pub const KM_GRID: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];
pub const DEFAULT_DRAW_BUDGET: f64 = 1e10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TheoremMain,
    Student,
    TripleRaikov,
    MaxRatios,
    LemmaScalar,
    Degenerate,
    KmDiagnostic,
}

impl ExperimentKind {
    fn default_replicates(self) -> usize {
        match self {
            ExperimentKind::TheoremMain | ExperimentKind::Student => 5_000,
            _ => 20_000,
        }
    }
}

fn default_n_grid() -> Vec<u64> {
    vec![100, 1_000, 10_000]
}
fn default_epsilon() -> f64 {
    levy::DEFAULT_EPSILON
}
fn default_seed() -> u64 {
    1
}
fn default_t_set() -> Vec<f64> {
    vec![0.25, 0.5, 0.75, 1.0]
}
fn default_grid_size() -> usize {
    levy::DEFAULT_GRID
}
fn default_budget() -> f64 {
    DEFAULT_DRAW_BUDGET
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub model: String,
    /// Optional cross-check against the model's index.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub replicates: Option<usize>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default = "default_t_set")]
    pub t_set: Vec<f64>,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    /// Cap on `replicates * max(n_grid)` scalar draws.
    #[serde(default = "default_budget")]
    pub draw_budget: f64,
    /// Student runs: a second model whose `S_n/V_n` is compared with the
    /// Student statistic at the largest n.
    #[serde(default)]
    pub cross_model: Option<String>,
}

impl ExperimentConfig {
    pub fn new(name: &str, kind: ExperimentKind, model: &str) -> Self {
        ExperimentConfig {
            name: name.into(),
            kind,
            model: model.into(),
            alpha: None,
            n_grid: default_n_grid(),
            replicates: None,
            epsilon: default_epsilon(),
            seed: default_seed(),
            thresholds: BTreeMap::new(),
            output: None,
            t_set: default_t_set(),
            grid_size: default_grid_size(),
            draw_budget: default_budget(),
            cross_model: None,
        }
    }

    pub fn replicates(&self) -> usize {
        self.replicates.unwrap_or_else(|| self.kind.default_replicates())
    }

    pub fn threshold(&self, key: &str, default: f64) -> f64 {
        self.thresholds.get(key).copied().unwrap_or(default)
    }

    fn n_max(&self) -> u64 {
        *self.n_grid.last().expect("validated")
    }

    /// Field-level checks that do not need the model.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::config("name", "must be nonempty"));
        }
        if self.kind != ExperimentKind::KmDiagnostic {
            if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config("n_grid", "must be nonempty and strictly increasing"));
            }
            if self.n_grid[0] == 0 {
                return Err(Error::config("n_grid", "sample sizes must be positive"));
            }
        }
        if self.replicates() < 1 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::config("epsilon", "must lie in (0, 1]"));
        }
        if self.grid_size < 100 {
            return Err(Error::config("grid_size", "must be at least 100"));
        }
        if self.t_set.is_empty() || self.t_set.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::config("t_set", "times must lie in (0, 1]"));
        }
        for (k, v) in &self.thresholds {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::config(format!("thresholds.{k}"), "must be positive"));
            }
        }
        if self.kind != ExperimentKind::KmDiagnostic {
            let draws = self.replicates() as f64 * self.n_max() as f64;
            if draws > self.draw_budget {
                return Err(Error::config(
                    "replicates",
                    format!(
                        "replicates * max(n_grid) = {draws:.3e} exceeds draw_budget {:.3e}",
                        self.draw_budget
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn resolve_model(&self) -> Result<DistributionModel> {
        let model = DistributionModel::lookup(&self.model).map_err(|e| match e {
            Error::UnknownModel(m) => Error::config("model", format!("unknown model `{m}`")),
            e => Error::config("model", e.to_string()),
        })?;
        if let Some(alpha) = self.alpha {
            if model.alpha_attractor().map_or(true, |a| (a - alpha).abs() > 1e-12) {
                return Err(Error::config(
                    "alpha",
                    format!("{alpha} does not match the index of {}", model.name()),
                ));
            }
        }
        Ok(model)
    }
}

/// A config file: a list of `[[experiment]]` blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Vec<ExperimentConfig>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: toml::Value = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: toml::Value) -> Result<Self> {
        let cfg: ConfigFile = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("experiment", e.message().to_string()))?;
        if cfg.experiment.is_empty() {
            return Err(Error::config("experiment", "no experiment blocks"));
        }
        for e in &cfg.experiment {
            e.validate().map_err(|err| match err {
                Error::Config { field, message } => {
                    Error::config(format!("experiment `{}`.{field}", e.name), message)
                }
                other => other,
            })?;
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub check: String,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmRow {
    pub x: f64,
    pub ratio: f64,
}

/// Report written for each experiment. `distances`, `threshold` and
/// `verdict` summarize the first check; `verdict` covers all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub kind: ExperimentKind,
    pub model: String,
    pub alpha: f64,
    pub n_grid: Vec<u64>,
    pub replicates: usize,
    pub distances: Vec<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
    pub seeds: Vec<SeedRecord>,
    pub checks: Vec<ConvergenceReport>,
    /// Logged scalars: norming constants, centering, undefined fractions.
    pub notes: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub table: Vec<KmRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub remarks: Vec<String>,
}

/// A report plus the raw samples (largest n and limit) for `--dump`.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub samples: Vec<EmpiricalSample>,
}

struct Builder<'a> {
    config: &'a ExperimentConfig,
    model: &'a DistributionModel,
    alpha: f64,
    rng: RandomSource,
    checks: Vec<ConvergenceReport>,
    seeds: Vec<SeedRecord>,
    notes: BTreeMap<String, f64>,
    samples: Vec<EmpiricalSample>,
    table: Vec<KmRow>,
    remarks: Vec<String>,
}

impl<'a> Builder<'a> {
    fn new(
        config: &'a ExperimentConfig,
        model: &'a DistributionModel,
        alpha: f64,
        rng: RandomSource,
    ) -> Self {
        Builder {
            config,
            model,
            alpha,
            rng,
            checks: Vec::new(),
            seeds: Vec::new(),
            notes: BTreeMap::new(),
            samples: Vec::new(),
            table: Vec::new(),
            remarks: Vec::new(),
        }
    }

    /// Stream for the next check, recorded under `name`.
    fn stream(&mut self, name: &str) -> RandomSource {
        let r = self.rng.split(self.seeds.len() as u64);
        self.seeds.push(SeedRecord {
            check: name.into(),
            seed: r.seed(),
            stream: r.stream(),
        });
        r
    }

    fn push_fdd(&mut self, fdd: FddReport) {
        self.checks.extend(fdd.per_t);
        self.checks.push(fdd.increment);
    }

    fn push_scan(&mut self, report: ConvergenceReport, samples: Vec<EmpiricalSample>) {
        if let Some(last) = samples.into_iter().last() {
            self.samples.push(last);
        }
        self.checks.push(report);
    }

    fn finish(self) -> ExperimentOutput {
        let first = self.checks.first();
        let verdict = Verdict::from_bool(self.checks.iter().all(|c| c.verdict.passed()));
        let report = ExperimentReport {
            experiment: self.config.name.clone(),
            kind: self.config.kind,
            model: self.model.name().to_string(),
            alpha: self.alpha,
            n_grid: self.config.n_grid.clone(),
            replicates: self.config.replicates(),
            distances: first.map(|c| c.distances.clone()).unwrap_or_default(),
            threshold: first.map_or(0.0, |c| c.threshold),
            verdict,
            seeds: self.seeds,
            checks: self.checks,
            notes: self.notes,
            table: self.table,
            remarks: self.remarks,
        };
        ExperimentOutput {
            report,
            samples: self.samples,
        }
    }
}

/// `n` draws; slowly varying tails are drawn on a common rescaled grid so
/// they stay finite (self-normalized statistics ignore the scale).
pub fn draw(model: &DistributionModel, n: usize, rng: &mut RandomSource) -> Vec<f64> {
    match model.law() {
        Law::SlowVar => sample_iid_rescaled(model, n, rng),
        _ => sample_iid(model, n, rng),
    }
}

fn limit_spec(model: &DistributionModel, alpha: f64) -> Result<LimitSpec> {
    LimitSpec::unit(alpha, model.p_balance())
}

/// γ′ of the limit: `lim n E sin(X/a_n)` for α = 1, estimated at `n`.
fn gamma_prime(model: &DistributionModel, alpha: f64, n: u64) -> Result<f64> {
    if alpha == 1.0 {
        feller_gamma(model, n)
    } else {
        Ok(0.0)
    }
}

fn limit_config(
    config: &ExperimentConfig,
    model: &DistributionModel,
    alpha: f64,
    gamma: f64,
) -> Result<LimitConfig> {
    Ok(LimitConfig {
        spec: limit_spec(model, alpha)?,
        gamma_prime: gamma,
        epsilon: config.epsilon,
        grid_size: config.grid_size,
    })
}

fn brownian_cdf(coord: FddCoord, x: f64) -> f64 {
    let var = match coord {
        FddCoord::Time(t) => t,
        FddCoord::Increment => 0.5,
    };
    normal_cdf(x / var.sqrt())
}

/// Shared harness of the functional checks: a path statistic against
/// `X(t)/sqrt([X]_1)` at `t_set`.
fn functional_checks<P>(
    b: &mut Builder,
    label: &str,
    path_stat: P,
    gamma: f64,
) -> Result<()>
where
    P: Fn(u64, &mut RandomSource, &[f64]) -> Result<Vec<f64>> + Sync,
{
    let cfg = b.config;
    let m = cfg.replicates();
    let rng = b.stream(label);
    let fdd = if b.alpha == 2.0 {
        let thr = cfg.threshold("final", thresholds::BROWNIAN);
        fdd_check_cdf(label, path_stat, brownian_cdf, &cfg.t_set, &cfg.n_grid, m, &rng, thr)?
    } else {
        let thr = cfg.threshold("final", thresholds::FDD);
        let lc = limit_config(cfg, b.model, b.alpha, gamma)?;
        let limit = |r: &mut RandomSource, times: &[f64]| {
            Ok(levy::self_normalized_at(&lc.simulate(r)?, times))
        };
        fdd_check(label, path_stat, limit, &cfg.t_set, &cfg.n_grid, m, &rng, thr)?
    };
    b.push_fdd(fdd);
    Ok(())
}

/// `S_{⌊nt⌋}/V_n ⇒ X(t)/sqrt([X]_1)` on f.d.d. marginals.
pub fn exp_theorem_main(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_theorem_main_at(config, 0)
}

fn exp_theorem_main_at(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = model.check_functional_hypotheses()?;
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[index]));
    let gamma = gamma_prime(&model, alpha, config.n_max())?;
    b.notes.insert("gamma_prime".into(), gamma);
    let path_stat = |n: u64, r: &mut RandomSource, times: &[f64]| {
        Ok(sn_path(&draw(&model, n as usize, r), times).values)
    };
    functional_checks(&mut b, "S_[nt]/V_n", path_stat, gamma)?;
    Ok(b.finish())
}

/// The Student process `T_{n,t}(X - μ)` against the same limit.
pub fn exp_student(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_student_at(config, 0)
}

fn exp_student_at(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = match model.alpha_attractor() {
        Some(a) if a > 1.0 => a,
        _ => {
            return Err(Error::Hypothesis(format!(
                "{}: the Student statistic requires alpha in (1, 2]",
                model.name()
            )))
        }
    };
    let mu = model.mean().ok_or_else(|| {
        Error::Hypothesis(format!("{}: the Student statistic requires a finite mean", model.name()))
    })?;
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[index]));
    b.notes.insert("mu".into(), mu);
    let path_stat = |n: u64, r: &mut RandomSource, times: &[f64]| {
        let xs = draw(&model, n as usize, r);
        times.iter().map(|&t| student_process(&xs, mu, t)).collect()
    };
    functional_checks(&mut b, "T_n,t", path_stat, 0.0)?;

    if let Some(cross) = &config.cross_model {
        let other = DistributionModel::lookup(cross)
            .map_err(|e| Error::config("cross_model", e.to_string()))?;
        other.check_functional_hypotheses()?;
        let n = config.n_max();
        let m = config.replicates();
        let rng = b.stream("cross");
        let student = replicate(&rng.split(0), m, |r| student_process(&draw(&model, n as usize, r), mu, 1.0))?;
        let centered = replicate(&rng.split(1), m, |r| Ok(self_normalized_sum(&draw(&other, n as usize, r))))?;
        let d = ks_two_sample(
            &EmpiricalSample::from_values("T_n", student)?,
            &EmpiricalSample::from_values("S_n/V_n", centered)?,
        );
        let thr = config.threshold("cross", thresholds::STUDENT_CROSS);
        b.checks.push(
            ConvergenceReport::new(format!("T_n vs S_n/V_n of {}", other.name()), vec![n], vec![d], thr, 0.0)
                .without_trend(),
        );
    }
    Ok(b.finish())
}

fn replicate<F>(rng: &RandomSource, m: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut RandomSource) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    (0..m as u64).into_par_iter().map(|r| f(&mut rng.split(r))).collect()
}

/// Norming constants for every n of the grid, logged as notes.
fn norming_table(b: &mut Builder) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    for &n in &b.config.n_grid {
        let a = compute_an(b.model, n)?;
        b.notes.insert(format!("a_n[{n}]"), a);
        out.insert(n, a);
    }
    Ok(out)
}

/// One scalar statistic against either a sample or a point mass.
fn scalar_check<G>(b: &mut Builder, label: &str, gen: G, limit: &LimitRef, threshold: f64) -> Result<()>
where
    G: Fn(u64, &mut RandomSource) -> Result<f64> + Sync,
{
    let cfg = b.config;
    let rng = b.stream(label);
    let (report, samples) =
        convergence_scan_samples(label, gen, limit, &cfg.n_grid, cfg.replicates(), &rng, threshold)?;
    let n = cfg.n_grid.len();
    if let Some(u) = report.undefined_fraction.get(n - 1) {
        if *u > 0.0 {
            b.notes.insert(format!("undefined_fraction[{label}]"), *u);
        }
    }
    b.push_scan(report, samples);
    Ok(())
}

/// `(S_n/a_n, V_n^2/a_n^2, max|X_i|/a_n)` against `(X(1), [X]_1, J)`, plus
/// `S_n/V_n` against `X(1)/sqrt([X]_1)`.
pub fn exp_triple_raikov(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_triple_raikov_scaled(config, 0, 1.0)
}

/// [`exp_triple_raikov`] with `a_n` multiplied by `scale` (negative control).
pub fn exp_triple_raikov_scaled(
    config: &ExperimentConfig,
    index: u64,
    scale: f64,
) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = model.check_functional_hypotheses()?;
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[index]));
    let a_n = norming_table(&mut b)?;
    let a_of = |n: u64| scale * a_n[&n];
    let thr = config.threshold("final", thresholds::TRIPLE);
    let m = config.replicates();
    let model = &model;
    let xs_of = |n: u64, r: &mut RandomSource| draw(model, n as usize, r);

    if alpha == 2.0 {
        let cdf = |x: f64| Ok(normal_cdf(x));
        scalar_check(&mut b, "S_n/a_n", |n, r| Ok(xs_of(n, r).iter().sum::<f64>() / a_of(n)), &LimitRef::Cdf(&cdf), thr)?;
        let v2 = |n: u64, r: &mut RandomSource| Ok(xs_of(n, r).iter().map(|x| x * x).sum::<f64>() / a_of(n).powi(2));
        let thr_p = config.threshold("in_probability", thresholds::IN_PROBABILITY);
        scalar_check(&mut b, "V_n^2/a_n^2", v2, &LimitRef::PointMass { value: 1.0, delta: 0.05 }, thr_p)?;
        let mx = |n: u64, r: &mut RandomSource| Ok(xs_of(n, r).iter().map(|x| x.abs()).fold(0.0, f64::max) / a_of(n));
        scalar_check(&mut b, "max/a_n", mx, &LimitRef::PointMass { value: 0.0, delta: 0.05 }, thr_p)?;
        scalar_check(&mut b, "S_n/V_n", |n, r| Ok(self_normalized_sum(&xs_of(n, r))), &LimitRef::Cdf(&cdf), thr)?;
        return Ok(b.finish());
    }

    let lc = limit_config(config, model, alpha, gamma_prime(model, alpha, config.n_max())?)?;
    let lim_rng = b.stream("limit");
    let limit = levy::limit_statistic_sample(&lc, m, &lim_rng)?;
    let (x1, qv, jump, ratio) = (
        limit.x1_sample()?,
        limit.qv_sample()?,
        limit.jump_sample()?,
        limit.self_normalized()?,
    );
    scalar_check(&mut b, "S_n/a_n", |n, r| Ok(xs_of(n, r).iter().sum::<f64>() / a_of(n)), &LimitRef::Sample(&x1), thr)?;
    scalar_check(
        &mut b,
        "V_n^2/a_n^2",
        |n, r| Ok(xs_of(n, r).iter().map(|x| x * x).sum::<f64>() / a_of(n).powi(2)),
        &LimitRef::Sample(&qv),
        thr,
    )?;
    scalar_check(
        &mut b,
        "max/a_n",
        |n, r| Ok(xs_of(n, r).iter().map(|x| x.abs()).fold(0.0, f64::max) / a_of(n)),
        &LimitRef::Sample(&jump),
        thr,
    )?;
    scalar_check(&mut b, "S_n/V_n", |n, r| Ok(self_normalized_sum(&xs_of(n, r))), &LimitRef::Sample(&ratio), thr)?;
    b.samples.extend([x1, qv, jump, ratio]);
    Ok(b.finish())
}

/// `max|X_i|/V_n ⇒ J/sqrt([X]_1)` and `max|X_i|/S_n ⇒ J/X(1)`; for α = 2
/// the ratios go to 0 in probability.
pub fn exp_max_ratios(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_max_ratios_at(config, 0)
}

fn exp_max_ratios_at(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = model.check_functional_hypotheses()?;
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[index]));
    let model = &model;
    let over_v = |n: u64, r: &mut RandomSource| Ok(max_ratios(&draw(model, n as usize, r)).1);
    let over_s = |n: u64, r: &mut RandomSource| {
        Ok(max_ratios(&draw(model, n as usize, r)).0.unwrap_or(f64::NAN))
    };

    if alpha == 2.0 {
        let thr = config.threshold("in_probability", thresholds::IN_PROBABILITY);
        for delta in MAX_RATIO_DELTAS {
            // |max/V_n| <= 1, so P(max/V_n > δ) is the point-mass distance at 0
            let limit = LimitRef::PointMass { value: 0.0, delta };
            scalar_check(&mut b, &format!("P(max/V_n > {delta})"), over_v, &limit, thr)?;
        }
        return Ok(b.finish());
    }

    let thr = config.threshold("final", thresholds::MAX_RATIO);
    let lc = limit_config(config, model, alpha, gamma_prime(model, alpha, config.n_max())?)?;
    let lim_rng = b.stream("limit");
    let limit = levy::limit_statistic_sample(&lc, config.replicates(), &lim_rng)?;
    let j_over_qv = limit.jump_over_root_qv()?;
    let j_over_x = limit.jump_over_x1()?;
    scalar_check(&mut b, "max/V_n", over_v, &LimitRef::Sample(&j_over_qv), thr)?;
    scalar_check(&mut b, "max/S_n", over_s, &LimitRef::Sample(&j_over_x), thr)?;
    b.samples.extend([j_over_qv, j_over_x]);
    Ok(b.finish())
}

/// The stable limit law of the centered `S_n/a_n - b_n`.
pub fn scalar_limit_cdf(model: &DistributionModel) -> Result<Box<dyn Fn(f64) -> Result<f64> + Sync>> {
    let alpha = model.alpha_attractor().ok_or_else(|| {
        Error::Hypothesis(format!("{}: not in a stable domain of attraction", model.name()))
    })?;
    let p = model.p_balance();
    if alpha == 2.0 {
        return Ok(Box::new(|x| Ok(normal_cdf(x))));
    }
    if alpha == 1.0 && p == 0.5 {
        // S(1, 0, 1, 1/2, 1/2) is Cauchy with scale π/2
        return Ok(Box::new(|x| Ok(cauchy_cdf(x, 0.0, std::f64::consts::FRAC_PI_2))));
    }
    let cdf = StableCdf::new(&StableParams::unit(alpha, 0.0, p)?)?;
    Ok(Box::new(move |x| cdf.cdf(x)))
}

/// `S_n/a_n - b_n` against `S(α, 0, 1, p, q)`.
pub fn exp_lemma_scalar(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_lemma_scalar_at(config, 0)
}

fn exp_lemma_scalar_at(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = model.check_functional_hypotheses()?;
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[index]));
    let a_n = norming_table(&mut b)?;
    let mut b_n = BTreeMap::new();
    for &n in &config.n_grid {
        let c = compute_bn(&model, n)?;
        b.notes.insert(format!("b_n[{n}]"), c);
        b_n.insert(n, c);
    }
    let cdf = scalar_limit_cdf(&model)?;
    let model = &model;
    let gen = |n: u64, r: &mut RandomSource| {
        Ok(draw(model, n as usize, r).iter().sum::<f64>() / a_n[&n] - b_n[&n])
    };
    let thr = config.threshold("final", thresholds::LEMMA);
    scalar_check(&mut b, "S_n/a_n - b_n", gen, &LimitRef::Cdf(cdf.as_ref()), thr)?;
    Ok(b.finish())
}

/// `P(||S_n/V_n| - 1| > 0.1)` along the grid; must decrease and end below
/// the threshold. Only slowly varying tails are accepted.
pub fn exp_degenerate(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp_degenerate_at(config, 0)
}

fn exp_degenerate_at(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    if model.law() != Law::SlowVar {
        return Err(Error::Hypothesis(format!(
            "{}: the degenerate limit needs a slowly varying P(|X| > x)",
            model.name()
        )));
    }
    degenerate_scan(config, &model, index)
}

/// The degenerate-limit scan without the model gate, e.g. for negative
/// controls on models whose `S_n/V_n` has a continuous limit.
pub fn degenerate_scan(
    config: &ExperimentConfig,
    model: &DistributionModel,
    index: u64,
) -> Result<ExperimentOutput> {
    let mut b = Builder::new(
        config,
        model,
        model.alpha_attractor().unwrap_or(0.0),
        RandomSource::derive(config.seed, &[index]),
    );
    let gen = |n: u64, r: &mut RandomSource| Ok(self_normalized_sum(&draw(model, n as usize, r)).abs());
    let thr = config.threshold("final", thresholds::DEGENERATE);
    let limit = LimitRef::PointMass { value: 1.0, delta: DEGENERATE_BAND };
    let rng = b.stream("|S_n/V_n|");
    let (report, samples) = convergence_scan_samples(
        "|S_n/V_n|",
        gen,
        &limit,
        &config.n_grid,
        config.replicates(),
        &rng,
        thr,
    )?;
    b.push_scan(report.with_max_increase(1.0), samples);
    Ok(b.finish())
}

/// Kesten–Maller ratio table over [`KM_GRID`].
pub fn exp_km_diagnostic(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let model = config.resolve_model()?;
    let alpha = model.alpha_attractor().unwrap_or(0.0);
    let mut b = Builder::new(config, &model, alpha, RandomSource::derive(config.seed, &[0]));
    for x in KM_GRID {
        match km_ratio(&model, x) {
            Ok(ratio) => b.table.push(KmRow { x, ratio }),
            Err(Error::DivisionDomain(msg)) => {
                b.remarks.push(format!("excluded: bounded support ({msg})"));
                b.table.clear();
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if b.table.len() > 1 {
        let growing = b.table.windows(2).all(|w| w[1].ratio > w[0].ratio);
        b.notes.insert("monotone_growth".into(), if growing { 1.0 } else { 0.0 });
    }
    Ok(b.finish())
}

/// Runs experiment number `index` of a config file.
pub fn run_experiment(config: &ExperimentConfig, index: u64) -> Result<ExperimentOutput> {
    config.validate()?;
    match config.kind {
        ExperimentKind::TheoremMain => exp_theorem_main_at(config, index),
        ExperimentKind::Student => exp_student_at(config, index),
        ExperimentKind::TripleRaikov => exp_triple_raikov_scaled(config, index, 1.0),
        ExperimentKind::MaxRatios => exp_max_ratios_at(config, index),
        ExperimentKind::LemmaScalar => exp_lemma_scalar_at(config, index),
        ExperimentKind::Degenerate => exp_degenerate_at(config, index),
        ExperimentKind::KmDiagnostic => exp_km_diagnostic(config),
    }
}
