//! Simulation of the α-stable Lévy limit on [0, 1].
//!
//! Paths are built from the Lévy–Itô decomposition: a drift, a compound
//! Poisson part carrying every jump with `|x| > ε`, and for the jumps below
//! `ε` either a Gaussian substitute with the same variance (when
//! `σ(ε)/ε >= 10`) or nothing, keeping only their compensator in the drift.
//! The Lévy measure is `ν(dx) = C α (p 1{x>0} + q 1{x<0}) |x|^{-α-1} dx`.

use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::stable::StableParams;
use crate::stats::EmpiricalSample;

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Small jumps are replaced by a Gaussian when `σ(ε)/ε` reaches this.
pub const GAUSSIAN_SUBSTITUTE_RATIO: f64 = 10.0;
pub const MAX_EXPECTED_JUMPS: f64 = 1e7;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevyMeasureSpec {
    pub alpha: f64,
    pub p: f64,
    pub scale_const: f64,
}

impl LevyMeasureSpec {
    pub fn new(alpha: f64, p: f64, scale_const: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || !(0.0..=1.0).contains(&p) || !(scale_const > 0.0) {
            return Err(Error::InvalidParams(format!(
                "Lévy measure needs alpha in (0,2), p in [0,1], C > 0; got ({alpha}, {p}, {scale_const})"
            )));
        }
        Ok(LevyMeasureSpec { alpha, p, scale_const })
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }

    /// `ν({|x| > ε})`.
    pub fn tail_mass(&self, epsilon: f64) -> f64 {
        self.scale_const * epsilon.powf(-self.alpha)
    }

    /// `∫_{|x|<ε} x^2 ν(dx)`.
    pub fn small_jump_variance(&self, epsilon: f64) -> f64 {
        self.scale_const * self.alpha * epsilon.powf(2.0 - self.alpha) / (2.0 - self.alpha)
    }

    /// Drift of the truncated representation at level `ε`, so that the
    /// path's time-1 marginal is `S(α, γ', C α/(2-α), p, q)`.
    ///
    /// For α ≠ 1 this is the mean of the uncompensated jumps below `ε`
    /// (α < 1) or minus the mean of the jumps above `ε` (α > 1); both are
    /// `(p-q) C α ε^{1-α} / (1-α)`. For α = 1 the Lévy–Khintchine integral
    /// with truncation at 1 carries `i (p-q) C (1 - γ_E) t`, removed here.
    pub fn drift(&self, epsilon: f64, gamma_prime: f64) -> f64 {
        let skew = self.p - self.q();
        let c = self.scale_const;
        if self.alpha == 1.0 {
            gamma_prime - skew * c * (1.0 - EULER_GAMMA) + skew * c * epsilon.ln()
        } else {
            gamma_prime + skew * c * self.alpha * epsilon.powf(1.0 - self.alpha) / (1.0 - self.alpha)
        }
    }

    fn jump_size(&self, epsilon: f64, rng: &mut RandomSource) -> f64 {
        let r = epsilon * rng.open01().powf(-1.0 / self.alpha);
        if rng.uniform() < self.p {
            r
        } else {
            -r
        }
    }
}

/// Lévy measure whose Lévy–Khintchine exponent is the `S(α, ·, c, p, q)`
/// log-characteristic function: `C = c (2-α)/α`.
///
/// For `p = 1` and `1 < α < 2`,
/// `∫_0^∞ (e^{itx} - 1 - itx) C α x^{-α-1} dx = C α Γ(-α) |t|^α e^{-iπα sgn(t)/2}`
/// and `α Γ(-α) (2-α)/α = Γ(3-α)/(α(α-1))`, which is the law's coefficient;
/// the other ranges of α work out the same way.
pub fn levy_measure_for(params: &StableParams) -> Result<LevyMeasureSpec> {
    if params.alpha == 2.0 {
        return Err(Error::InvalidParams(
            "alpha = 2 is Gaussian and has no jump measure".into(),
        ));
    }
    LevyMeasureSpec::new(
        params.alpha,
        params.p,
        params.c * (2.0 - params.alpha) / params.alpha,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum LimitSpec {
    /// Standard Brownian motion: `X(1) ~ N(0, 1)`, `[X]_1 = 1`.
    Gaussian,
    Stable(LevyMeasureSpec),
}

impl LimitSpec {
    /// The limit process with `X(1) ~ S(α, ·, 1, p, 1-p)`.
    pub fn unit(alpha: f64, p: f64) -> Result<Self> {
        if alpha == 2.0 {
            Ok(LimitSpec::Gaussian)
        } else {
            Ok(LimitSpec::Stable(levy_measure_for(&StableParams::unit(alpha, 0.0, p)?)?))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Jump {
    pub time: f64,
    pub size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevyPath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub jumps: Vec<Jump>,
    pub sigma: f64,
    pub small_jump_sigma: f64,
}

impl LevyPath {
    /// Value at the last grid point not after `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let steps = (self.grid.len() - 1) as f64;
        let k = ((t * steps + 1e-9).floor() as usize).min(self.grid.len() - 1);
        self.values[k]
    }

    pub fn endpoint(&self) -> f64 {
        *self.values.last().expect("grid is nonempty")
    }
}

/// Drift, diffusion scales and sorted jumps of one path.
fn components(
    spec: &LimitSpec,
    gamma_prime: f64,
    epsilon: f64,
    rng: &mut RandomSource,
) -> Result<(f64, f64, f64, Vec<Jump>)> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParams(format!("epsilon = {epsilon} outside (0, 1]")));
    }
    let out = match spec {
        LimitSpec::Gaussian => (gamma_prime, 1.0, 0.0, Vec::new()),
        LimitSpec::Stable(nu) => {
            let rate = nu.tail_mass(epsilon);
            if rate > MAX_EXPECTED_JUMPS {
                return Err(Error::ResourceLimit(format!(
                    "epsilon = {epsilon} gives {rate:.3e} expected jumps"
                )));
            }
            let count = Poisson::new(rate)
                .map_err(|e| Error::InvalidParams(e.to_string()))?
                .sample(rng) as usize;
            let mut jumps: Vec<Jump> = (0..count)
                .map(|_| {
                    let time = 1.0 - rng.uniform();
                    let size = nu.jump_size(epsilon, rng);
                    Jump { time, size }
                })
                .collect();
            jumps.sort_by(|a, b| a.time.total_cmp(&b.time));
            let small_sd = nu.small_jump_variance(epsilon).sqrt();
            let small = if small_sd / epsilon >= GAUSSIAN_SUBSTITUTE_RATIO {
                small_sd
            } else {
                0.0
            };
            (nu.drift(epsilon, gamma_prime), 0.0, small, jumps)
        }
    };
    Ok(out)
}

/// `(X(1), [X]_1, J)` without building the grid: the Brownian part at time 1
/// is a single normal draw.
pub fn simulate_endpoint(
    spec: &LimitSpec,
    gamma_prime: f64,
    epsilon: f64,
    rng: &mut RandomSource,
) -> Result<(f64, f64, f64)> {
    let (drift, sigma, small, jumps) = components(spec, gamma_prime, epsilon, rng)?;
    let diffusion2 = sigma * sigma + small * small;
    let z: f64 = if diffusion2 > 0.0 { StandardNormal.sample(rng) } else { 0.0 };
    let x1 = drift + diffusion2.sqrt() * z + jumps.iter().map(|j| j.size).sum::<f64>();
    let qv = diffusion2 + jumps.iter().map(|j| j.size * j.size).sum::<f64>();
    let big = jumps.iter().map(|j| j.size.abs()).fold(0.0, f64::max);
    Ok((x1, qv, big))
}

pub fn simulate_path(
    spec: &LimitSpec,
    gamma_prime: f64,
    epsilon: f64,
    grid_size: usize,
    rng: &mut RandomSource,
) -> Result<LevyPath> {
    if grid_size < 100 {
        return Err(Error::InvalidParams(format!("grid_size = {grid_size} below 100")));
    }
    let (drift, sigma, small_jump_sigma, jumps) = components(spec, gamma_prime, epsilon, rng)?;
    let grid: Vec<f64> = (0..=grid_size).map(|k| k as f64 / grid_size as f64).collect();

    let diffusion = (sigma * sigma + small_jump_sigma * small_jump_sigma).sqrt();
    let dt_sd = (1.0 / grid_size as f64).sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut brownian = 0.0;
    let mut jump_sum = 0.0;
    let mut next = 0;
    for (k, &t) in grid.iter().enumerate() {
        if k > 0 && diffusion > 0.0 {
            let z: f64 = StandardNormal.sample(rng);
            brownian += dt_sd * z;
        }
        while next < jumps.len() && jumps[next].time <= t {
            jump_sum += jumps[next].size;
            next += 1;
        }
        values.push(drift * t + diffusion * brownian + jump_sum);
    }
    // X(0) = 0 regardless of jumps drawn at the right end of the grid.
    values[0] = 0.0;

    Ok(LevyPath {
        grid,
        values,
        jumps,
        sigma,
        small_jump_sigma,
    })
}

/// `[X]_1 = σ^2 + Σ β_j^2`, with the Gaussian substitute counted as diffusion.
pub fn quadratic_variation(path: &LevyPath) -> f64 {
    path.sigma * path.sigma
        + path.jumps.iter().map(|j| j.size * j.size).sum::<f64>()
        + path.small_jump_sigma * path.small_jump_sigma
}

pub fn biggest_jump(path: &LevyPath) -> f64 {
    path.jumps.iter().map(|j| j.size.abs()).fold(0.0, f64::max)
}

/// Simulation settings shared by the limit samplers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitConfig {
    pub spec: LimitSpec,
    pub gamma_prime: f64,
    pub epsilon: f64,
    pub grid_size: usize,
}

impl LimitConfig {
    pub fn new(spec: LimitSpec) -> Self {
        LimitConfig {
            spec,
            gamma_prime: 0.0,
            epsilon: DEFAULT_EPSILON,
            grid_size: DEFAULT_GRID,
        }
    }

    pub fn simulate(&self, rng: &mut RandomSource) -> Result<LevyPath> {
        simulate_path(&self.spec, self.gamma_prime, self.epsilon, self.grid_size, rng)
    }
}

/// `M` replicates of `(X(1), [X]_1, J)`, from [`simulate_endpoint`].
#[derive(Clone, Debug)]
pub struct LimitSample {
    pub x1: Vec<f64>,
    pub qv: Vec<f64>,
    pub jump: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
}

impl LimitSample {
    fn derived(&self, label: &str, f: impl Fn(usize) -> f64) -> Result<EmpiricalSample> {
        let values: Vec<f64> = (0..self.x1.len()).map(f).filter(|v| v.is_finite()).collect();
        EmpiricalSample::new(label, values, vec![(self.seed, self.stream)], None)
    }

    pub fn x1_sample(&self) -> Result<EmpiricalSample> {
        self.derived("X(1)", |i| self.x1[i])
    }

    pub fn qv_sample(&self) -> Result<EmpiricalSample> {
        self.derived("[X]_1", |i| self.qv[i])
    }

    pub fn jump_sample(&self) -> Result<EmpiricalSample> {
        self.derived("J", |i| self.jump[i])
    }

    /// `X(1) / sqrt([X]_1)`.
    pub fn self_normalized(&self) -> Result<EmpiricalSample> {
        self.derived("X(1)/sqrt([X]_1)", |i| self.x1[i] / self.qv[i].sqrt())
    }

    /// `J / sqrt([X]_1)`.
    pub fn jump_over_root_qv(&self) -> Result<EmpiricalSample> {
        self.derived("J/sqrt([X]_1)", |i| self.jump[i] / self.qv[i].sqrt())
    }

    /// `J / X(1)`.
    pub fn jump_over_x1(&self) -> Result<EmpiricalSample> {
        self.derived("J/X(1)", |i| self.jump[i] / self.x1[i])
    }
}

pub fn limit_statistic_sample(
    config: &LimitConfig,
    replicates: usize,
    rng: &RandomSource,
) -> Result<LimitSample> {
    let triples = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            simulate_endpoint(&config.spec, config.gamma_prime, config.epsilon, &mut rng.split(r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = LimitSample {
        x1: Vec::with_capacity(replicates),
        qv: Vec::with_capacity(replicates),
        jump: Vec::with_capacity(replicates),
        seed: rng.seed(),
        stream: rng.stream(),
    };
    for (x, v, j) in triples {
        out.x1.push(x);
        out.qv.push(v);
        out.jump.push(j);
    }
    Ok(out)
}

/// `X(t)/sqrt([X]_1)` at each `t` of `times`, for one path.
pub fn self_normalized_at(path: &LevyPath, times: &[f64]) -> Vec<f64> {
    let root = quadratic_variation(path).sqrt();
    times
        .iter()
        .map(|&t| if root > 0.0 { path.value_at(t) / root } else { 0.0 })
        .collect()
}
