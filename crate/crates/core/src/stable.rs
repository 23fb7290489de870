//! Stable laws `S(α, γ, c, p, q)` in Feller's parameterization.
//!
//! The log-characteristic function is
//!
//! ```text
//! α ≠ 1:  iγt + c|t|^α Γ(3-α)/(α(α-1)) [cos(πα/2) - i(p-q) sgn(t) sin(πα/2)]
//! α = 1:  iγt - c|t| [π/2 + i(p-q) sgn(t) log|t|]
//! ```
//!
//! with `p` the weight of the right tail. Sampling goes through the
//! standard `S_α(σ, β, μ)` form and the Chambers–Mallows–Stuck transform;
//! the CDF is a Gil–Pelaez inversion.

use std::sync::OnceLock;
use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::rng::RandomSource;

pub type ComplexValue = Complex64;

/// Tolerance on `p + q = 1`.
pub const BALANCE_TOL: f64 = 1e-12;
/// Gil–Pelaez truncation: integrate until `|f(T)|` falls below this.
pub const CF_TRUNCATION: f64 = 1e-12;
/// Minimum number of quadrature nodes in the inversion.
pub const MIN_INVERSION_NODES: usize = 1 << 12;
/// Agreement required between two successive refinement levels.
pub const INVERSION_TOL: f64 = 1e-10;

const GL_ORDER: usize = 16;
const BASE_PANELS: usize = MIN_INVERSION_NODES / GL_ORDER;
const MAX_LEVEL: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub gamma: f64,
    pub c: f64,
    pub p: f64,
    pub q: f64,
}

impl StableParams {
    pub fn new(alpha: f64, gamma: f64, c: f64, p: f64, q: f64) -> Result<Self> {
        let all = [alpha, gamma, c, p, q];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite stable parameter in {all:?}")));
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} outside (0, 2]")));
        }
        if c < 0.0 || p < 0.0 || q < 0.0 {
            return Err(Error::InvalidParams("c, p, q must be nonnegative".into()));
        }
        if (p + q - 1.0).abs() > BALANCE_TOL {
            return Err(Error::InvalidParams(format!("p + q = {} != 1", p + q)));
        }
        Ok(StableParams { alpha, gamma, c, p, q })
    }

    /// `S(α, γ, 1, p, 1-p)`.
    pub fn unit(alpha: f64, gamma: f64, p: f64) -> Result<Self> {
        Self::new(alpha, gamma, 1.0, p, 1.0 - p)
    }

    pub fn skew(&self) -> f64 {
        self.p - self.q
    }

    /// `Γ(3-α) / (α(α-1))`, the coefficient of the α ≠ 1 branch.
    pub fn feller_coefficient(alpha: f64) -> f64 {
        libm::tgamma(3.0 - alpha) / (alpha * (alpha - 1.0))
    }

    /// `s` in `|f(t)| = exp(-s |t|^α)`.
    pub fn modulus_rate(&self) -> f64 {
        if self.alpha == 1.0 {
            self.c * FRAC_PI_2
        } else if self.alpha == 2.0 {
            0.5 * self.c
        } else {
            -self.c * Self::feller_coefficient(self.alpha) * (PI * self.alpha / 2.0).cos()
        }
    }

    /// Maps to `S_α(σ, β, μ)` with log-cf `-σ^α|t|^α(1 - iβ sgn t tan(πα/2)) + iμt`
    /// (α ≠ 1) or `-σ|t|(1 + iβ (2/π) sgn t log|t|) + iμt` (α = 1).
    pub fn to_standard(&self) -> StandardForm {
        let sigma = if self.alpha == 1.0 {
            self.c * FRAC_PI_2
        } else {
            self.modulus_rate().powf(1.0 / self.alpha)
        };
        StandardForm {
            alpha: self.alpha,
            sigma,
            beta: self.skew(),
            mu: self.gamma,
        }
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.c <= 0.0 {
            return Err(Error::Degenerate(format!(
                "c = {} gives a point mass at {}",
                self.c, self.gamma
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandardForm {
    pub alpha: f64,
    pub sigma: f64,
    pub beta: f64,
    pub mu: f64,
}

/// Log of the characteristic function for `t >= 0`.
fn log_cf_nonneg(params: &StableParams, t: f64) -> Complex64 {
    let StableParams { alpha, gamma, c, .. } = *params;
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let skew = params.skew();
    if alpha == 1.0 {
        Complex64::new(-c * t * FRAC_PI_2, gamma * t - c * skew * t * t.ln())
    } else if alpha == 2.0 {
        Complex64::new(-0.5 * c * t * t, gamma * t)
    } else {
        let k = c * StableParams::feller_coefficient(alpha) * t.powf(alpha);
        let half = PI * alpha / 2.0;
        Complex64::new(k * half.cos(), gamma * t - k * skew * half.sin())
    }
}

/// Characteristic function `f(t)`.
pub fn cf_eval(params: &StableParams, t: f64) -> Result<ComplexValue> {
    if t.is_nan() {
        return Err(Error::InvalidParams("t is NaN".into()));
    }
    let f = log_cf_nonneg(params, t.abs()).exp();
    Ok(if t < 0.0 { f.conj() } else { f })
}

/// Chambers–Mallows–Stuck sampler with precomputed constants.
#[derive(Clone, Copy, Debug)]
pub enum StableSampler {
    Gaussian { mean: f64, sd: f64 },
    General { alpha: f64, shift: f64, scale: f64, sigma: f64, mu: f64 },
    Unit { sigma: f64, beta: f64, mu: f64 },
}

impl StableSampler {
    pub fn new(params: &StableParams) -> Result<Self> {
        params.require_nondegenerate()?;
        if params.alpha == 2.0 {
            return Ok(StableSampler::Gaussian {
                mean: params.gamma,
                sd: params.c.sqrt(),
            });
        }
        let std = params.to_standard();
        if params.alpha == 1.0 {
            return Ok(StableSampler::Unit {
                sigma: std.sigma,
                beta: std.beta,
                mu: std.mu,
            });
        }
        let zeta = std.beta * (PI * std.alpha / 2.0).tan();
        Ok(StableSampler::General {
            alpha: std.alpha,
            shift: zeta.atan() / std.alpha,
            scale: (1.0 + zeta * zeta).powf(0.5 / std.alpha),
            sigma: std.sigma,
            mu: std.mu,
        })
    }

    pub fn sample(&self, rng: &mut RandomSource) -> f64 {
        match *self {
            StableSampler::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            StableSampler::General { alpha, shift, scale, sigma, mu } => {
                let v = PI * (rng.open01() - 0.5);
                let w = -rng.open01().ln();
                let a = alpha * (v + shift);
                let x = scale * a.sin() / v.cos().powf(1.0 / alpha)
                    * ((v - a).cos() / w).powf((1.0 - alpha) / alpha);
                sigma * x + mu
            }
            StableSampler::Unit { sigma, beta, mu } => {
                let v = PI * (rng.open01() - 0.5);
                let w = -rng.open01().ln();
                let lead = FRAC_PI_2 + beta * v;
                let x = (lead * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / lead).ln()) / FRAC_PI_2;
                // Zolotarev drift for the log|t| term of the α = 1 branch.
                sigma * x + beta * sigma * sigma.ln() / FRAC_PI_2 + mu
            }
        }
    }
}

pub fn sample_stable(params: &StableParams, rng: &mut RandomSource) -> Result<f64> {
    Ok(StableSampler::new(params)?.sample(rng))
}

/// Nodes of one refinement level of the inversion integral.
struct InversionLevel {
    t: Vec<f64>,
    weight: Vec<f64>,
    phase: Vec<f64>,
}

/// Gil–Pelaez CDF `F(x) = 1/2 - (1/π) ∫_0^∞ Im[e^{-itx} f(t)] / t dt`.
///
/// The integral runs in `u` with `t = u^m`, `m = max(2, 1/α)`, which removes
/// the `t^(α-1)` and `log t` behaviour at the origin. Node tables are built
/// lazily per refinement level and reused across evaluation points.
pub struct StableCdf {
    params: StableParams,
    exponent: f64,
    upper: f64,
    t_max: f64,
    levels: Vec<OnceLock<InversionLevel>>,
    gl: (Vec<f64>, Vec<f64>),
}

impl StableCdf {
    pub fn new(params: &StableParams) -> Result<Self> {
        params.require_nondegenerate()?;
        let rate = params.modulus_rate();
        let t_max = ((1.0 / CF_TRUNCATION).ln() / rate).powf(1.0 / params.alpha);
        let exponent = (1.0 / params.alpha).max(2.0);
        Ok(StableCdf {
            params: *params,
            exponent,
            upper: t_max.powf(1.0 / exponent),
            t_max,
            levels: (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            gl: gauss_legendre(GL_ORDER),
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    fn level(&self, k: usize) -> &InversionLevel {
        self.levels[k].get_or_init(|| {
            let panels = BASE_PANELS << k;
            let h = self.upper / panels as f64;
            let m = self.exponent;
            let n = panels * GL_ORDER;
            let mut level = InversionLevel {
                t: Vec::with_capacity(n),
                weight: Vec::with_capacity(n),
                phase: Vec::with_capacity(n),
            };
            let (xs, ws) = &self.gl;
            for j in 0..panels {
                let mid = (j as f64 + 0.5) * h;
                for (x, w) in xs.iter().zip(ws) {
                    let u = mid + 0.5 * h * x;
                    let t = u.powf(m);
                    let psi = log_cf_nonneg(&self.params, t);
                    level.t.push(t);
                    level.weight.push(0.5 * h * w * m * psi.re.exp() / u);
                    level.phase.push(psi.im);
                }
            }
            level
        })
    }

    fn integral(&self, k: usize, x: f64) -> f64 {
        let level = self.level(k);
        level
            .t
            .iter()
            .zip(&level.weight)
            .zip(&level.phase)
            .map(|((t, w), ph)| w * (ph - t * x).sin())
            .sum()
    }

    /// Lévy-measure tail constant `c(2-α)/α`.
    fn tail_constant(&self) -> f64 {
        self.params.c * (2.0 - self.params.alpha) / self.params.alpha
    }

    fn asymptotic(&self, x: f64) -> Option<f64> {
        let z = x - self.params.gamma;
        let mass = self.tail_constant() * z.abs().powf(-self.params.alpha);
        if mass > 1e-2 {
            return None;
        }
        Some(if z > 0.0 {
            1.0 - self.params.p * mass
        } else {
            self.params.q * mass
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::InvalidParams("x is NaN".into()));
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        if x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let m = self.exponent;
        let drift = (log_cf_nonneg(&self.params, self.t_max).im - self.params.gamma * self.t_max).abs();
        let cycles = m * ((x - self.params.gamma).abs() * self.t_max + drift) / (2.0 * PI);
        let needed = 1.5 * cycles;
        let mut k = 0;
        while k < MAX_LEVEL && ((BASE_PANELS << k) as f64) < needed {
            k += 1;
        }
        if k >= MAX_LEVEL {
            return self.asymptotic(x).ok_or_else(|| {
                Error::numerical(format!("inversion at x = {x} needs more than {} panels", BASE_PANELS << MAX_LEVEL), f64::NAN)
            });
        }
        let mut coarse = self.integral(k, x);
        let mut residual = f64::INFINITY;
        while k < MAX_LEVEL {
            let fine = self.integral(k + 1, x);
            residual = (fine - coarse).abs() / PI;
            if residual <= INVERSION_TOL {
                return Ok((0.5 - fine / PI).clamp(0.0, 1.0));
            }
            coarse = fine;
            k += 1;
        }
        self.asymptotic(x)
            .ok_or_else(|| Error::numerical(format!("Gil–Pelaez inversion at x = {x}"), residual))
    }

    /// Quantile by bisection on [`cdf`](Self::cdf).
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(prob > 0.0 && prob < 1.0) {
            return Err(Error::InvalidParams(format!("probability {prob} outside (0, 1)")));
        }
        let scale = self.params.modulus_rate().powf(1.0 / self.params.alpha).max(1e-300);
        let mut lo = self.params.gamma - scale;
        let mut hi = self.params.gamma + scale;
        while self.cdf(lo)? > prob {
            lo = self.params.gamma - 2.0 * (self.params.gamma - lo);
        }
        while self.cdf(hi)? < prob {
            hi = self.params.gamma + 2.0 * (hi - self.params.gamma);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < prob {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

pub fn cdf_stable(params: &StableParams, x: f64) -> Result<f64> {
    StableCdf::new(params)?.cdf(x)
}

pub fn quantile_stable(params: &StableParams, prob: f64) -> Result<f64> {
    StableCdf::new(params)?.quantile(prob)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of the symmetric Cauchy law with location `loc` and scale `scale`.
pub fn cauchy_cdf(x: f64, loc: f64, scale: f64) -> f64 {
    0.5 + ((x - loc) / scale).atan() / PI
}
