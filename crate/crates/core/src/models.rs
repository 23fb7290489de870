//! Catalog of i.i.d. laws with known domain-of-attraction status.
//!
//! Every model carries exact expressions for `P(|X| > x)`, the truncated
//! second moment `l(x) = E[X^2 1{|X| <= x}]` and the truncated first moment,
//! plus an inverse-transform sampler.

use std::f64::consts::{E, FRAC_2_PI, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::quad;
use crate::rng::RandomSource;

/// Tolerance used to decide that a mean is zero.
pub const ZERO_MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Law {
    /// `Y + shift` where `|Y|` has tail `r^{-α}` on `r >= 1` and `Y > 0`
    /// with probability `p`.
    SignedPareto { alpha: f64, p: f64, shift: f64 },
    Rademacher,
    UniformCentered,
    /// `|X| = exp(1/U)`, fair sign; `P(|X| > x) = 1/log x` for `x > e`.
    SlowVar,
    CauchySym,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistributionModel {
    name: String,
    law: Law,
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn parse_num(name: &str, field: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidParams(format!("model `{name}`: bad {field} `{s}`")))
}

/// `∫_a^b α r^{j-α-1} dr`.
fn power_integral(j: f64, alpha: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let e = j - alpha;
    if e.abs() < 1e-12 {
        alpha * (b / a).ln()
    } else {
        alpha * (b.powf(e) - a.powf(e)) / e
    }
}

impl DistributionModel {
    pub fn pareto_sym(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidParams(format!("pareto_sym needs alpha in (0, 2), got {alpha}")));
        }
        Ok(DistributionModel {
            name: format!("pareto_sym:{alpha}"),
            law: Law::SignedPareto { alpha, p: 0.5, shift: 0.0 },
        })
    }

    pub fn pareto_asym(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "pareto_asym needs alpha in (0, 2) and p in [0, 1], got ({alpha}, {p})"
            )));
        }
        Ok(DistributionModel {
            name: format!("pareto_asym:{alpha}:{p}"),
            law: Law::SignedPareto { alpha, p, shift: 0.0 },
        })
    }

    pub fn pareto_centered(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "pareto_centered needs alpha in (1, 2) and p in [0, 1], got ({alpha}, {p})"
            )));
        }
        let mean = (2.0 * p - 1.0) * alpha / (alpha - 1.0);
        Ok(DistributionModel {
            name: format!("pareto_centered:{alpha}:{p}"),
            law: Law::SignedPareto { alpha, p, shift: -mean },
        })
    }

    pub fn rademacher() -> Self {
        DistributionModel { name: "rademacher".into(), law: Law::Rademacher }
    }

    pub fn uniform_centered() -> Self {
        DistributionModel { name: "uniform_centered".into(), law: Law::UniformCentered }
    }

    /// Density `|x|^{-3}` on `|x| > 1`: α = 2 with `l(x) = 2 log x`.
    pub fn logpareto2() -> Self {
        DistributionModel {
            name: "logpareto2".into(),
            law: Law::SignedPareto { alpha: 2.0, p: 0.5, shift: 0.0 },
        }
    }

    pub fn slowvar_tail() -> Self {
        DistributionModel { name: "slowvar_tail".into(), law: Law::SlowVar }
    }

    pub fn cauchy_sym() -> Self {
        DistributionModel { name: "cauchy_sym".into(), law: Law::CauchySym }
    }

    /// Parses names such as `pareto_sym:1.5`, `pareto_asym:1.5:0.8`,
    /// `rademacher`, `slowvar_tail`.
    pub fn lookup(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.trim().split(':').collect();
        match parts.as_slice() {
            ["pareto_sym", a] => Self::pareto_sym(parse_num(name, "alpha", a)?),
            ["pareto_asym", a, p] => {
                Self::pareto_asym(parse_num(name, "alpha", a)?, parse_num(name, "p", p)?)
            }
            ["pareto_centered", a, p] => {
                Self::pareto_centered(parse_num(name, "alpha", a)?, parse_num(name, "p", p)?)
            }
            ["rademacher"] => Ok(Self::rademacher()),
            ["uniform_centered"] => Ok(Self::uniform_centered()),
            ["logpareto2"] => Ok(Self::logpareto2()),
            ["slowvar_tail"] => Ok(Self::slowvar_tail()),
            ["cauchy_sym"] => Ok(Self::cauchy_sym()),
            _ => Err(Error::UnknownModel(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn law(&self) -> Law {
        self.law
    }

    /// Index of the stable law attracting `X`, `None` for the slowly varying tail.
    pub fn alpha_attractor(&self) -> Option<f64> {
        match self.law {
            Law::SignedPareto { alpha, .. } => Some(alpha),
            Law::Rademacher | Law::UniformCentered => Some(2.0),
            Law::CauchySym => Some(1.0),
            Law::SlowVar => None,
        }
    }

    /// Right-tail balance `p = lim P(X > x) / P(|X| > x)`.
    pub fn p_balance(&self) -> f64 {
        match self.law {
            Law::SignedPareto { p, .. } => p,
            _ => 0.5,
        }
    }

    pub fn mean(&self) -> Option<f64> {
        match self.law {
            Law::SignedPareto { alpha, p, shift } if alpha > 1.0 => {
                Some((2.0 * p - 1.0) * alpha / (alpha - 1.0) + shift)
            }
            Law::SignedPareto { .. } | Law::SlowVar | Law::CauchySym => None,
            Law::Rademacher | Law::UniformCentered => Some(0.0),
        }
    }

    fn is_symmetric(&self) -> bool {
        match self.law {
            Law::SignedPareto { p, shift, .. } => p == 0.5 && shift == 0.0,
            _ => true,
        }
    }

    /// For α = 1: whether `lim n E sin(X/a_n)` is finite. Asymmetric α = 1
    /// Pareto tails make `n E sin(X/a_n)` grow like `(p-q) log n`.
    pub fn feller_condition(&self) -> Option<bool> {
        (self.alpha_attractor() == Some(1.0)).then(|| self.is_symmetric())
    }

    /// Atoms of `|X|`, where `l` jumps.
    pub fn abs_atoms(&self) -> &'static [f64] {
        match self.law {
            Law::Rademacher => &[1.0],
            _ => &[],
        }
    }

    /// Checks the stable-domain hypotheses shared by the functional limit
    /// theorem and its corollaries; the error names the violated clause.
    pub fn check_functional_hypotheses(&self) -> Result<f64> {
        let alpha = self.alpha_attractor().ok_or_else(|| {
            Error::Hypothesis(format!(
                "{}: X must be in the domain of attraction of a stable law with index in (0, 2]",
                self.name
            ))
        })?;
        if alpha > 1.0 {
            match self.mean() {
                Some(m) if m.abs() <= ZERO_MEAN_TOL => {}
                _ => {
                    return Err(Error::Hypothesis(format!(
                        "{}: EX = 0 is required when 1 < alpha <= 2",
                        self.name
                    )))
                }
            }
        }
        if alpha == 1.0 && self.feller_condition() != Some(true) {
            return Err(Error::Hypothesis(format!(
                "{}: Feller's condition (finite lim n E sin(X/a_n)) is required when alpha = 1",
                self.name
            )));
        }
        Ok(alpha)
    }

    pub fn sample(&self, rng: &mut RandomSource) -> f64 {
        match self.law {
            Law::SignedPareto { alpha, p, shift } => {
                let r = rng.open01().powf(-1.0 / alpha);
                let sign = if rng.uniform() < p { 1.0 } else { -1.0 };
                sign * r + shift
            }
            Law::Rademacher => {
                if rng.next_u64_bit() {
                    1.0
                } else {
                    -1.0
                }
            }
            Law::UniformCentered => 2.0 * rng.uniform() - 1.0,
            Law::SlowVar => {
                let sign = if rng.next_u64_bit() { 1.0 } else { -1.0 };
                sign * (1.0 / rng.open01()).exp()
            }
            Law::CauchySym => (PI * (rng.open01() - 0.5)).tan(),
        }
    }

    /// One draw as `(sign, log|x|)`; finite even when `x` itself overflows.
    pub fn sample_signed_log(&self, rng: &mut RandomSource) -> (f64, f64) {
        match self.law {
            Law::SlowVar => {
                let sign = if rng.next_u64_bit() { 1.0 } else { -1.0 };
                (sign, 1.0 / rng.open01())
            }
            Law::SignedPareto { alpha, p, shift } if shift == 0.0 => {
                let log_r = -rng.open01().ln() / alpha;
                let sign = if rng.uniform() < p { 1.0 } else { -1.0 };
                (sign, log_r)
            }
            _ => {
                let x = self.sample(rng);
                (x.signum(), x.abs().ln())
            }
        }
    }

    /// `P(|X| > x)` for `x >= 0`.
    pub fn tail(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self.law {
            Law::SignedPareto { alpha, p, shift } => {
                let q = 1.0 - p;
                let above = |y: f64| {
                    if y >= 1.0 {
                        p * y.powf(-alpha)
                    } else if y >= -1.0 {
                        p
                    } else {
                        p + q * (1.0 - (-y).powf(-alpha))
                    }
                };
                let below = |y: f64| {
                    if y <= -1.0 {
                        q * (-y).powf(-alpha)
                    } else if y <= 1.0 {
                        q
                    } else {
                        q + p * (1.0 - y.powf(-alpha))
                    }
                };
                above(x - shift) + below(-x - shift)
            }
            Law::Rademacher => {
                if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::UniformCentered => (1.0 - x).max(0.0),
            Law::SlowVar => {
                if x <= E {
                    1.0
                } else {
                    1.0 / x.ln()
                }
            }
            Law::CauchySym => 1.0 - FRAC_2_PI * x.atan(),
        }
    }

    /// `E[X^k 1{|X| <= x}]` for `k` in {1, 2}, for the signed Pareto family.
    fn pareto_moment(alpha: f64, p: f64, s: f64, x: f64, k: u32) -> f64 {
        let q = 1.0 - p;
        let coeffs = |sign: f64| -> [f64; 3] {
            match k {
                1 => [s, sign, 0.0],
                _ => [s * s, 2.0 * sign * s, 1.0],
            }
        };
        let piece = |weight: f64, lo: f64, hi: f64, sign: f64| -> f64 {
            if weight == 0.0 || hi <= lo {
                return 0.0;
            }
            let c = coeffs(sign);
            weight
                * (0..3)
                    .filter(|&j| c[j] != 0.0)
                    .map(|j| c[j] * power_integral(j as f64, alpha, lo, hi))
                    .sum::<f64>()
        };
        // Y = r > 0 contributes (r + s)^k on r in [max(1, -x-s), x-s];
        // Y = -r contributes (s - r)^k on r in [max(1, s-x), s+x].
        piece(p, (-x - s).max(1.0), x - s, 1.0) + piece(q, (s - x).max(1.0), s + x, -1.0)
    }

    /// `l(x) = E[X^2 1{|X| <= x}]`.
    pub fn trunc_second_moment(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.law {
            Law::SignedPareto { alpha, p, shift } => Self::pareto_moment(alpha, p, shift, x, 2),
            Law::Rademacher => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Law::UniformCentered => x.min(1.0).powi(3) / 3.0,
            Law::SlowVar => {
                if x <= E {
                    return 0.0;
                }
                // l(x) = ∫_1^{log x} e^{2s} / s^2 ds
                let top = x.ln();
                let scale = (2.0 * top).exp() / (top * top);
                if !scale.is_finite() {
                    return f64::INFINITY;
                }
                quad::integrate(|s| (2.0 * s).exp() / (s * s), 1.0, top, 1e-12 * scale)
                    .unwrap_or(f64::NAN)
            }
            Law::CauchySym => FRAC_2_PI * (x - x.atan()),
        }
    }

    /// `E[X 1{|X| <= x}]`.
    pub fn trunc_first_moment(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.law {
            Law::SignedPareto { alpha, p, shift } => Self::pareto_moment(alpha, p, shift, x, 1),
            _ => 0.0,
        }
    }

    /// `E sin(X / a)` by quadrature against the radial density.
    pub fn sin_expectation(&self, a: f64, abs_tol: f64) -> Result<f64> {
        if !(a > 0.0) {
            return Err(Error::InvalidParams(format!("scale a = {a} must be positive")));
        }
        if self.is_symmetric() {
            return Ok(0.0);
        }
        match self.law {
            Law::SignedPareto { alpha, p, shift: 0.0 } => {
                // (p - q) α a^{-α} ∫_{1/a}^∞ sin(u) u^{-α-1} du
                let weight = (2.0 * p - 1.0) * alpha * a.powf(-alpha);
                let tol = abs_tol / weight.abs().max(1e-300);
                let v = quad::integrate_sin_tail(|u| u.powf(-alpha - 1.0), 1.0 / a, tol)?;
                Ok(weight * v)
            }
            _ => Err(Error::Unsupported(format!(
                "E sin(X/a) for shifted model {}",
                self.name
            ))),
        }
    }
}

trait BitSource {
    fn next_u64_bit(&mut self) -> bool;
}

impl BitSource for RandomSource {
    #[inline]
    fn next_u64_bit(&mut self) -> bool {
        use rand::RngCore;
        self.next_u32() & 1 == 1
    }
}

/// Representative instances of every model family.
pub fn catalog() -> Vec<DistributionModel> {
    [
        "pareto_sym:0.5",
        "pareto_sym:0.8",
        "pareto_sym:1.5",
        "pareto_asym:0.5:1",
        "pareto_asym:1.5:0.8",
        "pareto_asym:1:0.8",
        "pareto_centered:1.5:0.8",
        "rademacher",
        "uniform_centered",
        "logpareto2",
        "slowvar_tail",
        "cauchy_sym",
    ]
    .iter()
    .map(|n| DistributionModel::lookup(n).expect("catalog names parse"))
    .collect()
}

/// `n` i.i.d. draws.
pub fn sample_iid(model: &DistributionModel, n: usize, rng: &mut RandomSource) -> Vec<f64> {
    (0..n).map(|_| model.sample(rng)).collect()
}

/// `n` i.i.d. draws multiplied by `exp(-max log|x_i|)`, so the largest
/// magnitude is 1. Self-normalized statistics are unchanged by the common
/// scale, and models whose draws overflow `f64` stay representable.
pub fn sample_iid_rescaled(model: &DistributionModel, n: usize, rng: &mut RandomSource) -> Vec<f64> {
    let draws: Vec<(f64, f64)> = (0..n).map(|_| model.sample_signed_log(rng)).collect();
    let top = draws.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
    draws.iter().map(|&(s, l)| s * (l - top).exp()).collect()
}
