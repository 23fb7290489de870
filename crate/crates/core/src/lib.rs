//! Monte Carlo laboratory for self-normalized partial sums of heavy-tailed
//! i.i.d. data.
//!
//! The crate builds the finite-sample objects (`S_[nt] / V_n`, Student
//! processes, max ratios, the `(S_n/a_n, V_n^2/a_n^2, max|X_i|/a_n)` triple),
//! simulates their α-stable Lévy limits (`X(t)`, the quadratic variation
//! `[X]_1` and the biggest jump `J`), and compares the two with
//! Kolmogorov–Smirnov distances along a grid of sample sizes.
//!
//! Module map:
//!
//! - [`stable`]: characteristic function, sampler and numerical CDF of
//!   `S(α, γ, c, p, q)` laws.
//! - [`models`]: catalog of i.i.d. laws with exact tails and truncated moments.
//! - [`norming`]: the norming constant `a_n`, centering `b_n`, the Feller
//!   constant and the Kesten–Maller ratio.
//! - [`levy`]: Lévy–Itô path simulation of the limit process.
//! - [`selfnorm`]: finite-`n` self-normalized statistics.
//! - [`stats`]: KS distances, convergence scans and f.d.d. checks.
//! - [`experiments`]: config-driven theorem checks producing JSON reports.
//! - [`cli`]: the `selfnorm-lab` command line.
//!
//! The `examples/` directory has one runnable program per capability.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod levy;
pub mod models;
pub mod norming;
pub mod quad;
pub mod rng;
pub mod selfnorm;
pub mod stable;
pub mod stats;

pub use error::{Error, Result};
pub use rng::RandomSource;
