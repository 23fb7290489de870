//! Quadrature used by the CDF inversion, the Feller constant and the
//! slowly-varying model's truncated moment.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod panel: (estimate, |K15 - G7|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod on a finite interval with absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, 0u32)];
    let mut total = 0.0;
    let mut residual = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (est, err) = gk15(&f, lo, hi);
        panels += 1;
        if !est.is_finite() {
            return Err(Error::numerical(
                format!("non-finite integrand on [{lo}, {hi}]"),
                f64::INFINITY,
            ));
        }
        let local_tol = abs_tol * (hi - lo).abs() / (b - a).abs();
        if err <= local_tol.max(f64::EPSILON * est.abs()) || depth >= 48 || panels > 200_000 {
            if err > local_tol && err > 1e-15 {
                residual += err;
            }
            total += est;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    if residual > abs_tol {
        return Err(Error::numerical("adaptive quadrature did not converge", residual));
    }
    Ok(total)
}

/// `∫_a^∞ sin(u) g(u) du` for `g` nonnegative and nonincreasing on `[a, ∞)`.
///
/// Sums half-period panels; the alternating tail is bounded by the last
/// panel, and the running sum is averaged over the last two partial sums.
pub fn integrate_sin_tail<G: Fn(f64) -> f64>(g: G, a: f64, abs_tol: f64) -> Result<f64> {
    use std::f64::consts::PI;
    let first_end = ((a / PI).floor() + 1.0) * PI;
    let mut sum = integrate(|u| u.sin() * g(u), a, first_end, abs_tol * 1e-3)?;
    let mut lo = first_end;
    let mut prev_sum = sum;
    for _ in 0..50_000_000u64 {
        let hi = lo + PI;
        let term = integrate(|u| u.sin() * g(u), lo, hi, abs_tol * 1e-3)?;
        prev_sum = sum;
        sum += term;
        lo = hi;
        if term.abs() < abs_tol {
            return Ok(0.5 * (sum + prev_sum));
        }
    }
    Err(Error::numerical(
        "oscillatory tail did not decay",
        (sum - prev_sum).abs(),
    ))
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
