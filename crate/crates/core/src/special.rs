//! Distribution functions used by the significance tests.
//!
//! A single continued-fraction kernel for the regularized incomplete beta
//! function backs the Student, Fisher and Beta CDFs. The normal CDF goes
//! through a dedicated `erfc`. Quantiles are root-finders against the forward
//! CDFs, so `cdf(inv(p)) == p` holds to the root-finder tolerance.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::domain("Probability", format!("{value} is outside [0, 1]")))
        }
    }

    /// Clamps floating-point spill-over outside `[0, 1]`; NaN is rejected.
    pub fn clamped(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::domain("Probability", "NaN"));
        }
        Ok(Self(value.clamp(0.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

const BETA_CF_MAX_ITER: usize = 20_000;
const BETA_CF_EPS: f64 = 4.0 * f64::EPSILON;
const TINY: f64 = 1e-300;

/// Stirling series remainder `ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)]`, valid for x ≥ 10.
fn stirling_correction(x: f64) -> f64 {
    // Bernoulli-number coefficients B_2k / (2k (2k-1)).
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x must be positive and finite, got {x}")));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    Ok(log_gamma_unchecked(x))
}

/// `ζ(k) - 1` for k = 2, 3, ...
const ZETA_MINUS_ONE: [f64; 26] = [
    6.449_340_668_482_264e-1,
    2.020_569_031_595_943e-1,
    8.232_323_371_113_819e-2,
    3.692_775_514_336_993e-2,
    1.734_306_198_444_914e-2,
    8.349_277_381_922_827e-3,
    4.077_356_197_944_34e-3,
    2.008_392_826_082_214e-3,
    9.945_751_278_180_853e-4,
    4.941_886_041_194_645e-4,
    2.460_865_533_080_483e-4,
    1.227_133_475_784_891e-4,
    6.124_813_505_870_483e-5,
    3.058_823_630_702_049e-5,
    1.528_225_940_865_187e-5,
    7.637_197_637_899_763e-6,
    3.817_293_264_999_84e-6,
    1.908_212_716_553_939e-6,
    9.539_620_338_727_962e-7,
    4.769_329_867_878_064e-7,
    2.384_505_027_277_33e-7,
    1.192_199_259_653_111e-7,
    5.960_818_905_125_948e-8,
    2.980_350_351_465_228e-8,
    1.490_155_482_836_504e-8,
    7.450_711_789_835_43e-9,
];

/// `ln Γ(1 + z)` for `|z| <= 1/2`, keeping full relative precision near the
/// zeros of `ln Γ` at 1 and 2.
fn ln_gamma_1p(z: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate().rev() {
        let k = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum = sum * z + sign * c / k;
    }
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + sum * z * z
}

fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_1p(x) - x.ln();
    }
    if x <= 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x <= 2.5 {
        return (x - 1.0).ln() + ln_gamma_1p(x - 2.0);
    }
    if x >= 10.0 {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_correction(x);
    }
    // Shift up with the recurrence Γ(x + 1) = x Γ(x).
    let mut shifted = x;
    let mut product = 1.0;
    while shifted < 10.0 {
        product *= shifted;
        shifted += 1.0;
    }
    log_gamma_unchecked(shifted) - product.ln()
}

/// `ln B(a, b)` computed without cancelling large log-gamma terms.
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (p, q) = if a < b { (a, b) } else { (b, a) };
    if q < 10.0 {
        return log_gamma_unchecked(p) + log_gamma_unchecked(q) - log_gamma_unchecked(p + q);
    }
    let corr_q = stirling_correction(q) - stirling_correction(p + q);
    if p >= 10.0 {
        // Both large.
        let corr = stirling_correction(p) + corr_q;
        return -0.5 * q.ln() + LN_SQRT_2PI + corr + (p - 0.5) * (p / (p + q)).ln()
            + q * (-p / (p + q)).ln_1p();
    }
    // p small, q large: ln Γ(q) - ln Γ(p + q) by an expansion in p / q.
    let ratio = corr_q - (q - 0.5) * (p / q).ln_1p() - p * (p + q).ln() + p;
    log_gamma_unchecked(p) + ratio
}

/// Lower and upper regularized incomplete beta values, each computed
/// without subtracting from one when it is the smaller of the pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct IncBeta {
    pub lower: f64,
    pub upper: f64,
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        func: "reg_inc_beta",
        iterations: BETA_CF_MAX_ITER,
    })
}

/// `I_x(a, b)` with `y = 1 - x` supplied separately so callers can keep
/// full precision on whichever side is small.
pub(crate) fn inc_beta_pair(a: f64, b: f64, x: f64, y: f64) -> Result<IncBeta> {
    if x <= 0.0 {
        return Ok(IncBeta { lower: 0.0, upper: 1.0 });
    }
    if y <= 0.0 {
        return Ok(IncBeta { lower: 1.0, upper: 0.0 });
    }
    let ln_x = if x < 0.5 { x.ln() } else { (-y).ln_1p() };
    let ln_y = if y < 0.5 { y.ln() } else { (-x).ln_1p() };
    let front = (a * ln_x + b * ln_y - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = (front * beta_continued_fraction(a, b, x)? / a).clamp(0.0, 1.0);
        Ok(IncBeta { lower, upper: 1.0 - lower })
    } else {
        let upper = (front * beta_continued_fraction(b, a, y)? / b).clamp(0.0, 1.0);
        Ok(IncBeta { lower: 1.0 - upper, upper })
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("reg_inc_beta", format!("a and b must be positive, got a={a}, b={b}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("reg_inc_beta", format!("x must lie in [0, 1], got {x}")));
    }
    Ok(inc_beta_pair(a, b, x, 1.0 - x)?.lower)
}

/// Complementary error function for `u >= 0`.
fn erfc_nonneg(u: f64) -> f64 {
    if u > 27.3 {
        // e^{-u²} underflows.
        return 0.0;
    }
    if u < 2.0 {
        // erf(u) = 2/√π e^{-u²} Σ 2^n u^{2n+1} / (1·3···(2n+1)), all terms positive.
        let u2 = u * u;
        let mut term = u;
        let mut sum = u;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * u2 / (2.0 * n + 1.0);
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        1.0 - 2.0 * FRAC_1_SQRT_PI * (-u2).exp() * sum
    } else {
        // Lentz evaluation of 1/(u + (1/2)/(u + 1/(u + (3/2)/(u + ...)))).
        let mut f = u;
        let mut c = u;
        let mut d = 0.0;
        for n in 1..500 {
            let a = n as f64 * 0.5;
            d = u + a * d;
            if d.abs() < TINY {
                d = TINY;
            }
            d = 1.0 / d;
            c = u + a / c;
            if c.abs() < TINY {
                c = TINY;
            }
            let del = c * d;
            f *= del;
            if (del - 1.0).abs() < f64::EPSILON {
                break;
            }
        }
        FRAC_1_SQRT_PI * (-u * u).exp() / f
    }
}

/// Standard normal CDF Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let u = -z * FRAC_1_SQRT_2;
    if u >= 0.0 {
        0.5 * erfc_nonneg(u)
    } else {
        1.0 - 0.5 * erfc_nonneg(-u)
    }
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Rational approximation of the lower-tail quantile (relative error ~1e-9),
/// used only as a starting point.
fn normal_inv_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Standard normal quantile Φ⁻¹(p) for `0 < p < 1`.
pub fn normal_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("normal_inv", format!("p must lie in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Work in the lower tail where Φ has full relative precision.
    let q = if p < 0.5 { p } else { 1.0 - p };
    let mut x = normal_inv_guess(q);
    for _ in 0..50 {
        let err = 0.5 * erfc_nonneg(-x * FRAC_1_SQRT_2) - q;
        let u = err * SQRT_2PI * (0.5 * x * x).exp();
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    Ok(if p < 0.5 { x } else { -x })
}

fn check_dof(func: &'static str, nu: f64) -> Result<()> {
    if nu > 0.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("degrees of freedom must be positive, got {nu}")))
    }
}

/// P(T > s) for s ≥ 0.
fn t_upper_tail(s: f64, nu: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.5);
    }
    if s.is_infinite() {
        return Ok(0.0);
    }
    let s2 = s * s;
    let (x, y) = if s2 < nu {
        let r = s2 / nu;
        (1.0 / (1.0 + r), r / (1.0 + r))
    } else {
        let r = nu / s2;
        (r / (1.0 + r), 1.0 / (1.0 + r))
    };
    Ok(0.5 * inc_beta_pair(0.5 * nu, 0.5, x, y)?.lower)
}

/// Central Student-t CDF with `nu` degrees of freedom.
pub fn t_cdf(x: f64, nu: f64) -> Result<f64> {
    check_dof("t_cdf", nu)?;
    if x.is_nan() {
        return Err(Error::domain("t_cdf", "x is NaN"));
    }
    let tail = t_upper_tail(x.abs(), nu)?;
    Ok(if x < 0.0 { tail } else { 1.0 - tail })
}

/// Student-t density.
pub fn t_pdf(x: f64, nu: f64) -> Result<f64> {
    check_dof("t_pdf", nu)?;
    let log = -0.5 * (nu + 1.0) * (x * x / nu).ln_1p() - 0.5 * nu.ln() - ln_beta(0.5, 0.5 * nu);
    Ok(log.exp())
}

/// Student-t quantile: the `x` with `t_cdf(x, nu) = p`.
pub fn t_inv(p: f64, nu: f64) -> Result<f64> {
    check_dof("t_inv", nu)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("t_inv", format!("p must lie in (0, 1), got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let q = if p < 0.5 { p } else { 1.0 - p };
    let s = t_upper_quantile(q, nu)?;
    Ok(if p < 0.5 { -s } else { s })
}

/// Solves P(T > s) = q for s > 0, with q < 1/2.
fn t_upper_quantile(q: f64, nu: f64) -> Result<f64> {
    const MAX_ITER: usize = 300;
    // Cornish-Fisher style start from the normal quantile.
    let z = -normal_inv(q)?;
    let z3 = z * z * z;
    let mut s = z + (z3 + z) / (4.0 * nu) + (5.0 * z3 * z * z + 16.0 * z3 + 3.0 * z) / (96.0 * nu * nu);
    if !(s.is_finite() && s > 0.0) {
        s = z.max(1.0);
    }

    // Bracket [lo, hi] with tail(lo) >= q > tail(hi).
    let mut lo = 0.0;
    let mut hi = s;
    let mut iterations = 0;
    while t_upper_tail(hi, nu)? >= q {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if iterations > 2000 || !hi.is_finite() {
            return Err(Error::NoConvergence { func: "t_inv", iterations });
        }
    }

    for _ in 0..MAX_ITER {
        let f = t_upper_tail(s, nu)? - q;
        if f == 0.0 {
            return Ok(s);
        }
        if f > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        let density = t_pdf(s, nu)?;
        let mut next = s + f / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let width_done = (hi - lo) <= 4.0 * f64::EPSILON * hi;
        if (next - s).abs() <= 4.0 * f64::EPSILON * s || width_done {
            return Ok(next);
        }
        s = next;
    }
    Err(Error::NoConvergence { func: "t_inv", iterations: MAX_ITER })
}

/// Fisher-Snedecor CDF with `(d1, d2)` degrees of freedom.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_dof("f_cdf", d1)?;
    check_dof("f_cdf", d2)?;
    if !(x >= 0.0) {
        return Err(Error::domain("f_cdf", format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let num = d1 * x;
    let (bx, by) = (num / (num + d2), d2 / (num + d2));
    Ok(inc_beta_pair(0.5 * d1, 0.5 * d2, bx, by)?.lower)
}

/// Upper tail `1 - F(x; d1, d2)` without cancellation.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_dof("f_sf", d1)?;
    check_dof("f_sf", d2)?;
    if !(x >= 0.0) {
        return Err(Error::domain("f_sf", format!("x must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let num = d1 * x;
    let (bx, by) = (num / (num + d2), d2 / (num + d2));
    Ok(inc_beta_pair(0.5 * d1, 0.5 * d2, bx, by)?.upper)
}

/// Beta distribution CDF, identical to `reg_inc_beta(a, b, x)`.
pub fn beta_cdf(x: f64, a: f64, b: f64) -> Result<f64> {
    reg_inc_beta(a, b, x)
}
