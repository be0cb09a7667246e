//! AR(1) return model, autocorrelation estimation and time aggregation.
//!
//! Returns follow `R_t = μ + ε_t`, `ε_t = ρ ε_{t-1} + σ v_t` with unit-variance
//! white noise `v_t`. Aggregating `q` consecutive returns inflates (ρ > 0) or
//! deflates (ρ < 0) their variance relative to the i.i.d. case by `δ(ρ, q)²`,
//! so the true q-period Sharpe is the square-root-rule Sharpe divided by δ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{sample_mean, sample_std, ObservationSeries};

/// Bound applied to estimated autocorrelations so δ stays finite.
pub const RHO_CLAMP: f64 = 0.999;

fn check_rho(func: &'static str, rho: f64) -> Result<()> {
    if rho.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(func, format!("|rho| must be < 1, got {rho}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ar1Params {
    pub mu: f64,
    pub rho: f64,
    /// Innovation scale; the stationary variance is `σ² / (1 - ρ²)`.
    pub sigma: f64,
}

impl Ar1Params {
    pub fn new(mu: f64, rho: f64, sigma: f64) -> Result<Self> {
        check_rho("Ar1Params", rho)?;
        if !(sigma > 0.0 && sigma.is_finite()) || !mu.is_finite() {
            return Err(Error::domain(
                "Ar1Params",
                format!("need finite mu and positive sigma, got mu={mu}, sigma={sigma}"),
            ));
        }
        Ok(Self { mu, rho, sigma })
    }

    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (1.0 - self.rho * self.rho)
    }

    pub fn autocovariance(&self, lag: u32) -> f64 {
        self.stationary_variance() * self.rho.powi(lag as i32)
    }

    /// Stationary standard deviation of `R_t`.
    pub fn stationary_std(&self) -> f64 {
        self.stationary_variance().sqrt()
    }
}

pub fn stationary_variance(params: &Ar1Params) -> Result<f64> {
    check_rho("stationary_variance", params.rho)?;
    Ok(params.stationary_variance())
}

pub fn autocovariance(params: &Ar1Params, lag: u32) -> Result<f64> {
    check_rho("autocovariance", params.rho)?;
    Ok(params.autocovariance(lag))
}

/// Symmetric correlation matrix with unit diagonal, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::domain(
                "CorrelationMatrix",
                format!("expected {dim}x{dim} entries, got {}", entries.len()),
            ));
        }
        for i in 0..dim {
            if (entries[i * dim + i] - 1.0).abs() > 1e-12 {
                return Err(Error::domain("CorrelationMatrix", format!("diagonal entry {i} is not 1")));
            }
            for j in 0..dim {
                let v = entries[i * dim + j];
                if !(v.abs() <= 1.0) {
                    return Err(Error::domain("CorrelationMatrix", format!("entry ({i},{j}) outside [-1, 1]")));
                }
                if (v - entries[j * dim + i]).abs() > 1e-12 {
                    return Err(Error::domain("CorrelationMatrix", format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// `ρ_{|i-j|} = ρ^{|i-j|}`.
    pub fn ar1(dim: usize, rho: f64) -> Result<Self> {
        check_rho("CorrelationMatrix::ar1", rho)?;
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = rho.powi(i.abs_diff(j) as i32);
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }
}

/// Correlation structure of the returns being aggregated.
#[derive(Debug, Clone, PartialEq)]
pub enum Correlations {
    Ar1(f64),
    /// `ρ_1 .. ρ_{q-1}` of a stationary process.
    Stationary(Vec<f64>),
    /// Per-period standard deviations with a full correlation matrix.
    General { sigmas: Vec<f64>, corr: CorrelationMatrix },
}

/// Inputs of `R_t(q) = R_t + ... + R_{t-q+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationInputs {
    pub q: usize,
    pub correlations: Correlations,
}

impl AggregationInputs {
    /// `SR(q) / SR`, the factor that replaces `√q` under autocorrelation.
    pub fn sharpe_ratio_scaling(&self) -> Result<f64> {
        if self.q == 0 {
            return Err(Error::domain("AggregationInputs", "q must be at least 1"));
        }
        match &self.correlations {
            Correlations::Ar1(rho) => Ok((self.q as f64).sqrt() / delta(*rho, self.q as f64)?),
            Correlations::Stationary(rho_k) => aggregation_ratio_stationary(rho_k, self.q),
            Correlations::General { sigmas, corr } => {
                if sigmas.len() != self.q {
                    return Err(Error::domain("AggregationInputs", "need one sigma per period"));
                }
                // With a common long-run scale σ∞ taken as the root mean square of the sigmas.
                let sigma_inf = (sigmas.iter().map(|s| s * s).sum::<f64>() / self.q as f64).sqrt();
                let var = aggregated_variance_general(sigmas, corr)?;
                Ok(self.q as f64 * sigma_inf / var.sqrt())
            }
        }
    }
}

/// `Var[R_t(q)]` by the double sum over lags, with `sigmas[i]` the standard
/// deviation of `R_{t-i}` and `corr(i, j)` the correlation of `R_{t-i}`, `R_{t-j}`.
pub fn aggregated_variance_general(sigmas: &[f64], corr: &CorrelationMatrix) -> Result<f64> {
    let q = sigmas.len();
    if q == 0 || corr.dim() != q {
        return Err(Error::domain(
            "aggregated_variance_general",
            format!("need {q} sigmas for a {0}x{0} matrix", corr.dim()),
        ));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::domain("aggregated_variance_general", format!("sigma {s} must be positive")));
    }
    let diagonal: f64 = sigmas.iter().map(|s| s * s).sum();
    let mut cross = 0.0;
    for k in 1..q {
        for i in 0..q - k {
            cross += corr.get(i, i + k) * sigmas[i] * sigmas[i + k];
        }
    }
    let var = diagonal + 2.0 * cross;
    if !(var > 0.0) {
        return Err(Error::domain(
            "aggregated_variance_general",
            format!("aggregated variance {var} is not positive; correlations are inconsistent"),
        ));
    }
    Ok(var)
}

/// `SR(q) / SR = q / √(q + 2 Σ_{k=1}^{q-1} (q - k) ρ_k)` for a stationary process.
pub fn aggregation_ratio_stationary(rho_k: &[f64], q: usize) -> Result<f64> {
    if q == 0 {
        return Err(Error::domain("aggregation_ratio_stationary", "q must be at least 1"));
    }
    if rho_k.len() != q - 1 {
        return Err(Error::domain(
            "aggregation_ratio_stationary",
            format!("need q - 1 = {} correlations, got {}", q - 1, rho_k.len()),
        ));
    }
    let qf = q as f64;
    let weighted: f64 = rho_k
        .iter()
        .enumerate()
        .map(|(i, r)| (qf - (i + 1) as f64) * r)
        .sum();
    let denom = 1.0 + 2.0 * weighted / qf;
    if !(denom > 0.0) {
        return Err(Error::domain(
            "aggregation_ratio_stationary",
            "correlations imply a non-positive aggregated variance",
        ));
    }
    Ok((qf / denom).sqrt())
}

/// `ρ^q` for real `q`; negative bases take the sign of `ρ^⌊q⌋`.
fn signed_pow(rho: f64, q: f64) -> f64 {
    if rho >= 0.0 || q.fract() == 0.0 {
        return rho.powf(q);
    }
    let sign = if (q.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * rho.abs().powf(q)
}

/// AR(1) aggregation factor
/// `δ = √(1 + 2ρ/(1-ρ) · (1 - (1 - ρ^q) / (q (1 - ρ))))`.
pub fn delta(rho: f64, q: f64) -> Result<f64> {
    check_rho("delta", rho)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::domain("delta", format!("q must be >= 1, got {q}")));
    }
    if rho == 0.0 {
        return Ok(1.0);
    }
    if rho.abs() < 1e-8 {
        let sq = 1.0 + 2.0 * rho * (q - 1.0) / q + 2.0 * rho * rho * (q - 2.0) / q;
        return Ok(sq.sqrt());
    }
    let one_minus = 1.0 - rho;
    let inner = 1.0 - (1.0 - signed_pow(rho, q)) / (q * one_minus);
    Ok((1.0 + 2.0 * rho / one_minus * inner).sqrt())
}

/// Which lag-3 series the autocorrelation recipe uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThirdLag {
    /// Covariance with `R_{t-3}`.
    #[default]
    Lag3,
    /// Covariance with `R_{t-2}`, reproducing the formula exactly as printed.
    PrintedLag2,
}

/// The components of the averaged autocorrelation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoEstimate {
    /// Average of the three components, clamped to `(-0.999, 0.999)`.
    pub rho: f64,
    pub rho1: f64,
    /// `sqrt` of the positive part of the lag-2 ratio.
    pub rho2: f64,
    /// Signed cube root of the lag-3 ratio.
    pub rho3: f64,
}

/// Lag-`lag` covariance over overlapping pairs `(R_t, R_{t-lag})`, divided by
/// the symmetrized variance of the two windows. Each window uses its own mean
/// and an `n - lag - 1` divisor.
fn lag_ratio(values: &[f64], lag: usize) -> Result<f64> {
    let n = values.len();
    let current = &values[lag..];
    let lagged = &values[..n - lag];
    let mc = sample_mean(current)?;
    let ml = sample_mean(lagged)?;
    let m = (n - lag) as f64 - 1.0;
    let cov = current
        .iter()
        .zip(lagged)
        .map(|(a, b)| (a - mc) * (b - ml))
        .sum::<f64>()
        / m;
    let var_c = sample_std(current)?.powi(2);
    let var_l = sample_std(lagged)?.powi(2);
    let denom = 0.5 * (var_c + var_l);
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!("zero variance in the lag-{lag} windows")));
    }
    Ok(cov / denom)
}

/// Averages the lag-1 ratio, the square root of the positive lag-2 ratio and
/// the cube root of the lag-3 ratio into one first-order autocorrelation.
pub fn estimate_rho(series: &ObservationSeries) -> Result<RhoEstimate> {
    estimate_rho_with(series.values(), ThirdLag::Lag3)
}

pub fn estimate_rho_with(values: &[f64], third: ThirdLag) -> Result<RhoEstimate> {
    if values.len() < 4 {
        return Err(Error::Degenerate(format!(
            "autocorrelation estimate needs at least 4 observations, got {}",
            values.len()
        )));
    }
    let check_spread = sample_std(values)?;
    if check_spread == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    let rho1 = lag_ratio(values, 1)?;
    let rho2 = lag_ratio(values, 2)?.max(0.0).sqrt();
    let third_lag = match third {
        ThirdLag::Lag3 => 3,
        ThirdLag::PrintedLag2 => 2,
    };
    let rho3 = lag_ratio(values, third_lag)?.cbrt();
    let rho = ((rho1 + rho2 + rho3) / 3.0).clamp(-RHO_CLAMP, RHO_CLAMP);
    Ok(RhoEstimate { rho, rho1, rho2, rho3 })
}

/// Lag-1 component alone, clamped like the averaged estimate.
pub fn estimate_rho_lag1(values: &[f64]) -> Result<f64> {
    if values.len() < 4 {
        return Err(Error::Degenerate("need at least 4 observations".into()));
    }
    Ok(lag_ratio(values, 1)?.clamp(-RHO_CLAMP, RHO_CLAMP))
}

/// Fits `(μ, ρ, σ)` so the implied stationary variance equals the sample variance.
pub fn fit_ar1(series: &ObservationSeries) -> Result<Ar1Params> {
    let est = estimate_rho(series)?;
    let std = series.std();
    if !(std > 0.0) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ar1Params::new(series.mean(), est.rho, std * (1.0 - est.rho * est.rho).sqrt())
}
