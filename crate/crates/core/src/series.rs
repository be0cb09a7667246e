//! Observation series and Sharpe ratio estimators.

use serde::{Deserialize, Serialize};

use crate::autocorr;
use crate::error::{Error, Result};

/// What the values of a series represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Per-period simple returns as decimals.
    Returns,
    /// Per-period profit and loss in currency units.
    Pnl,
}

/// Ordered per-period observations with their sampling frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    values: Vec<f64>,
    kind: SeriesKind,
    periods_per_year: f64,
    risk_free_per_period: f64,
}

impl ObservationSeries {
    pub fn new(values: Vec<f64>, kind: SeriesKind, periods_per_year: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Degenerate(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if !(periods_per_year > 0.0 && periods_per_year.is_finite()) {
            return Err(Error::domain(
                "ObservationSeries",
                format!("periods per year must be positive, got {periods_per_year}"),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(
                "ObservationSeries",
                format!("value at index {i} is not finite"),
            ));
        }
        Ok(Self {
            values,
            kind,
            periods_per_year,
            risk_free_per_period: 0.0,
        })
    }

    pub fn returns(values: Vec<f64>, periods_per_year: f64) -> Result<Self> {
        Self::new(values, SeriesKind::Returns, periods_per_year)
    }

    pub fn pnl(values: Vec<f64>, periods_per_year: f64) -> Result<Self> {
        Self::new(values, SeriesKind::Pnl, periods_per_year)
    }

    /// Log returns `ln(P_t / P_{t-1})` from a price path.
    pub fn from_prices(prices: &[f64], periods_per_year: f64) -> Result<Self> {
        if let Some(i) = prices.iter().position(|p| !(*p > 0.0)) {
            return Err(Error::domain(
                "from_prices",
                format!("price at index {i} must be positive"),
            ));
        }
        let values = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        Self::returns(values, periods_per_year)
    }

    pub fn with_risk_free(mut self, risk_free_per_period: f64) -> Result<Self> {
        if !risk_free_per_period.is_finite() {
            return Err(Error::domain("with_risk_free", "risk-free rate must be finite"));
        }
        self.risk_free_per_period = risk_free_per_period;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn periods_per_year(&self) -> f64 {
        self.periods_per_year
    }

    pub fn risk_free_per_period(&self) -> f64 {
        self.risk_free_per_period
    }

    pub fn mean(&self) -> f64 {
        mean_unchecked(&self.values)
    }

    pub fn std(&self) -> f64 {
        std_unchecked(&self.values)
    }
}

fn mean_unchecked(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn std_unchecked(values: &[f64]) -> f64 {
    let mean = mean_unchecked(values);
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

pub fn sample_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Degenerate("mean of an empty series".into()));
    }
    Ok(mean_unchecked(values))
}

/// Unbiased (n - 1) standard deviation, two-pass centered form.
pub fn sample_std(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Degenerate(format!(
            "standard deviation needs at least 2 observations, got {}",
            values.len()
        )));
    }
    Ok(std_unchecked(values))
}

fn nonzero_std(series: &ObservationSeries) -> Result<f64> {
    let std = series.std();
    let scale = series.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if std == 0.0 || std <= scale * 1e-14 {
        return Err(Error::Degenerate(
            "zero variance: the track record cannot be tested".into(),
        ));
    }
    Ok(std)
}

/// Per-period Sharpe `(mean - r_f) / std` of a return series.
pub fn sharpe_per_period(series: &ObservationSeries) -> Result<f64> {
    if series.kind != SeriesKind::Returns {
        return Err(Error::domain(
            "sharpe_per_period",
            "series holds PnL; use capital_dimensionless_sharpe",
        ));
    }
    let std = nonzero_std(series)?;
    Ok((series.mean() - series.risk_free_per_period) / std)
}

/// Annualized Sharpe of a PnL series, `√F · mean(P) / std(P)`; independent
/// of the capital behind the PnL.
pub fn capital_dimensionless_sharpe(series: &ObservationSeries) -> Result<f64> {
    if series.kind != SeriesKind::Pnl {
        return Err(Error::domain(
            "capital_dimensionless_sharpe",
            "series holds returns; use sharpe_per_period",
        ));
    }
    let std = nonzero_std(series)?;
    Ok(series.periods_per_year.sqrt() * series.mean() / std)
}

/// Square-root-of-time annualization.
pub fn annualize_sqrt(sr_period: f64, periods_per_year: f64) -> f64 {
    periods_per_year.sqrt() * sr_period
}

/// Annualization corrected for AR(1) autocorrelation: `√F · SR / δ(ρ, F)`.
pub fn annualize_adjusted(sr_period: f64, periods_per_year: f64, rho: f64) -> Result<f64> {
    let delta = autocorr::delta(rho, periods_per_year)?;
    Ok(annualize_sqrt(sr_period, periods_per_year) / delta)
}

/// Everything derived from one series at a given autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpeEstimate {
    pub n: usize,
    pub sr_period: f64,
    pub sr_annual_sqrt: f64,
    pub sr_annual_adjusted: f64,
    pub rho: f64,
    pub delta: f64,
    /// Non-centrality `√n · SR_period`.
    pub eta: f64,
}

impl SharpeEstimate {
    /// Builds the estimate for `series` at autocorrelation `rho`. PnL series
    /// use the capital-dimensionless ratio as their per-period Sharpe.
    pub fn from_series(series: &ObservationSeries, rho: f64) -> Result<Self> {
        let sr_period = match series.kind {
            SeriesKind::Returns => sharpe_per_period(series)?,
            SeriesKind::Pnl => series.mean() / nonzero_std(series)?,
        };
        Self::from_parts(series.len(), sr_period, series.periods_per_year, rho)
    }

    pub fn from_parts(n: usize, sr_period: f64, periods_per_year: f64, rho: f64) -> Result<Self> {
        let delta = autocorr::delta(rho, periods_per_year)?;
        let sr_annual_sqrt = annualize_sqrt(sr_period, periods_per_year);
        Ok(Self {
            n,
            sr_period,
            sr_annual_sqrt,
            sr_annual_adjusted: sr_annual_sqrt / delta,
            rho,
            delta,
            eta: (n as f64).sqrt() * sr_period,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_std_hand_cases() {
        assert_eq!(sample_mean(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(sample_mean(&[4.5; 7]).unwrap(), 4.5);
        assert_eq!(sample_std(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert!((sample_std(&[0.0, 2.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(sample_mean(&[]).is_err());
        assert!(sample_std(&[1.0]).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(ObservationSeries::returns(vec![0.1], 252.0).is_err());
        assert!(ObservationSeries::returns(vec![0.1, 0.2], 0.0).is_err());
        assert!(ObservationSeries::returns(vec![0.1, f64::NAN], 12.0).is_err());
        assert!(ObservationSeries::from_prices(&[1.0, 0.0, 2.0], 252.0).is_err());
    }

    #[test]
    fn zero_excess_return_gives_zero_sharpe() {
        let s = ObservationSeries::returns(vec![0.01, 0.03, 0.02, 0.04, 0.0], 252.0)
            .unwrap()
            .with_risk_free(0.02)
            .unwrap();
        assert!(sharpe_per_period(&s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = ObservationSeries::returns(vec![0.01; 30], 252.0).unwrap();
        assert!(matches!(sharpe_per_period(&s), Err(Error::Degenerate(_))));
        let p = ObservationSeries::pnl(vec![100.0; 30], 252.0).unwrap();
        assert!(matches!(capital_dimensionless_sharpe(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let p = ObservationSeries::pnl(vec![1.0, -2.0, 3.0], 12.0).unwrap();
        assert!(sharpe_per_period(&p).is_err());
        let r = ObservationSeries::returns(vec![1.0, -2.0, 3.0], 12.0).unwrap();
        assert!(capital_dimensionless_sharpe(&r).is_err());
    }

    #[test]
    fn alternating_pnl_has_zero_sharpe() {
        let values: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let p = ObservationSeries::pnl(values, 252.0).unwrap();
        assert_eq!(capital_dimensionless_sharpe(&p).unwrap(), 0.0);
    }

    #[test]
    fn annualization_rules() {
        assert!((annualize_sqrt(0.1, 12.0) - 0.1 * 12f64.sqrt()).abs() < 1e-16);
        assert_eq!(annualize_sqrt(0.0, 252.0), 0.0);
        assert_eq!(annualize_sqrt(0.37, 1.0), 0.37);
        assert_eq!(annualize_adjusted(0.1, 252.0, 0.0).unwrap(), annualize_sqrt(0.1, 252.0));
        assert!(annualize_adjusted(0.1, 252.0, 0.3).unwrap() < annualize_sqrt(0.1, 252.0));
        assert!(annualize_adjusted(0.1, 252.0, -0.3).unwrap() > annualize_sqrt(0.1, 252.0));
        assert!(annualize_adjusted(0.1, 252.0, 1.0).is_err());
    }

    #[test]
    fn log_returns_from_prices() {
        let s = ObservationSeries::from_prices(&[100.0, 110.0, 99.0], 252.0).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.values()[0] - (1.1f64).ln()).abs() < 1e-15);
        assert!((s.values()[1] - (0.9f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn estimate_invariants() {
        let s = ObservationSeries::returns(vec![0.01, -0.02, 0.015, 0.003, -0.004, 0.02], 252.0).unwrap();
        let e = SharpeEstimate::from_series(&s, 0.2).unwrap();
        assert_eq!(e.sr_annual_sqrt, 252f64.sqrt() * e.sr_period);
        assert_eq!(e.sr_annual_adjusted, e.sr_annual_sqrt / e.delta);
        assert!(e.delta > 1.0);
        assert!((e.eta - 6f64.sqrt() * e.sr_period).abs() < 1e-15);
    }

    #[test]
    fn sharpe_matches_single_sum_form() {
        let r = [0.012, -0.007, 0.004, 0.021, -0.015, 0.009, 0.0, 0.003];
        let rf = 0.0002;
        let s = ObservationSeries::returns(r.to_vec(), 252.0).unwrap().with_risk_free(rf).unwrap();
        let n = r.len() as f64;
        let mean = r.iter().sum::<f64>() / n;
        let excess: f64 = r.iter().map(|x| x - rf).sum();
        let ss: f64 = r.iter().map(|x| (x - mean).powi(2)).sum();
        let direct = (n - 1.0).sqrt() * excess / (n * ss.sqrt());
        assert!((sharpe_per_period(&s).unwrap() - direct).abs() < 1e-14);
    }
}
