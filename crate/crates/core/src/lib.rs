//! Statistical significance of Sharpe ratios: skill or luck.
//!
//! The crate estimates Sharpe ratios from return or PnL series, corrects the
//! square-root-of-time annualization for AR(1) autocorrelation, and runs
//! Student, Fisher and Wald style tests of the null hypothesis that the
//! expected Sharpe ratio is zero. It can regenerate the standard reference
//! tables of minimum Sharpe ratios and skill percentages, and calibrate every
//! test by Monte Carlo simulation.

pub mod autocorr;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod series;
pub mod significance;
pub mod special;
pub mod tables;

pub use error::{Error, Result};
