//! Significance tests for an observed annualized Sharpe ratio.
//!
//! Under the null `E[SR] = 0`, the annualized Sharpe `s` of `N` observations
//! sampled `F` times a year maps to the per-period t-statistic
//! `t = √N · δ(ρ, F) · s / √F`. Each test turns that statistic into a luck
//! probability (the p-value) and its complement, the skill probability. The
//! inversions return the smallest annualized Sharpe that reaches a target skill.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::autocorr;
use crate::error::{Error, Result};
use crate::special::{f_sf, normal_cdf, normal_inv, t_cdf, t_inv, Probability};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    #[serde(rename = "student-one")]
    StudentOneTailed,
    #[serde(rename = "student-two")]
    StudentTwoTailed,
    /// `F(1, N-1)` on `t²`; two-tailed by construction.
    Fisher,
    /// Normal approximation on the unadjusted statistic (no δ).
    WaldRaw,
    WaldStudentized,
    /// Normal approximation with a small-sample correction of the t-statistic.
    WaldModified,
}

impl TestKind {
    pub const ALL: [TestKind; 6] = [
        TestKind::StudentOneTailed,
        TestKind::StudentTwoTailed,
        TestKind::Fisher,
        TestKind::WaldRaw,
        TestKind::WaldStudentized,
        TestKind::WaldModified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::StudentOneTailed => "student-one",
            TestKind::StudentTwoTailed => "student-two",
            TestKind::Fisher => "fisher",
            TestKind::WaldRaw => "wald-raw",
            TestKind::WaldStudentized => "wald-studentized",
            TestKind::WaldModified => "wald-modified",
        }
    }

    pub fn is_one_tailed(self) -> bool {
        self == TestKind::StudentOneTailed
    }

    /// Whether the statistic carries the autocorrelation factor δ.
    pub fn uses_delta(self) -> bool {
        self != TestKind::WaldRaw
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = TestKind::ALL.iter().map(|k| k.name()).collect();
                Error::domain("TestKind", format!("unknown test '{s}', expected one of {}", names.join(", ")))
            })
    }
}

/// Which argument the modified Wald test feeds into its correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModifiedForm {
    /// `m = t·c / √(1 + t²/(2(N-1)))` with the per-period t-statistic.
    #[default]
    Derived,
    /// `m = t·c / √(1 + s²δ²/(2(1 - 1/N)))` with the annualized `s`.
    Printed,
}

/// A fully specified test: which test, sample size, frequency, autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestSpec {
    test: TestKind,
    n: usize,
    periods_per_year: f64,
    rho: f64,
    delta: f64,
    modified_form: ModifiedForm,
}

impl TestSpec {
    pub fn new(test: TestKind, n: usize, periods_per_year: f64, rho: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("TestSpec", format!("need n >= 2, got {n}")));
        }
        if !(periods_per_year > 0.0 && periods_per_year.is_finite()) {
            return Err(Error::domain(
                "TestSpec",
                format!("periods per year must be positive, got {periods_per_year}"),
            ));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::domain("TestSpec", format!("|rho| must be < 1, got {rho}")));
        }
        // δ is defined for q >= 1; sub-annual frequencies aggregate nothing.
        let delta = autocorr::delta(rho, periods_per_year.max(1.0))?;
        Ok(Self {
            test,
            n,
            periods_per_year,
            rho,
            delta,
            modified_form: ModifiedForm::Derived,
        })
    }

    pub fn with_modified_form(mut self, form: ModifiedForm) -> Self {
        self.modified_form = form;
        self
    }

    pub fn with_test(mut self, test: TestKind) -> Self {
        self.test = test;
        self
    }

    pub fn test(&self) -> TestKind {
        self.test
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn periods_per_year(&self) -> f64 {
        self.periods_per_year
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn modified_form(&self) -> ModifiedForm {
        self.modified_form
    }

    fn dof(&self) -> f64 {
        (self.n - 1) as f64
    }

    /// `√F / (δ √N)`, the map from a t-quantile to an annualized Sharpe.
    fn scale(&self) -> f64 {
        self.periods_per_year.sqrt() / (self.delta * (self.n as f64).sqrt())
    }

    /// `1 - 1/(4(N-1))`.
    fn modified_bias(&self) -> f64 {
        1.0 - 1.0 / (4.0 * self.dof())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub luck: Probability,
    pub skill: Probability,
}

/// `√N · δ · s / √F`.
pub fn studentized_statistic(sr_annual: f64, spec: &TestSpec) -> f64 {
    (spec.n as f64).sqrt() * spec.delta * sr_annual / spec.periods_per_year.sqrt()
}

/// The statistic each test compares with its reference distribution.
pub fn test_statistic(sr_annual: f64, spec: &TestSpec) -> f64 {
    let t = studentized_statistic(sr_annual, spec);
    match spec.test {
        TestKind::StudentOneTailed | TestKind::StudentTwoTailed | TestKind::WaldStudentized => t,
        TestKind::Fisher => t * t,
        TestKind::WaldRaw => sr_annual * (spec.n as f64 / spec.periods_per_year).sqrt(),
        TestKind::WaldModified => {
            let correction = match spec.modified_form {
                ModifiedForm::Derived => t * t / (2.0 * spec.dof()),
                ModifiedForm::Printed => {
                    let sd = sr_annual * spec.delta;
                    sd * sd / (2.0 * (1.0 - 1.0 / spec.n as f64))
                }
            };
            t * spec.modified_bias() / (1.0 + correction).sqrt()
        }
    }
}

/// Probability of a statistic at least this extreme under the null.
pub fn luck_p_value(sr_annual: f64, spec: &TestSpec) -> Result<Probability> {
    if sr_annual.is_nan() {
        return Err(Error::domain("luck_p_value", "Sharpe ratio is NaN"));
    }
    let stat = test_statistic(sr_annual, spec);
    let luck = match spec.test {
        TestKind::StudentOneTailed => t_cdf(-stat, spec.dof())?,
        TestKind::StudentTwoTailed => 2.0 * t_cdf(-stat.abs(), spec.dof())?,
        TestKind::Fisher => f_sf(stat, 1.0, spec.dof())?,
        TestKind::WaldRaw | TestKind::WaldStudentized | TestKind::WaldModified => {
            2.0 * normal_cdf(-stat.abs())
        }
    };
    Probability::clamped(luck)
}

pub fn skill(sr_annual: f64, spec: &TestSpec) -> Result<Probability> {
    Ok(luck_p_value(sr_annual, spec)?.complement())
}

pub fn evaluate(sr_annual: f64, spec: &TestSpec) -> Result<TestResult> {
    let luck = luck_p_value(sr_annual, spec)?;
    Ok(TestResult {
        statistic: test_statistic(sr_annual, spec),
        luck,
        skill: luck.complement(),
    })
}

/// Smallest annualized Sharpe whose skill reaches `confidence`.
pub fn min_sharpe(spec: &TestSpec, confidence: Probability) -> Result<f64> {
    let c = confidence.value();
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::domain("min_sharpe", format!("confidence must lie in (0, 1), got {c}")));
    }
    let two_tailed = 0.5 * (1.0 + c);
    match spec.test {
        TestKind::StudentOneTailed => {
            // Skill below 1/2 needs a negative Sharpe.
            Ok(spec.scale() * t_inv(c, spec.dof())?)
        }
        TestKind::StudentTwoTailed | TestKind::Fisher => Ok(spec.scale() * t_inv(two_tailed, spec.dof())?),
        TestKind::WaldRaw => {
            Ok((spec.periods_per_year / spec.n as f64).sqrt() * normal_inv(two_tailed)?)
        }
        TestKind::WaldStudentized => Ok(spec.scale() * normal_inv(two_tailed)?),
        TestKind::WaldModified => {
            let z = normal_inv(two_tailed)?;
            let bias = spec.modified_bias();
            let shrink = match spec.modified_form {
                ModifiedForm::Derived => z * z / (2.0 * spec.dof()),
                ModifiedForm::Printed => spec.periods_per_year * z * z / (2.0 * spec.dof()),
            };
            let discriminant = bias * bias - shrink;
            if !(discriminant > 0.0) {
                return Err(Error::Unreachable { confidence: c, n: spec.n });
            }
            Ok(spec.scale() * z / discriminant.sqrt())
        }
    }
}

/// Outcome of feeding a minimum Sharpe back through the test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundTrip {
    pub min_sharpe: f64,
    pub recovered: f64,
    pub error: f64,
}

pub fn round_trip_consistency(spec: &TestSpec, confidence: Probability) -> Result<RoundTrip> {
    let sr = min_sharpe(spec, confidence)?;
    let recovered = skill(sr, spec)?.value();
    Ok(RoundTrip {
        min_sharpe: sr,
        recovered,
        error: (recovered - confidence.value()).abs(),
    })
}
